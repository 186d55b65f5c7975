from __future__ import annotations

import json
from pathlib import Path

import pytest

from vistax.cli import cli
from vistax.engine import open_session
from vistax.storage import RecordStore, save_schema

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "music.vts"


@pytest.fixture
def frozen_path(music, tmp_path):
    path = tmp_path / "music.vtsf"
    save_schema(music, path)
    return path


@pytest.fixture
def record_paths(music, tmp_path):
    paths = []
    for annotator, count in (("alice", 13), ("bob", 13)):
        session = open_session(music, annotator, [f"img{i}" for i in range(count)],
                               session_id=f"s-{annotator}",
                               clock=lambda: "1970-01-01T00:00:00Z")
        records = []
        for i in range(count):
            region = session.localize(f"img{i}", (0, 0, 20, 20))
            session.assert_property(region, "sound_production", "string_vibration")
            # bob disagrees on every fourth item
            count_value = 13 if (annotator == "bob" and i % 4 == 0) else 6
            session.assert_property(region, "taut_string_count", count_value)
            records.append(session.finalize(region))
        path = tmp_path / f"{annotator}.vrec"
        RecordStore(path, known_stamps={music.version_stamp}).append(records)
        paths.append(path)
    return paths


def test_schema_check_fixture(capsys):
    code = cli(["schema", "check", str(FIXTURE)])
    out = capsys.readouterr().out
    assert code == 0
    assert "0 errors, 0 warnings" in out


def test_schema_check_k4_violation(tmp_path, capsys):
    text = FIXTURE.read_text().replace("when taut_string_count = 13",
                                       "when taut_string_count = 6")
    bad = tmp_path / "bad.vts"
    bad.write_text(text)
    code = cli(["schema", "check", str(bad)])
    captured = capsys.readouterr()
    assert code == 2
    assert "K4" in captured.err
    assert f"{bad}:" in captured.err  # span-annotated finding
    assert "1 errors" in captured.out


def test_schema_check_missing_file():
    assert cli(["schema", "check", "/nonexistent/zzz.vts"]) == 3


def test_schema_check_syntax_error(tmp_path, capsys):
    bad = tmp_path / "bad.vts"
    bad.write_text("schema s {\n  node root {\n    when = 3\n  }\n}\n")
    assert cli(["schema", "check", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_schema_freeze_and_classify(tmp_path, capsys):
    out = tmp_path / "music.vtsf"
    assert cli(["schema", "freeze", str(FIXTURE), "-o", str(out)]) == 0
    capsys.readouterr()
    code = cli(["classify", str(out),
                "--assert", "sound_production=string_vibration",
                "--assert", "taut_string_count=6"])
    captured = capsys.readouterr().out
    assert code == 0
    lines = [l for l in captured.strip().splitlines() if l and ":" not in l]
    assert lines[-1] == "guitar [1278956]"
    assert "status: leaf" in captured


def test_classify_partial_prints_frontier(frozen_path, capsys):
    code = cli(["classify", str(frozen_path),
                "--assert", "sound_production=string_vibration"])
    captured = capsys.readouterr().out
    assert code == 0
    assert "status: partial" in captured
    assert "guitar: taut_string_count=6" in captured
    assert "koto: taut_string_count=13" in captured


def test_classify_bad_value(frozen_path, capsys):
    code = cli(["classify", str(frozen_path),
                "--assert", "taut_string_count=7777"])
    assert code == 2
    assert "ValueOutOfDomain" in capsys.readouterr().err


def test_classify_accepts_dsl_source(capsys):
    code = cli(["classify", str(FIXTURE), "--assert", "sound_production=air_vibration"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.strip().splitlines()[-2].startswith("wind instrument [")


def test_agree_all_metrics(record_paths, frozen_path, tmp_path, capsys):
    out_json = tmp_path / "report.json"
    code = cli(["agree", *map(str, record_paths), "--schema", str(frozen_path),
                "--hierarchical", "--out", str(out_json)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "percent agreement" in captured
    assert "cohen kappa" in captured
    report = json.loads(out_json.read_text())
    # bob flips 4 of 13 items: percent agreement 9/13
    assert report["percent_agreement"] == pytest.approx(9 / 13)
    assert report["hierarchical_agreement"] is not None


def test_agree_single_metric(record_paths, frozen_path, capsys):
    assert cli(["agree", *map(str, record_paths), "--schema", str(frozen_path),
                "--metric", "percent"]) == 0
    assert "percent agreement:" in capsys.readouterr().out


def test_simulate_from_config(frozen_path, tmp_path, capsys):
    config = tmp_path / "exp.cfg"
    config.write_text(
        f"schema={frozen_path.name}\nitems=200\nannotators=2\n"
        "epsilon=0.1\nseed=42\nout=report.json\n")
    code = cli(["simulate", str(config)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "delta" in captured
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["delta"]["percent_agreement"]["absolute"] > 0
    assert report["grounded"]["percent_agreement"] > report["adhoc"]["percent_agreement"]


def test_simulate_missing_keys(frozen_path, tmp_path, capsys):
    config = tmp_path / "exp.cfg"
    config.write_text(f"schema={frozen_path.name}\n")
    assert cli(["simulate", str(config)]) == 1


def test_export_csv(record_paths, frozen_path, tmp_path, capsys):
    out = tmp_path / "manifest.csv"
    code = cli(["export", str(record_paths[0]), str(frozen_path), "-o", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 14  # header + 13 rows
    assert lines[0].startswith("image,")


def test_export_tampered_store(music, frozen_path, tmp_path, capsys):
    session = open_session(music, "eve", ["img"], session_id="s-eve")
    region = session.localize("img", (0, 0, 9, 9))
    session.assert_property(region, "sound_production", "string_vibration")
    session.assert_property(region, "taut_string_count", 6)
    record = session.finalize(region)
    store_path = tmp_path / "evil.vrec"
    raw = record.as_dict()
    raw["node_id"] = "koto"  # tamper
    store_path.write_text(json.dumps(raw) + "\n")
    code = cli(["export", str(store_path), str(frozen_path),
                "-o", str(tmp_path / "m.csv")])
    assert code == 2
    assert "InconsistentRecord" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    assert cli([]) == 1
    assert cli(["classify"]) == 1
    assert cli(["schema"]) == 1
    assert cli(["serve"]) == 1
    assert cli(["serve", "--port", "9000"]) == 1


def test_serve_accepts_flag_form(frozen_path, tmp_path, monkeypatch):
    captured = {}

    def fake_run(app, **kwargs):
        captured["app"] = app
        captured.update(kwargs)

    import vistax.cli as cli_module
    monkeypatch.setattr("uvicorn.run", fake_run)
    code = cli_module.cli(["serve", "--schema", str(frozen_path),
                           "--store", str(tmp_path / "r.vrec"), "--port", "9321"])
    assert code == 0
    assert captured["port"] == 9321
    positional = cli_module.cli(["serve", str(frozen_path),
                                 str(tmp_path / "r.vrec"), "--port", "9322"])
    assert positional == 0
    assert captured["port"] == 9322

from __future__ import annotations

import pytest

from vistax import (
    ClassificationNode,
    ContextProfile,
    DifferentiaConstraint as C,
    LexicalBinding,
    PropertyDef,
    Schema,
    freeze,
    validate,
)
from vistax.errors import ValidationFailedError

from conftest import GUITAR_ID, MUSIC_BASE, build_music_draft


def test_music_validates_clean(music_draft):
    report = validate(music_draft)
    assert report.errors() == []
    assert report.warnings() == []
    assert report.ok


def test_freeze_assigns_all_concept_ids(music_draft):
    frozen = freeze(music_draft)
    ids = {nid: n.concept_id for nid, n in frozen.nodes.items()}
    assert ids["guitar"] == GUITAR_ID
    assert sorted(v for k, v in ids.items() if k != "guitar") == [
        MUSIC_BASE, MUSIC_BASE + 1, MUSIC_BASE + 2, MUSIC_BASE + 3]
    assert len(set(ids.values())) == 5


def test_freeze_idempotent(music):
    again = freeze(music)
    assert again is music
    assert again.version_stamp == music.version_stamp


def test_freeze_rejects_invalid(music_draft):
    # force a K4 violation: koto differentia equal to guitar's
    music_draft.nodes["koto"].differentiae = (C("taut_string_count", 6),)
    with pytest.raises(ValidationFailedError) as exc:
        freeze(music_draft)
    assert any(f.canon == "K4" for f in exc.value.report.errors())


def test_freeze_soundness_iff_zero_errors(music_draft):
    assert validate(music_draft).ok
    freeze(music_draft)  # must not raise
    music_draft.nodes["koto"].differentiae = ()
    report = validate(music_draft)
    assert not report.ok
    with pytest.raises(ValidationFailedError):
        freeze(music_draft)


# --- one constructed negative fixture per canon ---

def _expect(schema, canon, locus, severity="error"):
    report = validate(schema)
    matches = [f for f in report.by_canon(canon) if f.locus == locus]
    assert matches, (
        f"expected {canon} at {locus!r}; got "
        f"{[(f.canon, f.locus) for f in report.findings]}")
    assert all(f.severity == severity for f in matches)
    return report


def test_k1_two_roots():
    schema = build_music_draft()
    schema.nodes["rogue_root"] = ClassificationNode(node_id="rogue_root", parent=None)
    _expect(schema, "K1", "musical_instrument,rogue_root")


def test_k1_cycle():
    schema = build_music_draft()
    # detach the stringed subtree into a two-node cycle
    schema.nodes["stringed_instrument"].parent = "guitar"
    report = validate(schema)
    cyclic = [f for f in report.by_canon("K1")
              if "guitar" in f.locus and "stringed_instrument" in f.locus]
    assert cyclic and all(f.severity == "error" for f in cyclic)


def test_k2_empty_differentiae():
    schema = build_music_draft()
    schema.nodes["wind_instrument"].differentiae = ()
    _expect(schema, "K2", "wind_instrument")


def test_k3_path_conflict():
    schema = build_music_draft()
    schema.add_node("contradiction", "guitar", (C("taut_string_count", 7),),
                    LexicalBinding(lemma="contradiction", gloss="a placeholder gloss"))
    _expect(schema, "K3", "contradiction")


def test_k4_equal_sibling_values():
    schema = build_music_draft()
    schema.nodes["koto"].differentiae = (C("taut_string_count", 6),)
    _expect(schema, "K4", "guitar,koto")


def test_k4_disjoint_sibling_properties():
    schema = build_music_draft()
    schema.nodes["wind_instrument"].differentiae = (C("taut_string_count", 0),)
    _expect(schema, "K4", "stringed_instrument,wind_instrument")


def test_k5_duplicate_label():
    schema = build_music_draft()
    schema.add_node("second_guitar", "stringed_instrument", (C("taut_string_count", 12),))
    schema.properties["taut_string_count"].phrase_map[12] = "twelve taut strings"
    schema.set_binding("second_guitar", LexicalBinding(
        lemma="guitar", language="eng", gloss="a stringed instrument with twelve taut strings"))
    _expect(schema, "K5", "guitar,second_guitar")


def test_k5_synthesized_collision():
    schema = build_music_draft()
    schema.set_binding("koto", None)
    schema.add_node("koto_twin", "stringed_instrument", (C("taut_string_count", 13),))
    report = validate(schema)
    # koto and koto_twin both synthesize "stringed instrument with thirteen
    # taut strings" (and they also break K4 by sharing an equal value)
    assert any(f.canon == "K5" and f.locus == "koto,koto_twin" for f in report.errors())


def test_k6_duplicate_concept_id():
    schema = build_music_draft()
    schema.set_concept_id("koto", GUITAR_ID)
    _expect(schema, "K6", "guitar,koto")


def test_k7_gloss_misalignment_warning():
    schema = build_music_draft()
    schema.set_binding("guitar", LexicalBinding(
        lemma="guitar", language="eng", gloss="a plucked chordophone"))
    report = _expect(schema, "K7", "guitar", severity="warning")
    assert report.ok  # warnings never block freezing
    messages = [f.message for f in report.by_canon("K7")]
    assert any("six taut strings" in m for m in messages)
    assert any("taut strings" in m for m in messages)


def test_k8_lexical_gap_warning():
    schema = build_music_draft()
    schema.set_binding("koto", None)
    report = _expect(schema, "K8", "koto", severity="warning")
    assert report.ok


def test_k0_missing_phrase_blocks():
    schema = build_music_draft()
    del schema.properties["taut_string_count"].phrase_map[13]
    report = validate(schema)
    assert any(f.canon == "K0" and f.locus == "koto" for f in report.errors())


def test_validation_report_render(music_draft):
    assert validate(music_draft).render().endswith("0 errors, 0 warnings")


def test_freeze_on_unbound_node_synthesizes(music_draft):
    music_draft.set_binding("koto", None)
    frozen = freeze(music_draft)
    from vistax import canonical_label
    assert canonical_label(frozen, "koto") == "stringed instrument with thirteen taut strings"


def test_bijectivity_after_freeze(music):
    from vistax import canonical_label
    labels = {canonical_label(music, nid) for nid in music.nodes}
    ids = {n.concept_id for n in music.nodes.values()}
    assert len(labels) == len(music.nodes)
    assert len(ids) == len(music.nodes)

from __future__ import annotations

import random
from pathlib import Path

import pytest

from vistax import freeze, validate
from vistax.dsl import compile_text, lower, parse, serialize

from conftest import build_music_draft
from docgen import random_document

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "music.vts"


@pytest.fixture(scope="module")
def music_text() -> str:
    return FIXTURE.read_text(encoding="utf-8")


def test_fixture_parses_clean(music_text):
    result = parse(music_text)
    assert result.ok, [d.render() for d in result.diagnostics]
    doc = result.document
    assert len(doc.properties) == 2
    assert sum(1 for _ in doc.iter_nodes()) == 5


def test_fixture_lowers_to_the_programmatic_draft(music_text):
    lowered = compile_text(music_text)
    assert lowered.ok, [d.render() for d in lowered.diagnostics]
    built = build_music_draft()
    assert lowered.schema == built
    assert lowered.schema.version_stamp == built.version_stamp


def test_fixture_freezes(music_text):
    lowered = compile_text(music_text)
    frozen = freeze(lowered.schema)
    assert frozen.nodes["guitar"].concept_id == 1278956


def test_empty_input():
    result = parse("")
    assert result.document is None
    assert any("expected schema header" in d.message for d in result.diagnostics)


def test_undeclared_property_reported_with_span():
    text = ('schema s {\n'
            '  context { name "c" }\n'
            '  node root {\n'
            '    node child {\n'
            '      when colour = red\n'
            '    }\n'
            '  }\n'
            '}\n')
    result = parse(text)
    errs = [d for d in result.diagnostics if "colour" in d.message]
    assert errs
    span = errs[0].span
    assert span.line == 5
    assert text.encode()[span.start:span.end] == b"colour"


def test_error_recovery_reports_independent_errors():
    text = ('schema s {\n'
            '  context { name "c" }\n'
            '  property p enum {\n'
            '    a "alpha"\n'
            '    b\n'                 # missing phrase
            '  }\n'
            '  node root {\n'
            '    label "root"\n'      # label without gloss
            '    when = 3\n'          # missing property name
            '  }\n'
            '}\n')
    result = parse(text)
    errors = [d for d in result.diagnostics if d.severity == "error"]
    assert len(errors) >= 3


def test_diagnostic_spans_inside_text():
    broken = 'schema s {\n  node root {\n    when ??? = 1\n  }\n'
    result = parse(broken)
    raw = broken.encode()
    assert result.diagnostics
    for d in result.diagnostics:
        assert 0 <= d.span.start <= d.span.end <= len(raw)


def test_comments_and_whitespace_do_not_change_canonical_form(music_text):
    noisy = music_text.replace("schema music {",
                               "# extra\n\nschema   music   {  # trailing")
    a = serialize(parse(music_text).document)
    b = serialize(parse(noisy).document)
    assert a == b


def test_fixture_is_canonical_modulo_comments(music_text):
    canonical = serialize(parse(music_text).document)
    stripped = "".join(line for line in music_text.splitlines(keepends=True)
                       if not line.lstrip().startswith("#"))
    assert canonical == stripped


def test_multiline_gloss_concatenation():
    text = ('schema s {\n'
            '  context { name "c" }\n'
            '  node root {\n'
            '    label "r" lang eng\n'
            '    gloss "first half, "\n'
            '          "second half"\n'
            '  }\n'
            '}\n')
    result = parse(text)
    assert result.ok, [d.render() for d in result.diagnostics]
    assert result.document.root.gloss == "first half, second half"


def test_escape_sequences_round_trip():
    doc = parse('schema s {\n  context { name "a\\"b\\\\c\\nd\\te" }\n'
                '  node root { }\n}\n').document
    assert doc.context_name == 'a"b\\c\nd\te'
    again = parse(serialize(doc)).document
    assert again.context_name == doc.context_name


def test_duplicate_node_rejected():
    text = ('schema s {\n  context { name "c" }\n'
            '  node root {\n    node a { when p = 1 }\n    node a { when p = 2 }\n  }\n}\n')
    result = parse(text)
    assert any("declared twice" in d.message for d in result.diagnostics)


def test_two_top_level_nodes_rejected():
    text = ('schema s {\n  context { name "c" }\n'
            '  node root1 { }\n  node root2 { }\n}\n')
    result = parse(text)
    assert any("exactly one top-level node" in d.message for d in result.diagnostics)


def test_lower_out_of_domain_with_span():
    text = ('schema s {\n'
            '  context { name "c" }\n'
            '  property strings int 0..10 {\n'
            '    3 "three strings"\n'
            '  }\n'
            '  node root {\n'
            '    node bad {\n'
            '      when strings = 22\n'
            '    }\n'
            '  }\n'
            '}\n')
    lowered = compile_text(text)
    assert lowered.schema is None
    errs = [d for d in lowered.diagnostics if d.code == "ValueOutOfDomain"]
    assert errs and errs[0].span.line == 8


def test_lower_duplicate_label_validates_with_span():
    text = ('schema s {\n'
            '  context { name "c" }\n'
            '  property n int 0..9 {\n'
            '    1 "one"\n'
            '    2 "two"\n'
            '  }\n'
            '  node root {\n'
            '    label "root" lang eng\n'
            '    gloss "top"\n'
            '    node a {\n'
            '      when n = 1\n'
            '      label "same" lang eng\n'
            '      gloss "one"\n'
            '    }\n'
            '    node b {\n'
            '      when n = 2\n'
            '      label "same" lang eng\n'
            '      gloss "two"\n'
            '    }\n'
            '  }\n'
            '}\n')
    lowered = compile_text(text)
    assert lowered.ok
    report = validate(lowered.schema)
    k5 = [f for f in report.errors() if f.canon == "K5"]
    assert k5 and k5[0].locus == "a,b"
    span = lowered.span_of(k5[0].locus)
    assert span is not None and span.line == 10


def test_round_trip_fixpoint_random_documents():
    for seed in range(120):
        doc = random_document(seed)
        text = serialize(doc)
        result = parse(text)
        assert result.ok, (seed, [d.render() for d in result.diagnostics])
        assert result.document == doc, seed
        assert serialize(result.document) == text, seed


def test_mutated_sources_keep_spans_in_bounds():
    rng = random.Random(7)
    base = serialize(random_document(1))
    for _ in range(60):
        text = base
        for _ in range(rng.randint(1, 3)):
            pos = rng.randrange(len(text))
            op = rng.random()
            if op < 0.4:
                text = text[:pos] + text[pos + 1:]
            elif op < 0.8:
                text = text[:pos] + rng.choice('{}="..#xyz9 ') + text[pos:]
            else:
                text = text[:pos] + text[pos:pos + 5] + text[pos:]
        result = parse(text)
        raw_len = len(text.encode("utf-8"))
        for d in result.diagnostics:
            assert 0 <= d.span.start <= d.span.end <= raw_len
            assert d.span.line >= 1 and d.span.column >= 1

"""Label derivation: gloss-alignment checking and synthesized labels.

A node's canonical label is its bound lemma when it has one; otherwise a
deterministic phrase is synthesized from the nearest labeled ancestor and
the node's own differentia phrases, which is how lexical gaps are covered
without ever inventing free text at annotation time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoBindingError
from .model import Schema, Value


@dataclass(frozen=True)
class AlignmentMiss:
    property: str
    value: Value
    phrase: str | None  # None when the phrase map itself lacks the value


@dataclass(frozen=True)
class AlignmentReport:
    node_id: str
    misses: tuple[AlignmentMiss, ...]

    @property
    def aligned(self) -> bool:
        return not self.misses


def phrase_for(schema: Schema, property_id: str, value: Value) -> str:
    """Phrase from the property's phrase map, with a rendered fallback so
    synthesized labels stay total even before validation."""
    prop = schema.properties.get(property_id)
    phrase = prop.phrase_for(value) if prop is not None else None
    if phrase is not None:
        return phrase
    return f"{_render(property_id)} {value}"


def check_gloss_alignment(schema: Schema, node_id: str) -> AlignmentReport:
    """Check that the gloss contains, case-insensitively, the phrase of every
    constraint on the node's root path (genus and differentia alike)."""
    node = schema.node(node_id)
    if node.binding is None:
        raise NoBindingError(f"node {node_id!r} has no lexical binding", locus=node_id)
    gloss = node.binding.gloss.lower()
    misses = []
    for c in schema.cumulative_constraints(node_id):
        prop = schema.properties.get(c.property)
        phrase = prop.phrase_for(c.required_value) if prop is not None else None
        if phrase is None:
            misses.append(AlignmentMiss(c.property, c.required_value, None))
        elif phrase.lower() not in gloss:
            misses.append(AlignmentMiss(c.property, c.required_value, phrase))
    return AlignmentReport(node_id=node_id, misses=tuple(misses))


def synthesize_label(schema: Schema, node_id: str, language: str | None = None) -> str:
    """Deterministic label for a node: the bound lemma when present, else
    nearest labeled ancestor's lemma + the node's own differentia phrases
    joined by "with"/"and". A rootward walk with no labeled ancestor falls
    back to the root's rendered id."""
    node = schema.node(node_id)
    if node.binding is not None and (language is None or node.binding.language == language):
        return node.binding.lemma
    path = schema.path_to_root(node_id)
    stem = None
    for nid in reversed(path[:-1]):  # ancestors, nearest first
        b = schema.nodes[nid].binding
        if b is not None and (language is None or b.language == language):
            stem = b.lemma
            break
    if stem is None:
        if node.parent is None:
            return _render(node_id)
        stem = _render(path[0])
    phrases = [phrase_for(schema, c.property, c.required_value) for c in node.differentiae]
    if not phrases:
        return stem
    return f"{stem} with " + " and ".join(phrases)


def canonical_label(schema: Schema, node_id: str, language: str | None = None) -> str:
    return synthesize_label(schema, node_id, language)


def _render(identifier: str) -> str:
    return identifier.replace("_", " ")

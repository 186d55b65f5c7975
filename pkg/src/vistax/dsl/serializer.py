"""Canonical text form: sorted property declarations, authored node order,
normalized whitespace and statement order. serialize(parse(serialize(d)))
equals serialize(d) for every valid document, which makes the canonical
text a safe interchange format.
"""

from __future__ import annotations

from .ast import NodeDecl, PropertyDecl, SchemaDocument

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def quote(value: str) -> str:
    return '"' + "".join(_STRING_ESCAPES.get(ch, ch) for ch in value) + '"'


def serialize(doc: SchemaDocument) -> str:
    lines: list[str] = []
    lines.append(f"schema {doc.schema_id} {{")
    lines.append("  context {")
    lines.append(f"    name {quote(doc.context_name)}")
    if doc.context_purpose:
        lines.append(f"    purpose {quote(doc.context_purpose)}")
    lines.append(f"    language {doc.context_language}")
    lines.append("  }")
    lines.append(f"  registry base {doc.registry_base}")
    for prop in sorted(doc.properties, key=lambda p: p.name):
        lines.extend(_property_lines(prop, indent="  "))
    if doc.root is not None:
        lines.extend(_node_lines(doc.root, indent="  ",
                                 default_language=doc.context_language))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _property_lines(prop: PropertyDecl, indent: str) -> list[str]:
    if prop.kind == "integer":
        lo, hi = prop.int_range
        head = f"{indent}property {prop.name} int {lo}..{hi} {{"
    elif prop.kind == "boolean":
        head = f"{indent}property {prop.name} bool {{"
    else:
        head = f"{indent}property {prop.name} enum {{"
    lines = [head]
    for value, phrase in prop.phrases:
        lines.append(f"{indent}  {value} {quote(phrase)}")
    lines.append(f"{indent}}}")
    return lines


def _node_lines(node: NodeDecl, indent: str, default_language: str) -> list[str]:
    lines = [f"{indent}node {node.name} {{"]
    inner = indent + "  "
    if node.constraints:
        clause = " and ".join(f"{c.property} = {c.value}" for c in node.constraints)
        lines.append(f"{inner}when {clause}")
    if node.label is not None:
        # language is always explicit in canonical text
        lang = node.language or default_language
        lines.append(f"{inner}label {quote(node.label)} lang {lang}")
    if node.synonyms:
        lines.append(f"{inner}synonyms " + " ".join(quote(s) for s in node.synonyms))
    if node.gloss is not None:
        lines.append(f"{inner}gloss {quote(node.gloss)}")
    if node.concept_id is not None:
        lines.append(f"{inner}id {node.concept_id}")
    for child in node.children:
        lines.extend(_node_lines(child, indent=inner, default_language=default_language))
    lines.append(f"{indent}}}")
    return lines

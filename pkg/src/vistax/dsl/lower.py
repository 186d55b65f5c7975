"""Lowering: document -> schema draft.

Applies property and node declarations in document order, so a lowered
draft behaves exactly like one authored through the programmatic API.
Domain errors raised by the schema layer are converted into diagnostics
carrying the offending statement's source span, and a source map from
schema loci to spans is kept so validation findings can be printed against
the original text.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import VistaxError
from ..model import (
    ContextProfile,
    DifferentiaConstraint,
    LexicalBinding,
    PropertyDef,
    Schema,
)
from .ast import NodeDecl, SchemaDocument
from .parser import ParseResult, parse
from .tokens import ParseDiagnostic, SourceSpan


@dataclass
class LowerResult:
    schema: Schema | None
    diagnostics: list[ParseDiagnostic]
    spans: dict[str, SourceSpan] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.schema is not None and not any(
            d.severity == "error" for d in self.diagnostics)

    def span_of(self, locus: str) -> SourceSpan | None:
        """Span for a validation-finding locus (node id, property id, or a
        comma-joined id list, in which case the first known id wins)."""
        for part in locus.split(","):
            if part in self.spans:
                return self.spans[part]
        return None


def lower(doc: SchemaDocument) -> LowerResult:
    diagnostics: list[ParseDiagnostic] = []
    spans: dict[str, SourceSpan] = {}

    def fail(exc: VistaxError, span: SourceSpan | None):
        diagnostics.append(ParseDiagnostic(
            severity="error", message=exc.message,
            span=span or SourceSpan(1, 1, 0, 0), code=exc.code))

    if doc.root is None:
        diagnostics.append(ParseDiagnostic(
            severity="error", message="document has no root node",
            span=doc.span or SourceSpan(1, 1, 0, 0)))
        return LowerResult(schema=None, diagnostics=diagnostics)

    try:
        context = ContextProfile(name=doc.context_name, purpose=doc.context_purpose,
                                 language=doc.context_language)
        schema = Schema(doc.schema_id, context, root_id=doc.root.name,
                        registry_base=doc.registry_base)
    except (VistaxError, ValueError) as exc:
        diagnostics.append(ParseDiagnostic(
            severity="error", message=str(exc),
            span=doc.span or SourceSpan(1, 1, 0, 0)))
        return LowerResult(schema=None, diagnostics=diagnostics)

    for prop in doc.properties:
        if prop.span is not None:
            spans[prop.name] = prop.span
        kwargs = {"id": prop.name, "kind": prop.kind,
                  "phrase_map": {v: phrase for v, phrase in prop.phrases}}
        if prop.kind == "enum":
            kwargs["variants"] = tuple(v for v, _ in prop.phrases)
        elif prop.kind == "integer":
            kwargs["int_range"] = prop.int_range
        try:
            schema.add_property(PropertyDef(**kwargs))
        except VistaxError as exc:
            fail(exc, prop.span)

    if doc.root.span is not None:
        spans[doc.root.name] = doc.root.span
    _apply_node_body(schema, doc.root, diagnostics, spans, fail)
    for child in doc.root.children:
        _lower_node(schema, child, doc.root.name, diagnostics, spans, fail)

    if any(d.severity == "error" for d in diagnostics):
        return LowerResult(schema=None, diagnostics=diagnostics, spans=spans)
    return LowerResult(schema=schema, diagnostics=diagnostics, spans=spans)


def _binding_for(node: NodeDecl) -> LexicalBinding | None:
    if node.label is None:
        return None
    return LexicalBinding(lemma=node.label, language=node.language or "eng",
                          gloss=node.gloss or "", synonyms=node.synonyms)


def _apply_node_body(schema, node: NodeDecl, diagnostics, spans, fail):
    """Root node: constraints are illegal, binding/id apply in place."""
    if node.constraints:
        diagnostics.append(ParseDiagnostic(
            severity="error", message="root node cannot carry differentiae",
            span=node.constraints[0].span or node.span or SourceSpan(1, 1, 0, 0)))
    try:
        binding = _binding_for(node)
        if binding is not None:
            schema.set_binding(node.name, binding)
        if node.concept_id is not None:
            schema.set_concept_id(node.name, node.concept_id)
    except (VistaxError, ValueError) as exc:
        diagnostics.append(ParseDiagnostic(
            severity="error", message=str(exc),
            span=node.span or SourceSpan(1, 1, 0, 0)))


def _lower_node(schema, node: NodeDecl, parent: str, diagnostics, spans, fail):
    if node.span is not None:
        spans[node.name] = node.span
    constraints = tuple(DifferentiaConstraint(c.property, c.value)
                        for c in node.constraints)
    try:
        binding = _binding_for(node)
    except ValueError as exc:
        diagnostics.append(ParseDiagnostic(
            severity="error", message=str(exc),
            span=node.span or SourceSpan(1, 1, 0, 0)))
        binding = None
    added = False
    try:
        schema.add_node(node.name, parent, constraints, binding=binding,
                        concept_id=node.concept_id)
        added = True
    except VistaxError as exc:
        span = node.span
        # point at the specific constraint when the failure names its property
        for c in node.constraints:
            if exc.locus == c.property and c.span is not None:
                span = c.span
                break
        fail(exc, span)
    if added:
        for child in node.children:
            _lower_node(schema, child, node.name, diagnostics, spans, fail)


def compile_text(text: str) -> LowerResult:
    """parse + lower in one step; parse diagnostics are folded in."""
    result: ParseResult = parse(text)
    if result.document is None or not result.ok:
        return LowerResult(schema=None, diagnostics=result.diagnostics)
    lowered = lower(result.document)
    lowered.diagnostics = result.diagnostics + lowered.diagnostics
    return lowered

"""Document model for parsed schema sources.

Structural equality deliberately ignores source spans and treats property
declaration order as irrelevant (the canonical serializer sorts them), while
node order and in-node constraint order are preserved as authored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tokens import SourceSpan

Value = str | int


@dataclass
class ConstraintDecl:
    property: str
    value: Value
    span: SourceSpan | None = None

    def structural_key(self):
        return (self.property, self.value)


@dataclass
class PropertyDecl:
    name: str
    kind: str  # "enum" | "integer" | "boolean"
    int_range: tuple[int, int] | None = None
    phrases: tuple[tuple[Value, str], ...] = ()  # declared order; enum variants come from here
    span: SourceSpan | None = None

    def structural_key(self):
        return (self.name, self.kind, self.int_range, self.phrases)


@dataclass
class NodeDecl:
    name: str
    constraints: tuple[ConstraintDecl, ...] = ()
    label: str | None = None
    language: str | None = None
    gloss: str | None = None
    synonyms: tuple[str, ...] = ()
    concept_id: int | None = None
    children: tuple["NodeDecl", ...] = ()
    span: SourceSpan | None = None

    def structural_key(self, default_language: str = "eng"):
        # an omitted label language means "inherit the context language",
        # so equality normalizes it away
        language = None
        if self.label is not None:
            language = self.language or default_language
        return (self.name,
                tuple(c.structural_key() for c in self.constraints),
                self.label, language, self.gloss, self.synonyms,
                self.concept_id,
                tuple(child.structural_key(default_language)
                      for child in self.children))


@dataclass
class SchemaDocument:
    schema_id: str
    context_name: str
    context_purpose: str = ""
    context_language: str = "eng"
    registry_base: int = 1
    properties: tuple[PropertyDecl, ...] = ()
    root: NodeDecl | None = None
    span: SourceSpan | None = None

    def structural_key(self):
        return (self.schema_id, self.context_name, self.context_purpose,
                self.context_language, self.registry_base,
                tuple(sorted((p.structural_key() for p in self.properties),
                             key=lambda k: k[0])),
                self.root.structural_key(self.context_language)
                if self.root else None)

    def __eq__(self, other):
        if not isinstance(other, SchemaDocument):
            return NotImplemented
        return self.structural_key() == other.structural_key()

    def property_names(self) -> set[str]:
        return {p.name for p in self.properties}

    def iter_nodes(self):
        """Yield node declarations in document order."""
        def walk(node: NodeDecl):
            yield node
            for child in node.children:
                yield from walk(child)
        if self.root is not None:
            yield from walk(self.root)

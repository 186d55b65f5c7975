"""Domain model for genus-differentia classification schemas.

A schema is a tree of nodes. Each non-root node is distinguished from its
siblings by one or more differentia constraints (property = value), and the
cumulative constraints along the root path define the node's genus. Schemas
are authored as mutable drafts, validated against the canon suite, and then
frozen into an immutable controlled vocabulary with a content-hash version
stamp and a concept identifier per node.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field, replace

from .errors import (
    DuplicatePropertyError,
    EmptyDomainError,
    FrozenSchemaError,
    SchemaNotFrozenError,
    UnknownNodeError,
    UnknownParentError,
    UnknownPropertyError,
    ValueOutOfDomainError,
)

ENUM = "enum"
INTEGER = "integer"
BOOLEAN = "boolean"

# Booleans are a closed two-variant enum so that "absent" is assertable
# evidence rather than missing evidence.
BOOLEAN_VARIANTS = ("present", "absent")

Value = str | int


@dataclass(frozen=True)
class PropertyDef:
    """A declared visual property with a finite or ranged value domain.

    ``phrase_map`` maps values to the human-readable phrase used in glosses
    and synthesized labels (e.g. 6 -> "six taut strings").
    """

    id: str
    kind: str
    variants: tuple[str, ...] = ()          # enum / boolean kinds
    int_range: tuple[int, int] | None = None  # integer kind, inclusive
    phrase_map: dict[Value, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise EmptyDomainError("property id must be non-empty")
        if self.kind == BOOLEAN:
            object.__setattr__(self, "variants", BOOLEAN_VARIANTS)
        if self.kind in (ENUM, BOOLEAN):
            if not self.variants:
                raise EmptyDomainError(f"property {self.id!r} has no variants", locus=self.id)
            if len(set(self.variants)) != len(self.variants):
                raise EmptyDomainError(f"property {self.id!r} has duplicate variants", locus=self.id)
        elif self.kind == INTEGER:
            if self.int_range is None or self.int_range[0] > self.int_range[1]:
                raise EmptyDomainError(f"property {self.id!r} has an empty integer range", locus=self.id)
        else:
            raise EmptyDomainError(f"property {self.id!r} has unknown kind {self.kind!r}", locus=self.id)
        for v in self.phrase_map:
            if not self.contains(v):
                raise ValueOutOfDomainError(
                    f"phrase for {v!r} outside domain of property {self.id!r}", locus=self.id
                )

    def contains(self, value: Value) -> bool:
        if self.kind in (ENUM, BOOLEAN):
            return isinstance(value, str) and value in self.variants
        lo, hi = self.int_range
        return isinstance(value, int) and not isinstance(value, bool) and lo <= value <= hi

    def domain_values(self) -> list[Value]:
        if self.kind in (ENUM, BOOLEAN):
            return list(self.variants)
        lo, hi = self.int_range
        return list(range(lo, hi + 1))

    def phrase_for(self, value: Value) -> str | None:
        return self.phrase_map.get(value)


@dataclass(frozen=True)
class DifferentiaConstraint:
    """Equality constraint ``property == required_value``."""

    property: str
    required_value: Value

    def satisfied_by(self, assertions: dict[str, Value]) -> bool:
        return assertions.get(self.property) == self.required_value


@dataclass(frozen=True)
class LexicalBinding:
    """A node's lexical entry: lemma, language tag, gloss, synonyms."""

    lemma: str
    language: str = "eng"
    gloss: str = ""
    synonyms: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.lemma:
            raise ValueError("binding lemma must be non-empty")
        if not self.gloss:
            raise ValueError("binding gloss must be non-empty")


@dataclass(frozen=True)
class ContextProfile:
    """The context and purpose a schema is adapted to (one per schema)."""

    name: str
    purpose: str = ""
    language: str = "eng"

    def __post_init__(self):
        if not self.name:
            raise ValueError("context name must be non-empty")


@dataclass
class ClassificationNode:
    node_id: str
    parent: str | None
    differentiae: tuple[DifferentiaConstraint, ...] = ()
    binding: LexicalBinding | None = None
    concept_id: int | None = None


@dataclass(frozen=True)
class ResolutionResult:
    """Outcome of descending the tree under an assertion set.

    ``unsatisfied_frontier`` maps each child of the terminal node to the
    constraints the assertions do not satisfy, in declaration order; the UI
    turns this into the next questions to ask.
    """

    path: tuple[str, ...]
    terminal: str
    status: str  # "leaf" | "partial"
    unsatisfied_frontier: dict[str, tuple[DifferentiaConstraint, ...]]


class Schema:
    """Draft (mutable, single-writer) or frozen (immutable) schema.

    Mutating operations raise FrozenSchema once ``frozen`` is set. The
    version stamp is the SHA-256 of the canonical serialization, so records
    can pin the exact vocabulary they were made against.
    """

    def __init__(self, schema_id: str, context: ContextProfile, root_id: str = "root",
                 registry_base: int = 1):
        self.schema_id = schema_id
        self.context = context
        self.registry_base = registry_base
        self.frozen = False
        self.properties: dict[str, PropertyDef] = {}
        self.nodes: dict[str, ClassificationNode] = {}
        self.root_id = root_id
        self.nodes[root_id] = ClassificationNode(node_id=root_id, parent=None)
        self._children: dict[str, list[str]] = {root_id: []}
        self._stamp: str | None = None

    # --- structure queries ---

    def node(self, node_id: str) -> ClassificationNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"no node {node_id!r}", locus=node_id) from None

    def children_of(self, node_id: str) -> list[str]:
        return list(self._children.get(node_id, ()))

    def path_to_root(self, node_id: str) -> list[str]:
        """Root-first id path; tolerates cycles so the validator can report them."""
        path = []
        seen = set()
        cur: str | None = node_id
        while cur is not None and cur not in seen:
            seen.add(cur)
            path.append(cur)
            cur = self.nodes[cur].parent if cur in self.nodes else None
        path.reverse()
        return path

    def cumulative_constraints(self, node_id: str) -> list[DifferentiaConstraint]:
        """All constraints along the root path, ancestor-first (the node's genus
        plus its own differentiae)."""
        out: list[DifferentiaConstraint] = []
        for nid in self.path_to_root(node_id):
            out.extend(self.nodes[nid].differentiae)
        return out

    def depth(self, node_id: str) -> int:
        return len(self.path_to_root(node_id)) - 1

    # --- authoring ---

    def _require_draft(self):
        if self.frozen:
            raise FrozenSchemaError(f"schema {self.schema_id!r} is frozen")

    def add_property(self, prop: PropertyDef) -> None:
        self._require_draft()
        if prop.id in self.properties:
            raise DuplicatePropertyError(f"property {prop.id!r} already declared", locus=prop.id)
        self.properties[prop.id] = prop

    def check_value(self, property_id: str, value: Value) -> None:
        if property_id not in self.properties:
            raise UnknownPropertyError(f"no property {property_id!r}", locus=property_id)
        if not self.properties[property_id].contains(value):
            raise ValueOutOfDomainError(
                f"value {value!r} outside domain of {property_id!r}", locus=property_id
            )

    def add_node(self, node_id: str, parent: str,
                 differentiae: tuple[DifferentiaConstraint, ...] | list[DifferentiaConstraint] = (),
                 binding: LexicalBinding | None = None,
                 concept_id: int | None = None) -> str:
        """Append a child node. No canon validation happens here; validate()
        is a separate pass. Constraint references must be declared, though."""
        self._require_draft()
        if parent not in self.nodes:
            raise UnknownParentError(f"no parent node {parent!r}", locus=parent)
        if node_id in self.nodes:
            raise UnknownParentError(f"node id {node_id!r} already used", locus=node_id)
        diffs = tuple(differentiae)
        for c in diffs:
            self.check_value(c.property, c.required_value)
        self.nodes[node_id] = ClassificationNode(
            node_id=node_id, parent=parent, differentiae=diffs,
            binding=binding, concept_id=concept_id,
        )
        self._children.setdefault(parent, []).append(node_id)
        self._children.setdefault(node_id, [])
        return node_id

    def set_binding(self, node_id: str, binding: LexicalBinding | None) -> None:
        self._require_draft()
        self.node(node_id).binding = binding

    def set_concept_id(self, node_id: str, concept_id: int | None) -> None:
        self._require_draft()
        self.node(node_id).concept_id = concept_id

    # --- canonical form / identity ---

    def canonical_payload(self) -> dict:
        """Content in deterministic field order with sorted node ids.

        This is the interchange structure persisted to disk and the input of
        the content hash; it must stay bit-exact across releases.
        """
        props = []
        for pid in sorted(self.properties):
            p = self.properties[pid]
            entry = {"id": p.id, "kind": p.kind}
            if p.kind in (ENUM, BOOLEAN):
                entry["variants"] = list(p.variants)
            else:
                entry["range"] = [p.int_range[0], p.int_range[1]]
            entry["phrases"] = [[v, p.phrase_map[v]] for v in sorted(p.phrase_map, key=_value_sort_key)]
            props.append(entry)
        nodes = []
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            binding = None
            if n.binding is not None:
                binding = {
                    "lemma": n.binding.lemma,
                    "language": n.binding.language,
                    "gloss": n.binding.gloss,
                    "synonyms": list(n.binding.synonyms),
                }
            nodes.append({
                "node_id": n.node_id,
                "parent": n.parent,
                "differentiae": [[c.property, c.required_value]
                                 for c in sorted(n.differentiae, key=lambda c: c.property)],
                "binding": binding,
                "concept_id": n.concept_id,
            })
        return {
            "schema_id": self.schema_id,
            "context": {
                "name": self.context.name,
                "purpose": self.context.purpose,
                "language": self.context.language,
            },
            "registry_base": self.registry_base,
            "properties": props,
            "nodes": nodes,
        }

    def canonical_text(self) -> str:
        return json.dumps(self.canonical_payload(), sort_keys=False,
                          separators=(",", ":"), ensure_ascii=True)

    @property
    def version_stamp(self) -> str:
        if self.frozen and self._stamp is not None:
            return self._stamp
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Schema):
            return NotImplemented
        return (self.frozen == other.frozen
                and self.canonical_payload() == other.canonical_payload())

    def __repr__(self) -> str:
        state = "frozen" if self.frozen else "draft"
        return f"<Schema {self.schema_id!r} {state} nodes={len(self.nodes)}>"

    # --- lifecycle helpers used by freeze() ---

    def _clone(self) -> Schema:
        dup = Schema.__new__(Schema)
        dup.schema_id = self.schema_id
        dup.context = self.context
        dup.registry_base = self.registry_base
        dup.frozen = self.frozen
        dup.root_id = self.root_id
        dup.properties = dict(self.properties)
        dup.nodes = {nid: replace_node(n) for nid, n in self.nodes.items()}
        dup._children = {k: list(v) for k, v in self._children.items()}
        dup._stamp = self._stamp
        return dup

    def require_frozen(self):
        if not self.frozen:
            raise SchemaNotFrozenError(f"schema {self.schema_id!r} is not frozen")


def replace_node(n: ClassificationNode) -> ClassificationNode:
    return ClassificationNode(node_id=n.node_id, parent=n.parent,
                              differentiae=n.differentiae, binding=n.binding,
                              concept_id=n.concept_id)


def _value_sort_key(v: Value):
    # Integers before strings, each kind sorted naturally.
    return (0, v, "") if isinstance(v, int) else (1, 0, v)


def schema_from_payload(payload: dict, frozen: bool) -> Schema:
    """Rebuild a schema from its canonical payload (inverse of canonical_payload)."""
    ctx = ContextProfile(**payload["context"])
    nodes = payload["nodes"]
    roots = [n for n in nodes if n["parent"] is None]
    if len(roots) != 1:
        raise ValueError("canonical payload must contain exactly one root")
    schema = Schema(payload["schema_id"], ctx, root_id=roots[0]["node_id"],
                    registry_base=payload["registry_base"])
    for entry in payload["properties"]:
        kwargs = {"id": entry["id"], "kind": entry["kind"],
                  "phrase_map": {v: phrase for v, phrase in entry["phrases"]}}
        if entry["kind"] in (ENUM, BOOLEAN):
            kwargs["variants"] = tuple(entry["variants"])
        else:
            kwargs["int_range"] = tuple(entry["range"])
        schema.add_property(PropertyDef(**kwargs))
    root = roots[0]
    schema.nodes[root["node_id"]].concept_id = root["concept_id"]
    if root["binding"] is not None:
        b = dict(root["binding"])
        b["synonyms"] = tuple(b["synonyms"])
        schema.nodes[root["node_id"]].binding = LexicalBinding(**b)
    pending = [n for n in nodes if n["parent"] is not None]
    # Parents may appear after children in sorted order; insert in passes.
    while pending:
        progressed = False
        rest = []
        for entry in pending:
            if entry["parent"] in schema.nodes:
                binding = None
                if entry["binding"] is not None:
                    b = dict(entry["binding"])
                    b["synonyms"] = tuple(b["synonyms"])
                    binding = LexicalBinding(**b)
                schema.add_node(
                    entry["node_id"], entry["parent"],
                    tuple(DifferentiaConstraint(p, v) for p, v in entry["differentiae"]),
                    binding=binding, concept_id=entry["concept_id"],
                )
                progressed = True
            else:
                rest.append(entry)
        if not progressed:
            raise ValueError("canonical payload contains orphaned nodes")
        pending = rest
    schema.frozen = frozen
    if frozen:
        schema._stamp = schema.version_stamp
    return schema


def deep_freeze_copy(schema: Schema) -> Schema:
    """Deep copy used by freeze() so later draft edits cannot leak into the
    frozen artifact."""
    dup = schema._clone()
    dup.properties = copy.deepcopy(schema.properties)
    return dup

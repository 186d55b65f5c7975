"""Canon validation and the freeze gate.

The canon suite checked here:

  K0  structural integrity: differentia constraints reference declared
      properties and in-domain values, and every referenced value has a
      phrase map entry (needed by gloss checks and synthesized labels).
  K1  single root and acyclicity.
  K2  every non-root node carries at least one differentia.
  K3  path consistency: the cumulative constraints along a root path assign
      at most one value per property.
  K4  sibling mutual exclusivity: every sibling pair shares at least one
      property constrained to different values (this is what makes descent
      provably unambiguous).
  K5  label bijectivity: a (lemma, language) pair binds at most one node,
      and canonical labels (bound or synthesized) are pairwise distinct.
  K6  concept id uniqueness.
  K7  (warning) gloss alignment: a bound node's gloss must contain the
      phrase of every constraint on its root path.
  K8  (warning) lexical gap: node without a binding.

K0 is not one of the eight classical checks; it exists so that K5/K7 never
have to reason about dangling references. Freezing requires zero errors;
warnings never block.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .errors import ValidationFailedError
from .labels import check_gloss_alignment, synthesize_label
from .model import Schema, deep_freeze_copy
from .registry import ConceptRegistry

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    canon: str
    severity: str
    locus: str
    message: str

    def render(self) -> str:
        return f"{self.canon} {self.severity} at {self.locus}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == ERROR]

    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == WARNING]

    def by_canon(self, canon: str) -> list[Finding]:
        return [f for f in self.findings if f.canon == canon]

    @property
    def ok(self) -> bool:
        return not self.errors()

    def render(self) -> str:
        lines = [f.render() for f in self.findings]
        lines.append(f"{len(self.errors())} errors, {len(self.warnings())} warnings")
        return "\n".join(lines)


def _pair_locus(a: str, b: str) -> str:
    return ",".join(sorted((a, b)))


def validate(schema: Schema) -> ValidationReport:
    findings: list[Finding] = []
    nodes = schema.nodes

    # K0: reference integrity and phrase coverage.
    clean_refs = True
    for node in nodes.values():
        for c in node.differentiae:
            prop = schema.properties.get(c.property)
            if prop is None:
                findings.append(Finding("K0", ERROR, node.node_id,
                                        f"constraint references undeclared property {c.property!r}"))
                clean_refs = False
            elif not prop.contains(c.required_value):
                findings.append(Finding("K0", ERROR, node.node_id,
                                        f"value {c.required_value!r} outside domain of {c.property!r}"))
                clean_refs = False
            elif prop.phrase_for(c.required_value) is None:
                findings.append(Finding("K0", ERROR, node.node_id,
                                        f"no phrase for {c.property!r}={c.required_value!r}"))
                clean_refs = False

    # K1: derive structure from parent pointers; exactly one root, no cycles,
    # no orphans, no dangling parents.
    roots = [n.node_id for n in nodes.values() if n.parent is None]
    children = defaultdict(list)
    for n in nodes.values():
        if n.parent is not None:
            if n.parent not in nodes:
                findings.append(Finding("K1", ERROR, n.node_id,
                                        f"parent {n.parent!r} does not exist"))
            else:
                children[n.parent].append(n.node_id)
    if len(roots) != 1:
        findings.append(Finding("K1", ERROR, ",".join(sorted(roots)) or "<none>",
                                f"expected exactly one root, found {len(roots)}"))
    reachable = set()
    stack = list(roots)
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        stack.extend(children.get(nid, ()))
    unreachable = sorted(set(nodes) - reachable)
    if unreachable:
        findings.append(Finding("K1", ERROR, ",".join(unreachable),
                                "nodes unreachable from the root (cycle or orphan)"))

    # K2: non-root nodes need at least one differentia.
    for n in nodes.values():
        if n.parent is not None and not n.differentiae:
            findings.append(Finding("K2", ERROR, n.node_id,
                                    "non-root node has no differentiae"))

    # K3: at most one value per property along any root path.
    for nid in sorted(reachable):
        assigned: dict[str, object] = {}
        for c in schema.cumulative_constraints(nid):
            if c.property in assigned and assigned[c.property] != c.required_value:
                findings.append(Finding("K3", ERROR, nid,
                                        f"path assigns both {assigned[c.property]!r} and "
                                        f"{c.required_value!r} to {c.property!r}"))
                break
            assigned[c.property] = c.required_value

    # K4: each sibling pair must share a property constrained to different values.
    for parent in sorted(children):
        sibs = children[parent]
        for i in range(len(sibs)):
            for j in range(i + 1, len(sibs)):
                a, b = nodes[sibs[i]], nodes[sibs[j]]
                a_vals = {c.property: c.required_value for c in a.differentiae}
                b_vals = {c.property: c.required_value for c in b.differentiae}
                shared = set(a_vals) & set(b_vals)
                if not any(a_vals[p] != b_vals[p] for p in shared):
                    findings.append(Finding("K4", ERROR, _pair_locus(a.node_id, b.node_id),
                                            "siblings share no property constrained to "
                                            "different values"))

    # K5: bound (lemma, language) pairs are unique; canonical labels (bound or
    # synthesized) are pairwise distinct per language.
    bound: dict[tuple[str, str], list[str]] = defaultdict(list)
    for n in nodes.values():
        if n.binding is not None:
            bound[(n.binding.lemma, n.binding.language)].append(n.node_id)
    for (lemma, language), ids in sorted(bound.items()):
        if len(ids) > 1:
            findings.append(Finding("K5", ERROR, ",".join(sorted(ids)),
                                    f"label {lemma!r} ({language}) bound to {len(ids)} nodes"))
    if clean_refs:
        # Two bound nodes colliding is already covered above, so only clashes
        # involving a synthesized label are new findings here.
        canon_labels: dict[tuple[str, str], list[str]] = defaultdict(list)
        for n in nodes.values():
            language = n.binding.language if n.binding is not None else schema.context.language
            canon_labels[(synthesize_label(schema, n.node_id), language)].append(n.node_id)
        for (label, language), ids in sorted(canon_labels.items()):
            if len(ids) > 1 and any(nodes[i].binding is None for i in ids):
                findings.append(Finding("K5", ERROR, ",".join(sorted(ids)),
                                        f"canonical label {label!r} ({language}) is not unique"))

    # K6: explicit concept ids are unique.
    ids_used: dict[int, list[str]] = defaultdict(list)
    for n in nodes.values():
        if n.concept_id is not None:
            ids_used[n.concept_id].append(n.node_id)
    for cid, holders in sorted(ids_used.items()):
        if len(holders) > 1:
            findings.append(Finding("K6", ERROR, ",".join(sorted(holders)),
                                    f"concept id {cid} assigned to {len(holders)} nodes"))

    # K7 (warning): glosses must linguistically encode the root-path phrases.
    for nid in sorted(nodes):
        n = nodes[nid]
        if n.binding is None:
            continue
        report = check_gloss_alignment(schema, nid)
        for miss in report.misses:
            shown = miss.phrase if miss.phrase is not None else f"<no phrase for {miss.value!r}>"
            findings.append(Finding("K7", WARNING, nid,
                                    f"gloss does not contain {shown!r} "
                                    f"({miss.property}={miss.value!r})"))

    # K8 (warning): lexical gaps are legal but worth surfacing.
    for nid in sorted(nodes):
        if nodes[nid].binding is None:
            findings.append(Finding("K8", WARNING, nid,
                                    "no lexical binding; label will be synthesized"))

    return ValidationReport(tuple(findings))


def freeze(schema: Schema) -> Schema:
    """Validate, allocate missing concept ids, and return an immutable copy
    with its content-hash version stamp fixed. Freezing a frozen schema is a
    no-op returning the same object (same stamp)."""
    if schema.frozen:
        return schema
    report = validate(schema)
    if not report.ok:
        raise ValidationFailedError(report)
    frozen = deep_freeze_copy(schema)
    registry = ConceptRegistry(frozen.registry_base)
    ordered = sorted(frozen.nodes)
    for nid in ordered:
        cid = frozen.nodes[nid].concept_id
        if cid is not None:
            registry.assign(nid, cid)
    for nid in ordered:
        if frozen.nodes[nid].concept_id is None:
            frozen.nodes[nid].concept_id = registry.allocate(nid)
    frozen.frozen = True
    frozen._stamp = frozen.version_stamp
    return frozen

"""Inter-annotator agreement over annotation record sets.

Regions from different annotators are paired into items by image and
bounding-box overlap (IoU >= 0.5 by default), and agreement is computed
over concept ids, the language-independent category alphabet. Cohen's
kappa is (p_o - p_e) / (1 - p_e) with p_e from the two annotators' marginal
category frequencies; Fleiss' kappa generalizes to n raters per item. Both
return a flagged-undefined result instead of dividing by zero when expected
agreement is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .engine import AnnotationRecord, BBox
from .errors import (
    MismatchedItemUniverseError,
    MixedSchemaVersionsError,
    NoComparableItemsError,
    NoEligibleItemsError,
    NoSharedItemsError,
)
from .model import Schema

DEFAULT_IOU = 0.5


def iou(a: BBox, b: BBox) -> float:
    """Intersection-over-union of two pixel rectangles."""
    ix = max(0, min(a.x + a.width, b.x + b.width) - max(a.x, b.x))
    iy = max(0, min(a.y + a.height, b.y + b.height) - max(a.y, b.y))
    inter = ix * iy
    union = a.width * a.height + b.width * b.height - inter
    return inter / union if union else 0.0


@dataclass
class MatrixItem:
    key: tuple
    image: str
    bbox: BBox | None
    cells: dict[str, object] = field(default_factory=dict)  # annotator -> category
    nodes: dict[str, str] = field(default_factory=dict)     # annotator -> node id

    def present(self) -> list[str]:
        return sorted(self.cells)


@dataclass
class LabeledItemMatrix:
    items: list[MatrixItem]
    annotators: tuple[str, ...]
    schema_stamp: str | None = None

    def categories(self) -> set:
        return {c for item in self.items for c in item.cells.values()}

    def item_keys(self) -> tuple:
        return tuple(sorted(item.key for item in self.items))


def build_matrix(record_sets: list[list[AnnotationRecord]],
                 iou_threshold: float = DEFAULT_IOU) -> LabeledItemMatrix:
    """Cluster records into items: a record joins the earliest cluster on the
    same image whose representative bbox overlaps at IoU >= threshold and
    which has no cell for that annotator yet; otherwise it opens a new item."""
    records = [r for rs in record_sets for r in rs]
    stamps = {r.schema_stamp for r in records}
    if len(stamps) > 1:
        raise MixedSchemaVersionsError(
            f"records span {len(stamps)} schema versions: {sorted(stamps)}")
    items: list[MatrixItem] = []
    by_image: dict[str, list[int]] = {}
    counter: dict[str, int] = {}
    for record in records:
        placed = None
        for index in by_image.get(record.image, ()):
            item = items[index]
            if record.annotator_id in item.cells:
                continue
            if iou(item.bbox, record.bbox) >= iou_threshold:
                placed = item
                break
        if placed is None:
            ordinal = counter.get(record.image, 0)
            counter[record.image] = ordinal + 1
            placed = MatrixItem(key=(record.image, ordinal),
                                image=record.image, bbox=record.bbox)
            by_image.setdefault(record.image, []).append(len(items))
            items.append(placed)
        placed.cells[record.annotator_id] = record.concept_id
        placed.nodes[record.annotator_id] = record.node_id
    annotators = tuple(sorted({r.annotator_id for r in records}))
    return LabeledItemMatrix(items=items, annotators=annotators,
                             schema_stamp=next(iter(stamps)) if stamps else None)


def matrix_from_assignments(assignments: dict[str, dict[object, object]]) -> LabeledItemMatrix:
    """Matrix over pre-paired items: annotator -> {item key -> category}.
    Used for baselines whose labels never touch a schema."""
    keys = sorted({k for cells in assignments.values() for k in cells})
    items = []
    for key in keys:
        item = MatrixItem(key=key, image=str(key), bbox=None)
        for annotator, cells in assignments.items():
            if key in cells:
                item.cells[annotator] = cells[key]
        items.append(item)
    return LabeledItemMatrix(items=items, annotators=tuple(sorted(assignments)))


# --- metrics ---

@dataclass(frozen=True)
class KappaResult:
    value: float | None
    undefined: bool
    observed: float
    expected: float
    items: int

    def as_dict(self) -> dict:
        return {"value": self.value, "undefined": self.undefined,
                "observed": self.observed, "expected": self.expected,
                "items": self.items}


def percent_agreement(matrix: LabeledItemMatrix) -> float:
    """Mean, over items with >= 2 present cells, of the fraction of agreeing
    annotator pairs."""
    fractions = []
    for item in matrix.items:
        present = item.present()
        if len(present) < 2:
            continue
        pairs = list(combinations(present, 2))
        equal = sum(1 for a, b in pairs if item.cells[a] == item.cells[b])
        fractions.append(equal / len(pairs))
    if not fractions:
        raise NoComparableItemsError("no item has two or more present cells")
    return sum(fractions) / len(fractions)


def cohen_kappa(matrix: LabeledItemMatrix, annotator_a: str, annotator_b: str) -> KappaResult:
    shared = [item for item in matrix.items
              if annotator_a in item.cells and annotator_b in item.cells]
    if not shared:
        raise NoSharedItemsError(
            f"annotators {annotator_a!r} and {annotator_b!r} share no items")
    n = len(shared)
    p_o = sum(1 for item in shared
              if item.cells[annotator_a] == item.cells[annotator_b]) / n
    categories = {item.cells[annotator_a] for item in shared} \
        | {item.cells[annotator_b] for item in shared}
    p_e = 0.0
    for category in categories:
        fa = sum(1 for item in shared if item.cells[annotator_a] == category) / n
        fb = sum(1 for item in shared if item.cells[annotator_b] == category) / n
        p_e += fa * fb
    if p_e >= 1.0:
        return KappaResult(value=None, undefined=True, observed=p_o,
                           expected=p_e, items=n)
    return KappaResult(value=(p_o - p_e) / (1.0 - p_e), undefined=False,
                       observed=p_o, expected=p_e, items=n)


def fleiss_kappa(matrix: LabeledItemMatrix) -> KappaResult:
    """Standard Fleiss computation over items sharing the maximal rating
    count n >= 2; items with fewer present cells are excluded (their number
    is reported via ``items`` versus the matrix size)."""
    counts = [len(item.cells) for item in matrix.items]
    n = max(counts, default=0)
    if n < 2:
        raise NoEligibleItemsError("no item has two or more present cells")
    included = [item for item in matrix.items if len(item.cells) == n]
    categories = sorted({c for item in included for c in item.cells.values()},
                        key=repr)
    index = {c: k for k, c in enumerate(categories)}
    table = np.zeros((len(included), len(categories)), dtype=np.int64)
    for i, item in enumerate(included):
        for category in item.cells.values():
            table[i, index[category]] += 1
    per_item = (np.sum(table * table, axis=1) - n) / (n * (n - 1))
    p_bar = float(np.mean(per_item))
    proportions = np.sum(table, axis=0) / float(len(included) * n)
    p_e = float(np.dot(proportions, proportions))
    if p_e >= 1.0:
        return KappaResult(value=None, undefined=True, observed=p_bar,
                           expected=p_e, items=len(included))
    return KappaResult(value=(p_bar - p_e) / (1.0 - p_e), undefined=False,
                       observed=p_bar, expected=p_e, items=len(included))


def hierarchical_agreement(matrix: LabeledItemMatrix, schema: Schema) -> float:
    """Partial-credit agreement: a pair scores depth(deepest common ancestor)
    divided by the deeper of the two nodes (1.0 for identical nodes)."""
    scores = []
    for item in matrix.items:
        present = item.present()
        if len(present) < 2:
            continue
        for a, b in combinations(present, 2):
            scores.append(_pair_credit(schema, item.nodes[a], item.nodes[b]))
    if not scores:
        raise NoComparableItemsError("no item has two or more present cells")
    return sum(scores) / len(scores)


def _pair_credit(schema: Schema, node_a: str, node_b: str) -> float:
    if node_a == node_b:
        return 1.0
    path_a = schema.path_to_root(node_a)
    path_b = schema.path_to_root(node_b)
    common = 0
    for x, y in zip(path_a, path_b):
        if x != y:
            break
        common += 1
    dca_depth = common - 1
    deepest = max(len(path_a), len(path_b)) - 1
    return dca_depth / deepest if deepest else 1.0


# --- reports ---

@dataclass
class AgreementReport:
    item_count: int
    annotator_count: int
    item_keys: tuple
    percent: float | None
    cohen: dict[tuple[str, str], KappaResult]
    fleiss: KappaResult | None
    hierarchical: float | None = None

    def mean_pairwise_kappa(self) -> float | None:
        values = [r.value for r in self.cohen.values() if r.value is not None]
        return sum(values) / len(values) if values else None

    def as_dict(self) -> dict:
        return {
            "item_count": self.item_count,
            "annotator_count": self.annotator_count,
            "percent_agreement": self.percent,
            "cohen_kappa": {f"{a}|{b}": r.as_dict()
                            for (a, b), r in sorted(self.cohen.items())},
            "mean_pairwise_kappa": self.mean_pairwise_kappa(),
            "fleiss_kappa": self.fleiss.as_dict() if self.fleiss else None,
            "hierarchical_agreement": self.hierarchical,
        }

    def render(self) -> str:
        lines = [f"items: {self.item_count}  annotators: {self.annotator_count}"]
        if self.percent is not None:
            lines.append(f"percent agreement   {self.percent:.4f}")
        for (a, b), r in sorted(self.cohen.items()):
            shown = "undefined" if r.undefined else f"{r.value:.4f}"
            lines.append(f"cohen kappa {a}/{b}   {shown}")
        if self.fleiss is not None:
            shown = "undefined" if self.fleiss.undefined else f"{self.fleiss.value:.4f}"
            lines.append(f"fleiss kappa        {shown}")
        if self.hierarchical is not None:
            lines.append(f"hierarchical        {self.hierarchical:.4f}")
        return "\n".join(lines)


def compute_report(matrix: LabeledItemMatrix, schema: Schema | None = None,
                   hierarchical: bool = False) -> AgreementReport:
    try:
        percent = percent_agreement(matrix)
    except NoComparableItemsError:
        percent = None
    cohen = {}
    for a, b in combinations(matrix.annotators, 2):
        try:
            cohen[(a, b)] = cohen_kappa(matrix, a, b)
        except NoSharedItemsError:
            continue
    try:
        fleiss = fleiss_kappa(matrix)
    except NoEligibleItemsError:
        fleiss = None
    hier = None
    if hierarchical and schema is not None:
        try:
            hier = hierarchical_agreement(matrix, schema)
        except NoComparableItemsError:
            hier = None
    return AgreementReport(
        item_count=len(matrix.items),
        annotator_count=len(matrix.annotators),
        item_keys=matrix.item_keys(),
        percent=percent, cohen=cohen, fleiss=fleiss, hierarchical=hier,
    )


@dataclass
class DeltaReport:
    """Per-metric deltas, second condition minus first."""

    metrics: dict[str, dict]

    def as_dict(self) -> dict:
        return dict(self.metrics)

    def render(self) -> str:
        lines = []
        for name, d in self.metrics.items():
            rel = "n/a" if d["relative"] is None else f"{d['relative']:+.1%}"
            lines.append(f"{name}: {d['baseline']:.4f} -> {d['treatment']:.4f}  "
                         f"delta {d['absolute']:+.4f} ({rel})")
        return "\n".join(lines)


def compare_conditions(report_baseline: AgreementReport,
                       report_treatment: AgreementReport) -> DeltaReport:
    if report_baseline.item_keys != report_treatment.item_keys:
        raise MismatchedItemUniverseError(
            "reports cover different item universes "
            f"({report_baseline.item_count} vs {report_treatment.item_count} items)")
    metrics: dict[str, dict] = {}

    def add(name, base, treat):
        if base is None or treat is None:
            return
        metrics[name] = {
            "baseline": base,
            "treatment": treat,
            "absolute": treat - base,
            "relative": (treat - base) / abs(base) if base != 0 else None,
        }

    add("percent_agreement", report_baseline.percent, report_treatment.percent)
    add("mean_pairwise_kappa", report_baseline.mean_pairwise_kappa(),
        report_treatment.mean_pairwise_kappa())
    if report_baseline.fleiss is not None and report_treatment.fleiss is not None:
        add("fleiss_kappa", report_baseline.fleiss.value, report_treatment.fleiss.value)
    return DeltaReport(metrics=metrics)

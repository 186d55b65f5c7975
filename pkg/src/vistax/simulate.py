"""Synthetic-annotator experiments: property-grounded vs ad-hoc labeling.

The property-grounded condition perturbs each annotator's *perception* of
each true property value with probability epsilon (resampling uniformly
from the rest of the domain) and then resolves deterministically; the
ad-hoc condition draws a label uniformly from the set of labels deemed
applicable to the item. Every random draw derives from
(seed, annotator, item id), so runs are reproducible bit-for-bit and
parallelizable per item.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from .agreement import (
    AgreementReport,
    DeltaReport,
    LabeledItemMatrix,
    build_matrix,
    compare_conditions,
    compute_report,
    matrix_from_assignments,
)
from .engine import AnnotationRecord, BBox
from .errors import EmptyPoolError, MismatchedItemUniverseError
from .labels import canonical_label
from .model import Schema, Value
from .resolve import resolve

SIM_TIMESTAMP = "1970-01-01T00:00:00Z"
SIM_BBOX = BBox(0, 0, 100, 100)

ADHOC = "adhoc"
GROUNDED = "grounded"


@dataclass(frozen=True)
class GroundTruthItem:
    item_id: str
    truth: dict[str, Value]


@dataclass(frozen=True)
class NoiseModel:
    """Per-property corruption: with probability epsilon the observed value
    is resampled uniformly from the domain excluding the true value."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")

    def observe(self, rng: random.Random, schema: Schema,
                property_id: str, true_value: Value) -> Value:
        if rng.random() >= self.epsilon:
            return true_value
        alternatives = [v for v in schema.properties[property_id].domain_values()
                        if v != true_value]
        if not alternatives:
            return true_value
        return rng.choice(alternatives)


@dataclass(frozen=True)
class ExperimentConfig:
    items: int
    annotators: int
    epsilon: float
    seed: int
    condition: str
    schema_ref: str = ""
    pool_size: int = 2

    def __post_init__(self):
        if self.items < 1:
            raise ValueError("need at least one item")
        if self.annotators < 2:
            raise ValueError("need at least two annotators")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.condition not in (ADHOC, GROUNDED):
            raise ValueError(f"unknown condition {self.condition!r}")

    def as_dict(self) -> dict:
        return {"items": self.items, "annotators": self.annotators,
                "epsilon": self.epsilon, "seed": self.seed,
                "condition": self.condition, "schema_ref": self.schema_ref,
                "pool_size": self.pool_size}


def _rng(seed: int, *parts: object) -> random.Random:
    """Process-independent RNG seeded from a stable digest of its coordinates."""
    digest = hashlib.sha256("|".join([str(seed), *map(str, parts)]).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def make_ground_truth(schema: Schema, count: int, seed: int) -> list[GroundTruthItem]:
    """Uniformly sampled leaves; an item's truth is the cumulative constraint
    set of its leaf's root path, which resolves back to that leaf exactly."""
    schema.require_frozen()
    leaves = sorted(nid for nid in schema.nodes if not schema.children_of(nid))
    items = []
    for i in range(count):
        rng = _rng(seed, "truth", i)
        leaf = rng.choice(leaves)
        truth = {c.property: c.required_value
                 for c in schema.cumulative_constraints(leaf)}
        items.append(GroundTruthItem(item_id=f"item{i:05d}", truth=truth))
    return items


def _annotator_ids(count: int) -> list[str]:
    return [f"sim-a{i}" for i in range(count)]


def simulate_grounded(schema: Schema, config: ExperimentConfig,
                    truth: list[GroundTruthItem]) -> dict[str, list[AnnotationRecord]]:
    """Each simulated annotator independently corrupts each true property
    with probability epsilon, resolves, and finalizes (accepting partial
    resolutions). Produces exactly the records an interactive session would."""
    schema.require_frozen()
    noise = NoiseModel(epsilon=config.epsilon)
    stamp = schema.version_stamp
    out: dict[str, list[AnnotationRecord]] = {}
    for annotator in _annotator_ids(config.annotators):
        records = []
        for item in truth:
            rng = _rng(config.seed, annotator, item.item_id)
            observed = {pid: noise.observe(rng, schema, pid, value)
                        for pid, value in item.truth.items()}
            result = resolve(schema, observed)
            node = schema.node(result.terminal)
            records.append(AnnotationRecord(
                record_id=f"{annotator}:{item.item_id}",
                image=item.item_id, bbox=SIM_BBOX, assertions=observed,
                node_id=result.terminal, status=result.status,
                label=canonical_label(schema, result.terminal),
                concept_id=node.concept_id, schema_stamp=stamp,
                annotator_id=annotator, timestamp=SIM_TIMESTAMP,
            ))
        out[annotator] = records
    return out


AdHocLabelPool = dict[str, tuple[str, ...]]


def make_adhoc_pool(schema: Schema, truth: list[GroundTruthItem],
                    pool_size: int = 2) -> AdHocLabelPool:
    """Applicable labels for an item: its true node's label plus ancestor
    labels, nearest first, capped at pool_size. Mirrors how an unprincipled
    label set offers several defensible choices per image."""
    pool: AdHocLabelPool = {}
    for item in truth:
        result = resolve(schema, item.truth)
        labels = [canonical_label(schema, nid) for nid in reversed(result.path)]
        pool[item.item_id] = tuple(labels[:max(1, pool_size)])
    return pool


def simulate_adhoc(config: ExperimentConfig,
                   pool: AdHocLabelPool) -> dict[str, dict[str, str]]:
    """Each annotator picks uniformly from the item's applicable-label set."""
    if not pool or any(len(labels) < 1 for labels in pool.values()):
        raise EmptyPoolError("every item needs at least one applicable label")
    out: dict[str, dict[str, str]] = {}
    for annotator in _annotator_ids(config.annotators):
        picks = {}
        for item_id in sorted(pool):
            rng = _rng(config.seed, annotator, item_id)
            picks[item_id] = rng.choice(list(pool[item_id]))
        out[annotator] = picks
    return out


@dataclass
class ExperimentBundle:
    config_adhoc: ExperimentConfig
    config_grounded: ExperimentConfig
    report_adhoc: AgreementReport
    report_grounded: AgreementReport
    delta: DeltaReport

    def as_dict(self) -> dict:
        return {
            "config": {"adhoc": self.config_adhoc.as_dict(),
                       "grounded": self.config_grounded.as_dict()},
            "adhoc": self.report_adhoc.as_dict(),
            "grounded": self.report_grounded.as_dict(),
            "delta": self.delta.as_dict(),
        }

    def as_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def render(self) -> str:
        lines = ["== ad-hoc condition ==", self.report_adhoc.render(),
                 "== property-grounded condition ==", self.report_grounded.render(),
                 "== delta (property-grounded minus ad-hoc) ==",
                 self.delta.render()]
        return "\n".join(lines)


def grounded_matrix(records: dict[str, list[AnnotationRecord]]) -> LabeledItemMatrix:
    return build_matrix([records[a] for a in sorted(records)])


def adhoc_matrix(assignments: dict[str, dict[str, str]]) -> LabeledItemMatrix:
    # key as (item id, 0) so both conditions share one item universe
    keyed = {annotator: {(item_id, 0): label for item_id, label in picks.items()}
             for annotator, picks in assignments.items()}
    return matrix_from_assignments(keyed)


def run_experiment(schema: Schema, config_adhoc: ExperimentConfig,
                   config_grounded: ExperimentConfig,
                   truth: list[GroundTruthItem] | None = None,
                   pool: AdHocLabelPool | None = None) -> ExperimentBundle:
    """End to end: simulate both conditions over one item universe, build
    matrices, compute reports, compare."""
    if (config_adhoc.items, config_adhoc.seed) != (config_grounded.items, config_grounded.seed):
        raise MismatchedItemUniverseError(
            "conditions must share item count and seed")
    if truth is None:
        truth = make_ground_truth(schema, config_grounded.items, config_grounded.seed)
    if pool is None:
        pool = make_adhoc_pool(schema, truth, config_adhoc.pool_size)
    records = simulate_grounded(schema, config_grounded, truth)
    picks = simulate_adhoc(config_adhoc, pool)
    report_grounded = compute_report(grounded_matrix(records))
    report_adhoc = compute_report(adhoc_matrix(picks))
    delta = compare_conditions(report_adhoc, report_grounded)
    return ExperimentBundle(config_adhoc=config_adhoc, config_grounded=config_grounded,
                            report_adhoc=report_adhoc, report_grounded=report_grounded,
                            delta=delta)

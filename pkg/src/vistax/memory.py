"""Cumulative concept memory.

Repeated encounters with similar property evidence accrete onto one entry,
so an object concept sharpens over partial views instead of fragmenting
into one entry per sighting. Similarity between an observation and an
entry is Jaccard overlap over (property, value) pairs: shared identical
pairs divided by the union of asserted pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyAssertionsError
from .model import Value

DEFAULT_THETA = 0.8  # no principled calibration exists; tune per corpus


@dataclass
class ConceptEntry:
    sketch: list[dict[str, Value]] = field(default_factory=list)
    pairs: set[tuple[str, Value]] = field(default_factory=set)
    count: int = 0
    node_id: str | None = None


class ConceptMemory:
    def __init__(self, theta: float = DEFAULT_THETA):
        if not 0.0 <= theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        self.theta = theta
        self.entries: list[ConceptEntry] = []

    @staticmethod
    def similarity(observed: set[tuple[str, Value]],
                   entry: set[tuple[str, Value]]) -> float:
        union = observed | entry
        if not union:
            return 0.0
        return len(observed & entry) / len(union)

    def observe(self, assertions: dict[str, Value],
                node_id: str | None = None) -> tuple[int, bool]:
        """Fold an observation into the best-matching entry (similarity >=
        theta, ties to the lowest index) or start a new one. Returns
        (entry index, created flag)."""
        if not assertions:
            raise EmptyAssertionsError("cannot observe an empty assertion set")
        observed = set(assertions.items())
        best_index = -1
        best_score = -1.0
        for index, entry in enumerate(self.entries):
            score = self.similarity(observed, entry.pairs)
            if score > best_score:
                best_index, best_score = index, score
        if best_index >= 0 and best_score >= self.theta:
            entry = self.entries[best_index]
            created = False
            index = best_index
        else:
            entry = ConceptEntry()
            self.entries.append(entry)
            created = True
            index = len(self.entries) - 1
        entry.sketch.append(dict(assertions))
        entry.pairs |= observed
        entry.count += 1
        if node_id is not None:
            entry.node_id = node_id
        return index, created

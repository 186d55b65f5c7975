"""Concept identifier registry.

Identifiers are positive integers, unique within a registry namespace,
allocated monotonically from a base and never reused. Explicit assignments
(e.g. a conventional id carried over from an external vocabulary) are
respected and simply mark the value as used.
"""

from __future__ import annotations

from .errors import AlreadyAssignedError


class ConceptRegistry:
    def __init__(self, base: int = 1):
        if base < 1:
            raise ValueError("registry base must be a positive integer")
        self.base = base
        self._by_node: dict[str, int] = {}
        self._used: set[int] = set()
        self._next = base

    def assign(self, node_id: str, value: int) -> int:
        """Record an explicit id for a node."""
        if node_id in self._by_node:
            raise AlreadyAssignedError(f"node {node_id!r} already has id "
                                       f"{self._by_node[node_id]}", locus=node_id)
        if value in self._used:
            raise AlreadyAssignedError(f"id {value} already in use", locus=node_id)
        self._by_node[node_id] = value
        self._used.add(value)
        return value

    def allocate(self, node_id: str) -> int:
        """Smallest unused integer >= base; monotone, never reused."""
        if node_id in self._by_node:
            raise AlreadyAssignedError(f"node {node_id!r} already has id "
                                       f"{self._by_node[node_id]}", locus=node_id)
        value = self._next
        while value in self._used:
            value += 1
        self._next = value + 1
        return self.assign(node_id, value)

    def id_for(self, node_id: str) -> int | None:
        return self._by_node.get(node_id)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._by_node

"""Deterministic property-to-node resolution.

Descent starts at the root; at each step the walk moves to the unique child
whose differentiae are all satisfied by the asserted values, and stops once
no child qualifies. Sibling mutual exclusivity (canon K4) guarantees the
qualifying child is unique, so resolution is a pure function of
(schema version stamp, assertion set).
"""

from __future__ import annotations

from .model import ResolutionResult, Schema, Value


def check_assertions(schema: Schema, assertions: dict[str, Value]) -> None:
    for pid, value in assertions.items():
        schema.check_value(pid, value)


def resolve(schema: Schema, assertions: dict[str, Value]) -> ResolutionResult:
    schema.require_frozen()
    check_assertions(schema, assertions)
    path = [schema.root_id]
    current = schema.root_id
    while True:
        qualifying = [
            child for child in schema.children_of(current)
            if all(c.satisfied_by(assertions) for c in schema.nodes[child].differentiae)
        ]
        if not qualifying:
            break
        if len(qualifying) > 1:
            # Unreachable on a frozen schema: K4 forbids two siblings being
            # satisfiable by one assertion set.
            raise RuntimeError(f"ambiguous descent at {current!r}: {qualifying}")
        current = qualifying[0]
        path.append(current)
    children = schema.children_of(current)
    frontier = {
        child: tuple(c for c in schema.nodes[child].differentiae
                     if not c.satisfied_by(assertions))
        for child in children
    }
    return ResolutionResult(
        path=tuple(path),
        terminal=current,
        status="leaf" if not children else "partial",
        unsatisfied_frontier=frontier,
    )

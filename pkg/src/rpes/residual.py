"""Removal of executed behaviour and the residual-based transition system.

Removing a step deletes the irreversibly executed events (together with
their reversible causes) and everything in conflict with them, and demotes
reversible events whose reverse causes were deleted or whose preventers
were executed irreversibly.  All relations of a residual are restrictions
of the root structure's relations, so a residual is identified by the
triple (events, reversible events, initial configuration).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from types import MappingProxyType
from typing import Optional, Sequence

from .kernel import Pes, PreconditionError, Rpes, RpesError
from .stepsem import (
    Lts,
    NotEnabledError,
    Step,
    check_enabled,
    enumerate_steps,
    format_config,
    sorted_steps,
    step_label,
    validate_trace,
)


class ConsistencyError(RpesError):
    """An internal invariant failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class ResidualKey:
    events: frozenset[str]
    reversible: frozenset[str]
    initial: frozenset[str]

    @classmethod
    def of(cls, r: Rpes) -> "ResidualKey":
        return cls(r.events, r.reversible, r.initial)

    def __str__(self) -> str:
        return (
            f"R_E{format_config(self.events)}"
            f"_F{format_config(self.reversible)}"
            f"_C{format_config(self.initial)}"
        )


@dataclass(frozen=True)
class RemovalRecord:
    """Intermediate sets computed while removing one step."""

    tilde_a: frozenset[str]
    conflict_of_tilde: frozenset[str]
    hat_a: frozenset[str]
    hat_hat_a: frozenset[str]


def removal_sets(r: Rpes, s: Step) -> RemovalRecord:
    A = s.forward
    irreversible = A - r.reversible
    tilde = set(irreversible)
    for a in irreversible:
        tilde |= r.causes(a) & r.reversible
    tilde = frozenset(tilde)
    conflicting = frozenset(e for t in tilde for e in r.conflicts(t))
    hat = frozenset(u for u in r.reversible if r.reverse_causes(u) & conflicting)
    hat_hat = frozenset(u for u in r.reversible if r.preventers(u) & tilde)
    return RemovalRecord(tilde, conflicting, hat, hat_hat)


def _remove(r: Rpes, s: Step) -> tuple[Rpes, RemovalRecord]:
    rec = removal_sets(r, s)
    events = r.events - (rec.tilde_a | rec.conflict_of_tilde)
    reversible = (r.reversible & events) - (rec.hat_a | rec.hat_hat_a)
    initial = ((r.initial - s.reverse) | s.forward) & events
    return r.restrict(events, reversible, initial), rec


def remove_step(r: Rpes, s: Step) -> Rpes:
    """Residual of ``r`` after the one-step trace ``s``."""
    failure = check_enabled(r, r.initial, s)
    if failure is not None:
        raise NotEnabledError(*failure, index=1)
    return _remove(r, s)[0]


def remove_trace(r: Rpes, t: Sequence[Step]) -> Rpes:
    """Residual of ``r`` after the trace ``t`` (a left fold of single removals).

    ``t`` must be a trace of ``r``; its steps need not be traces of the
    intermediate residuals, which matters for structures that are not
    cause-respecting.
    """
    validate_trace(r, t)
    residual = r
    for s in t:
        residual = _remove(residual, s)[0]
    return residual


def remove_trace_records(r: Rpes, t: Sequence[Step]) -> tuple[list[Rpes], list[RemovalRecord]]:
    """The whole residual chain ``r = r0, r1, ..., rn`` and its removal records."""
    validate_trace(r, t)
    chain = [r]
    records = []
    for s in t:
        nxt, rec = _remove(chain[-1], s)
        chain.append(nxt)
        records.append(rec)
    return chain, records


def check_restriction(root: Rpes, residual: Rpes) -> None:
    """Raise :class:`ConsistencyError` unless ``residual`` is a restriction of ``root``."""
    if not (residual.events <= root.events and residual.reversible <= residual.events):
        raise ConsistencyError("residual events are not a subset of the root's")
    expected = root.restrict(residual.events, residual.reversible, residual.initial)
    if expected != residual:
        raise ConsistencyError("residual relations differ from the root's restriction")


def residual_key(root: Rpes, residual: Rpes) -> ResidualKey:
    check_restriction(root, residual)
    return ResidualKey.of(residual)


def residual_of(root: Rpes, key: ResidualKey) -> Rpes:
    return root.restrict(key.events, key.reversible, key.initial)


def build_te(r: Rpes, max_step_size: Optional[int] = None) -> Lts:
    """Transition system whose states are residuals, identified by key.

    A residual moves by every nonempty step enabled at its own initial
    configuration.
    """
    start = ResidualKey.of(r)
    seen = {start}
    queue = deque([start])
    transitions = set()
    while queue:
        key = queue.popleft()
        res = residual_of(r, key)
        for s in sorted_steps(enumerate_steps(res, res.initial, max_step_size)):
            nxt = ResidualKey.of(_remove(res, s)[0])
            transitions.add((key, step_label(res, s), nxt))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return Lts(frozenset(seen), start, frozenset(transitions), "residual")


def build_te_unfolded(r: Rpes, max_step_size: Optional[int] = None) -> Lts:
    """Reference construction keeping whole residual structures as states."""
    seen = {r}
    queue = deque([r])
    transitions = set()
    while queue:
        res = queue.popleft()
        for s in sorted_steps(enumerate_steps(res, res.initial, max_step_size)):
            nxt = _remove(res, s)[0]
            transitions.add((res, step_label(res, s), nxt))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return Lts(frozenset(seen), r, frozenset(transitions), "residual-structure")


def remove_configuration(p: Pes, c: frozenset[str]) -> Pes:
    """Residual of a PES after a configuration: drop ``c`` and everything conflicting with it."""
    c = frozenset(c)
    if not c <= p.events:
        raise PreconditionError(f"unknown events {format_config(c - p.events)}")
    if not p.conflict_free(c):
        raise PreconditionError(f"{format_config(c)} is not conflict-free")
    if not p.left_closed(c):
        raise PreconditionError(f"{format_config(c)} is not left-closed")
    gone = c | {e for x in c for e in p.conflicts(x)}
    keep = p.events - gone
    return Pes(
        events=keep,
        causality=frozenset(q for q in p.causality if q[0] in keep and q[1] in keep),
        conflict=frozenset(q for q in p.conflict if q[0] in keep and q[1] in keep),
        labeling=MappingProxyType({e: a for e, a in p.labeling.items() if e in keep}),
    )

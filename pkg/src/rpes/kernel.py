"""Prime and reversible prime event structures.

Both structure types are immutable value objects over string event ids.
``Pes.build`` / ``Rpes.build`` normalize raw input (causality is closed
transitively, conflict is symmetrized, every reversible event becomes its
own reverse cause) and reject references to undeclared events.  The plain
dataclass constructors store whatever they are given, so a hand-built
value can be fed to the validators to see exactly which axioms it breaks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

Pair = tuple[str, str]

_TOKEN = re.compile(r"^[A-Za-z0-9_]+$")


class RpesError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(RpesError):
    """Malformed input: unknown ids, bad tokens, relations on the wrong sets."""


class PreconditionError(RpesError):
    """An operation was called outside the domain where it is defined."""


class ValidationError(RpesError):
    """A structure failed axiom validation; carries the full report."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        lines = [f"{v.axiom}: {v.message}" for v in report.violations]
        super().__init__("invalid structure:\n  " + "\n  ".join(lines))


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def raise_if_invalid(self) -> None:
        if self.violations:
            raise ValidationError(self)


# --------------------------------------------------------------------------
# helpers


def check_token(token: str, what: str = "event id") -> str:
    if not isinstance(token, str) or not _TOKEN.match(token):
        raise StructureError(f"invalid {what} {token!r}: expected [A-Za-z0-9_]+")
    return token


def transitive_closure(pairs: Iterable[Pair]) -> frozenset[Pair]:
    """Close a relation transitively.  Cycles show up as reflexive pairs."""
    succ: dict[str, set[str]] = {}
    for x, y in pairs:
        succ.setdefault(x, set()).add(y)
    closed = set()
    for start in succ:
        seen: set[str] = set()
        stack = list(succ[start])
        while stack:
            y = stack.pop()
            if y in seen:
                continue
            seen.add(y)
            stack.extend(succ.get(y, ()))
        closed.update((start, y) for y in seen)
    return frozenset(closed)


def symmetrize(pairs: Iterable[Pair]) -> frozenset[Pair]:
    out = set()
    for x, y in pairs:
        out.add((x, y))
        out.add((y, x))
    return frozenset(out)


def _index(pairs: Iterable[Pair], by_second: bool) -> dict[str, frozenset[str]]:
    acc: dict[str, set[str]] = {}
    for x, y in pairs:
        if by_second:
            acc.setdefault(y, set()).add(x)
        else:
            acc.setdefault(x, set()).add(y)
    return {k: frozenset(v) for k, v in acc.items()}


def _freeze_labels(labeling: Optional[Mapping[str, str]], events: Iterable[str]):
    labels = dict(labeling or {})
    for e in events:
        labels.setdefault(e, e)
    return MappingProxyType(dict(sorted(labels.items())))


def _check_known(events: frozenset[str], ids: Iterable[str], where: str) -> None:
    unknown = sorted(set(ids) - events)
    if unknown:
        raise StructureError(f"{where} references undeclared event(s): {', '.join(unknown)}")


class _Indexed:
    """Lookup tables shared by both structure types."""

    events: frozenset[str]
    causality: frozenset[Pair]
    conflict: frozenset[Pair]
    labeling: Mapping[str, str]

    @cached_property
    def _causes(self) -> dict[str, frozenset[str]]:
        return _index(self.causality, by_second=True)

    @cached_property
    def _effects(self) -> dict[str, frozenset[str]]:
        return _index(self.causality, by_second=False)

    @cached_property
    def _conflicts(self) -> dict[str, frozenset[str]]:
        return _index(self.conflict, by_second=False)

    def causes(self, e: str) -> frozenset[str]:
        """``{e' | e' < e}``."""
        return self._causes.get(e, frozenset())

    def effects(self, e: str) -> frozenset[str]:
        return self._effects.get(e, frozenset())

    def conflicts(self, e: str) -> frozenset[str]:
        return self._conflicts.get(e, frozenset())

    def label(self, e: str) -> str:
        return self.labeling[e]

    def conflict_free(self, events: Iterable[str]) -> bool:
        events = set(events)
        return all(not (self.conflicts(e) & events) for e in events)

    def left_closed(self, events: Iterable[str]) -> bool:
        events = set(events)
        return all(self.causes(e) <= events for e in events)


# --------------------------------------------------------------------------
# structures


@dataclass(frozen=True)
class Pes(_Indexed):
    """A labeled prime event structure with empty initial configuration."""

    events: frozenset[str]
    causality: frozenset[Pair]
    conflict: frozenset[Pair]
    labeling: Mapping[str, str] = field(hash=False)
    initial: frozenset[str] = frozenset()

    @classmethod
    def build(
        cls,
        events: Iterable[str],
        causality: Iterable[Pair] = (),
        conflict: Iterable[Pair] = (),
        labeling: Optional[Mapping[str, str]] = None,
    ) -> "Pes":
        evs = frozenset(check_token(e) for e in events)
        causality = [tuple(p) for p in causality]
        conflict = [tuple(p) for p in conflict]
        _check_known(evs, (x for p in causality for x in p), "causality")
        _check_known(evs, (x for p in conflict for x in p), "conflict")
        _check_known(evs, (labeling or {}).keys(), "labeling")
        for a in (labeling or {}).values():
            check_token(a, "action")
        return cls(
            events=evs,
            causality=transitive_closure(causality),
            conflict=symmetrize(conflict),
            labeling=_freeze_labels(labeling, evs),
        )


@dataclass(frozen=True)
class Rpes(_Indexed):
    """A labeled reversible prime event structure.

    ``reverse_causality`` holds ``(e, u)`` for ``e`` being a reverse cause
    of undoing ``u``; ``prevention`` holds ``(e, u)`` when the presence of
    ``e`` blocks undoing ``u``.  In both, ``u`` must be reversible.
    """

    events: frozenset[str]
    causality: frozenset[Pair]
    conflict: frozenset[Pair]
    labeling: Mapping[str, str] = field(hash=False)
    reversible: frozenset[str] = frozenset()
    reverse_causality: frozenset[Pair] = frozenset()
    prevention: frozenset[Pair] = frozenset()
    initial: frozenset[str] = frozenset()
    name: str = field(default="rpes", compare=False)

    @classmethod
    def build(
        cls,
        events: Iterable[str],
        causality: Iterable[Pair] = (),
        conflict: Iterable[Pair] = (),
        labeling: Optional[Mapping[str, str]] = None,
        reversible: Iterable[str] = (),
        reverse_causality: Iterable[Pair] = (),
        prevention: Iterable[Pair] = (),
        initial: Iterable[str] = (),
        name: str = "rpes",
    ) -> "Rpes":
        evs = frozenset(check_token(e) for e in events)
        causality = [tuple(p) for p in causality]
        conflict = [tuple(p) for p in conflict]
        reverse_causality = [tuple(p) for p in reverse_causality]
        prevention = [tuple(p) for p in prevention]
        rev = frozenset(reversible)
        _check_known(evs, (x for p in causality for x in p), "causality")
        _check_known(evs, (x for p in conflict for x in p), "conflict")
        _check_known(evs, rev, "reversible")
        _check_known(evs, (x for p in reverse_causality for x in p), "reverse causality")
        _check_known(evs, (x for p in prevention for x in p), "prevention")
        _check_known(evs, initial, "initial configuration")
        _check_known(evs, (labeling or {}).keys(), "labeling")
        for a in (labeling or {}).values():
            check_token(a, "action")
        _check_reverse_targets(rev, reverse_causality, "reverse causality")
        _check_reverse_targets(rev, prevention, "prevention")
        return cls(
            events=evs,
            causality=transitive_closure(causality),
            conflict=symmetrize(conflict),
            labeling=_freeze_labels(labeling, evs),
            reversible=rev,
            reverse_causality=frozenset(reverse_causality) | {(u, u) for u in rev},
            prevention=frozenset(prevention),
            initial=frozenset(initial),
            name=name,
        )

    @cached_property
    def _reverse_causes(self) -> dict[str, frozenset[str]]:
        return _index(self.reverse_causality, by_second=True)

    @cached_property
    def _preventers(self) -> dict[str, frozenset[str]]:
        return _index(self.prevention, by_second=True)

    def reverse_causes(self, u: str) -> frozenset[str]:
        """``{e | e ≺ u̲}``."""
        return self._reverse_causes.get(u, frozenset())

    def preventers(self, u: str) -> frozenset[str]:
        """``{e | e ▷ u̲}``."""
        return self._preventers.get(u, frozenset())

    def restrict(
        self,
        events: Iterable[str],
        reversible: Iterable[str],
        initial: Iterable[str],
    ) -> "Rpes":
        """Restrict every relation to ``events`` (and ``events`` x ``reversible``)."""
        evs = frozenset(events)
        rev = frozenset(reversible)
        return Rpes(
            events=evs,
            causality=frozenset(p for p in self.causality if p[0] in evs and p[1] in evs),
            conflict=frozenset(p for p in self.conflict if p[0] in evs and p[1] in evs),
            labeling=MappingProxyType({e: a for e, a in self.labeling.items() if e in evs}),
            reversible=rev,
            reverse_causality=frozenset(
                p for p in self.reverse_causality if p[0] in evs and p[1] in rev
            ),
            prevention=frozenset(p for p in self.prevention if p[0] in evs and p[1] in rev),
            initial=frozenset(initial),
            name=self.name,
        )


def _check_reverse_targets(rev: frozenset[str], pairs, where: str) -> None:
    bad = sorted({u for _, u in pairs if u not in rev})
    if bad:
        raise StructureError(f"{where} targets non-reversible event(s): {', '.join(bad)}")


# --------------------------------------------------------------------------
# validation


def _structural_checks(s, rpes: bool) -> None:
    evs = s.events
    for e in evs:
        check_token(e)
    missing = sorted(evs - set(s.labeling))
    if missing:
        raise StructureError(f"labeling is not total: no action for {', '.join(missing)}")
    _check_known(evs, s.labeling.keys(), "labeling")
    _check_known(evs, (x for p in s.causality for x in p), "causality")
    _check_known(evs, (x for p in s.conflict for x in p), "conflict")
    _check_known(evs, s.initial, "initial configuration")
    if rpes:
        _check_known(evs, s.reversible, "reversible")
        _check_known(evs, (x for p in s.reverse_causality for x in p), "reverse causality")
        _check_known(evs, (x for p in s.prevention for x in p), "prevention")
        _check_reverse_targets(s.reversible, s.reverse_causality, "reverse causality")
        _check_reverse_targets(s.reversible, s.prevention, "prevention")


def _order_checks(causality: frozenset[Pair], out: list[Violation]) -> None:
    for e, f in sorted(causality):
        if e == f:
            out.append(Violation("causality-irreflexive", (e,), f"{e} < {e}"))
    succ = _index(causality, by_second=False)
    for x, y in sorted(causality):
        for z in sorted(succ.get(y, ())):
            if (x, z) not in causality:
                out.append(
                    Violation("causality-transitive", (x, y, z), f"{x} < {y} < {z} but not {x} < {z}")
                )


def _conflict_checks(conflict: frozenset[Pair], out: list[Violation]) -> None:
    for x, y in sorted(conflict):
        if x == y:
            out.append(Violation("conflict-irreflexive", (x,), f"{x} # {x}"))
        elif (y, x) not in conflict:
            out.append(Violation("conflict-symmetric", (x, y), f"{x} # {y} but not {y} # {x}"))


def validate_pes(p: Pes) -> ValidationReport:
    """Check the prime event structure axioms; report every violation.

    Raises :class:`StructureError` for malformed input (unknown ids, partial
    labeling), which is distinct from an axiom violation.
    """
    _structural_checks(p, rpes=False)
    out: list[Violation] = []
    _order_checks(p.causality, out)
    _conflict_checks(p.conflict, out)
    # finite causes holds trivially: event sets are finite
    conflicts = _index(p.conflict, by_second=False)
    for e, e1 in sorted(p.causality):
        for e2 in sorted(conflicts.get(e, ())):
            if (e1, e2) not in p.conflict:
                out.append(
                    Violation(
                        "hereditary-conflict",
                        (e, e1, e2),
                        f"{e} < {e1} and {e} # {e2} but not {e1} # {e2}",
                    )
                )
    if p.initial:
        out.append(
            Violation("initial-empty", tuple(sorted(p.initial)), "initial configuration must be empty")
        )
    return ValidationReport(tuple(out))


def sustained_causation(r: Rpes) -> frozenset[Pair]:
    """Pairs ``a < b`` where, if ``a`` is reversible, ``b`` prevents undoing ``a``."""
    return frozenset(
        (a, b) for a, b in r.causality if a not in r.reversible or (b, a) in r.prevention
    )


def validate_rpes(r: Rpes) -> ValidationReport:
    """Check every reversible prime event structure axiom.

    Self reverse causes are added before checking.  Violations come out in a
    fixed order (axiom group, then sorted witnesses).
    """
    _structural_checks(r, rpes=True)
    rc = r.reverse_causality | {(u, u) for u in r.reversible}
    out: list[Violation] = []
    _order_checks(r.causality, out)
    _conflict_checks(r.conflict, out)
    for e in sorted(r.events):
        bad = _conflicting_pairs(r, r.causes(e))
        for x, y in bad:
            out.append(
                Violation("causes-conflict-free", (e, x, y), f"causes of {e} include {x} # {y}")
            )
    rcauses = _index(rc, by_second=True)
    for u in sorted(r.reversible):
        for x, y in _conflicting_pairs(r, rcauses.get(u, frozenset())):
            out.append(
                Violation(
                    "reverse-causes-conflict-free",
                    (u, x, y),
                    f"reverse causes of {u} include {x} # {y}",
                )
            )
    for e, u in sorted(r.prevention & rc):
        out.append(
            Violation(
                "prevention-reverse-disjoint",
                (e, u),
                f"{e} both reverse-causes and prevents undoing {u}",
            )
        )
    sus = sustained_causation(r)
    sus_succ = _index(sus, by_second=False)
    for a, b in sorted(sus):
        for c in sorted(sus_succ.get(b, ())):
            if (a, c) not in sus:
                out.append(
                    Violation(
                        "sustained-transitive",
                        (a, b, c),
                        f"{a} << {b} << {c} but not {a} << {c}",
                    )
                )
    conflicts = _index(r.conflict, by_second=False)
    for b, c in sorted(sus):
        for a in sorted(conflicts.get(b, ())):
            if (a, c) not in r.conflict:
                out.append(
                    Violation(
                        "conflict-hereditary-sustained",
                        (a, b, c),
                        f"{a} # {b} << {c} but not {a} # {c}",
                    )
                )
    for e in sorted(r.initial):
        for c in sorted(r.causes(e) - r.initial):
            out.append(
                Violation("initial-left-closed", (c, e), f"{c} < {e} but {c} not in initial configuration")
            )
    for x, y in _conflicting_pairs(r, r.initial):
        out.append(Violation("initial-conflict-free", (x, y), f"initial configuration has {x} # {y}"))
    return ValidationReport(tuple(out))


def _conflicting_pairs(r, events: frozenset[str]) -> list[Pair]:
    return sorted((x, y) for x, y in r.conflict if x <= y and x in events and y in events)


# --------------------------------------------------------------------------
# classification and conversions


def is_cause_respecting(r: Rpes) -> bool:
    return r.causality <= sustained_causation(r)


def is_causal(r: Rpes) -> bool:
    for u in r.reversible:
        if r.reverse_causes(u) != {u}:
            return False
        if r.preventers(u) != r.effects(u):
            return False
    return True


def phi(r: Rpes) -> Pes:
    """Forget reversibility of a cause-respecting structure with empty initial configuration."""
    if r.initial:
        raise PreconditionError("phi needs an empty initial configuration")
    if not is_cause_respecting(r):
        raise PreconditionError("phi needs a cause-respecting structure")
    return Pes(
        events=r.events,
        causality=r.causality,
        conflict=r.conflict,
        labeling=r.labeling,
    )


def varphi(p: Pes, reversible: Iterable[str], name: str = "rpes") -> Rpes:
    """Make the events in ``reversible`` undoable, causally.

    Each reversible event is its own only reverse cause, and exactly its
    causal successors prevent undoing it.
    """
    rev = frozenset(reversible)
    _check_known(p.events, rev, "reversible set")
    return Rpes(
        events=p.events,
        causality=p.causality,
        conflict=p.conflict,
        labeling=p.labeling,
        reversible=rev,
        reverse_causality=frozenset((u, u) for u in rev),
        prevention=frozenset((e, u) for u, e in p.causality if u in rev),
        initial=frozenset(),
        name=name,
    )

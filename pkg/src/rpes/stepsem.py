"""Step semantics: enabling, configurations, traces and the configuration LTS."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain, combinations
from typing import Hashable, Iterable, Iterator, Optional, Sequence

from .kernel import Rpes, RpesError, StructureError

Configuration = frozenset  # frozenset[str]; conflict-free w.r.t. its owning structure


class NotEnabledError(RpesError):
    """A step is not enabled; names the violated enabling clause."""

    def __init__(self, clause: str, witnesses: tuple, message: str, index: Optional[int] = None):
        self.clause = clause
        self.witnesses = witnesses
        self.index = index
        where = f"step {index}: " if index is not None else ""
        super().__init__(f"{where}clause ({clause}) violated: {message}")


@dataclass(frozen=True)
class Step:
    """A mixed step: events executed forward and events undone."""

    forward: frozenset[str] = frozenset()
    reverse: frozenset[str] = frozenset()

    @classmethod
    def of(cls, forward: Iterable[str] = (), reverse: Iterable[str] = ()) -> "Step":
        return cls(frozenset(forward), frozenset(reverse))

    @property
    def events(self) -> frozenset[str]:
        return self.forward | self.reverse

    @property
    def size(self) -> int:
        return len(self.forward) + len(self.reverse)

    def __bool__(self) -> bool:
        return bool(self.forward or self.reverse)

    def __str__(self) -> str:
        fwd = ",".join(sorted(self.forward))
        if not self.reverse:
            return fwd
        return f"{fwd}|{','.join(sorted(self.reverse))}"

    def sort_key(self):
        return (self.size, sorted(self.forward), sorted(self.reverse))


Trace = tuple  # tuple[Step, ...]


@dataclass(frozen=True, order=True)
class StepLabel:
    """Multiset of actions, stored as sorted ``(action, count)`` pairs."""

    counts: tuple[tuple[str, int], ...] = ()

    @classmethod
    def from_actions(cls, actions: Iterable[str]) -> "StepLabel":
        return cls(tuple(sorted(Counter(actions).items())))

    @classmethod
    def parse(cls, text: str) -> "StepLabel":
        text = text.strip()
        if not (text.startswith("{") and text.endswith("}")):
            raise ValueError(f"bad step label {text!r}")
        body = text[1:-1].strip()
        counts: dict[str, int] = {}
        if body:
            for item in body.split(","):
                action, _, n = item.partition(":")
                counts[action.strip()] = counts.get(action.strip(), 0) + int(n)
        return cls(tuple(sorted((a, n) for a, n in counts.items() if n > 0)))

    @property
    def total(self) -> int:
        return sum(n for _, n in self.counts)

    def __str__(self) -> str:
        return "{" + ",".join(f"{a}:{n}" for a, n in self.counts) + "}"


def format_config(c: Iterable[str]) -> str:
    return "{" + ",".join(sorted(c)) + "}"


def config_key(c: Iterable[str]):
    c = sorted(c)
    return (len(c), c)


def state_name(state: Hashable) -> str:
    """Canonical node name: ``C_a_b`` for configurations, ``str()`` otherwise."""
    if isinstance(state, frozenset):
        return "C_" + "_".join(sorted(state))
    return str(state)


# --------------------------------------------------------------------------
# enabling


def check_enabled(r: Rpes, c: frozenset[str], s: Step):
    """Return ``None`` if ``s`` is enabled at ``c``, else ``(clause, witnesses, message)``.

    Raises :class:`StructureError` when the configuration or step mention
    events that ``r`` does not have.
    """
    outside = sorted((c | s.forward | s.reverse) - r.events)
    if outside:
        raise StructureError(f"unknown event(s): {', '.join(outside)}")
    A, B = s.forward, s.reverse
    # (a)
    if A & c:
        return ("a", tuple(sorted(A & c)), "forward events already in configuration")
    if not B <= c:
        return ("a", tuple(sorted(B - c)), "undone events not in configuration")
    if not B <= r.reversible:
        return ("a", tuple(sorted(B - r.reversible)), "undone events are not reversible")
    after = c | A
    for e in sorted(A):
        hit = r.conflicts(e) & after
        if hit:
            return ("a", (e, min(hit)), f"{e} conflicts with {min(hit)}")
    # (b)
    kept = c - B
    for e in sorted(A):
        missing = r.causes(e) - kept
        if missing:
            return ("b", (e, min(missing)), f"cause {min(missing)} of {e} absent")
    # (c)
    for e in sorted(B):
        missing = r.reverse_causes(e) - (c - (B - {e}))
        if missing:
            return ("c", (e, min(missing)), f"reverse cause {min(missing)} of undoing {e} absent")
    # (d)
    for e in sorted(B):
        present = r.preventers(e) & after
        if present:
            return ("d", (e, min(present)), f"{min(present)} prevents undoing {e}")
    return None


def is_enabled(r: Rpes, c: frozenset[str], s: Step) -> bool:
    return check_enabled(r, c, s) is None


def apply_step(r: Rpes, c: frozenset[str], s: Step) -> frozenset[str]:
    """Execute ``s`` at ``c``; raises :class:`NotEnabledError` if it is not enabled."""
    failure = check_enabled(r, c, s)
    if failure is not None:
        raise NotEnabledError(*failure)
    after = (c - s.reverse) | s.forward
    assert r.conflict_free(after), "step produced a conflicting configuration"
    return after


def step_label(r: Rpes, s: Step) -> StepLabel:
    """Multiset of actions of all events in the step, direction-blind."""
    outside = sorted(s.events - r.events)
    if outside:
        raise StructureError(f"unknown event(s): {', '.join(outside)}")
    # a forward and an undone event are disjoint in an enabled step, but
    # count both occurrences if a raw step repeats one
    return StepLabel.from_actions(chain((r.label(e) for e in s.forward), (r.label(e) for e in s.reverse)))


# --------------------------------------------------------------------------
# step enumeration


def _subsets(items: Sequence[str], limit: int) -> Iterator[tuple[str, ...]]:
    for k in range(min(len(items), limit) + 1):
        yield from combinations(items, k)


def _conflict_free_subsets(r: Rpes, items: Sequence[str], limit: int) -> Iterator[tuple[str, ...]]:
    def grow(start: int, chosen: list[str], blocked: frozenset[str]):
        yield tuple(chosen)
        if len(chosen) == limit:
            return
        for i in range(start, len(items)):
            e = items[i]
            if e in blocked:
                continue
            chosen.append(e)
            yield from grow(i + 1, chosen, blocked | r.conflicts(e))
            chosen.pop()

    yield from grow(0, [], frozenset())


def enumerate_steps(
    r: Rpes, c: frozenset[str], max_step_size: Optional[int] = None
) -> frozenset[Step]:
    """All nonempty steps enabled at ``c`` with at most ``max_step_size`` events."""
    limit = len(r.events) if max_step_size is None else max_step_size
    fwd = sorted(
        e for e in r.events - c if not (r.conflicts(e) & c) and r.causes(e) <= c
    )
    rev = sorted(
        u
        for u in c & r.reversible
        if r.reverse_causes(u) <= c and not (r.preventers(u) & c)
    )
    steps = set()
    for A in _conflict_free_subsets(r, fwd, limit):
        for B in _subsets(rev, limit - len(A)):
            if not A and not B:
                continue
            s = Step(frozenset(A), frozenset(B))
            if is_enabled(r, c, s):
                steps.add(s)
    return frozenset(steps)


def enumerate_steps_bruteforce(
    r: Rpes, c: frozenset[str], max_step_size: Optional[int] = None
) -> frozenset[Step]:
    """Reference enumeration over every pair of subsets; exponential in ``|E|``."""
    limit = len(r.events) if max_step_size is None else max_step_size
    events = sorted(r.events)
    rev = sorted(r.reversible)
    steps = set()
    for A in _subsets(events, len(events)):
        for B in _subsets(rev, len(rev)):
            if (A or B) and len(A) + len(B) <= limit:
                s = Step(frozenset(A), frozenset(B))
                if is_enabled(r, c, s):
                    steps.add(s)
    return frozenset(steps)


def sorted_steps(steps: Iterable[Step]) -> list[Step]:
    return sorted(steps, key=Step.sort_key)


# --------------------------------------------------------------------------
# reachability and traces


def _explore(r: Rpes, forward_only: bool, max_step_size: Optional[int] = None):
    seen = {r.initial}
    queue = deque([r.initial])
    while queue:
        c = queue.popleft()
        for s in sorted_steps(enumerate_steps(r, c, max_step_size)):
            if forward_only and s.reverse:
                continue
            nxt = apply_step(r, c, s)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def reachable_configs(r: Rpes) -> frozenset[frozenset[str]]:
    return _explore(r, forward_only=False)


def forwards_reachable_configs(r: Rpes) -> frozenset[frozenset[str]]:
    return _explore(r, forward_only=True)


def validate_trace(r: Rpes, t: Sequence[Step]) -> list[frozenset[str]]:
    """Configurations ``C0, ..., Cn`` visited by ``t``.

    Raises :class:`NotEnabledError` carrying the 1-based index of the first
    step that is not enabled.
    """
    configs = [r.initial]
    for i, s in enumerate(t, start=1):
        failure = check_enabled(r, configs[-1], s)
        if failure is not None:
            raise NotEnabledError(*failure, index=i)
        configs.append((configs[-1] - s.reverse) | s.forward)
    return configs


def last(r: Rpes, t: Sequence[Step]) -> frozenset[str]:
    return validate_trace(r, t)[-1]


def traces_equivalent(r: Rpes, t1: Sequence[Step], t2: Sequence[Step]) -> bool:
    return last(r, t1) == last(r, t2)


# --------------------------------------------------------------------------
# transition systems


@dataclass(frozen=True)
class Lts:
    """Finite labeled transition system over :class:`StepLabel` labels."""

    states: frozenset
    initial: Hashable
    transitions: frozenset  # of (source, StepLabel, target)
    kind: str = field(default="configuration", compare=False)

    def __post_init__(self):
        if self.initial not in self.states:
            raise ValueError("initial state is not a state")
        for src, _, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError("transition endpoint is not a state")

    @cached_property
    def _out(self) -> dict:
        out: dict = {s: {} for s in self.states}
        for src, label, dst in self.transitions:
            out[src].setdefault(label, set()).add(dst)
        return out

    def successors(self, state) -> dict:
        """``label -> set of targets`` for one state."""
        return self._out[state]

    def labels_at(self, state) -> frozenset:
        return frozenset(self._out[state])

    def sorted_states(self) -> list:
        return sorted(self.states, key=state_name)

    def sorted_transitions(self) -> list:
        return sorted(
            self.transitions, key=lambda t: (state_name(t[0]), t[1], state_name(t[2]))
        )

    def rename(self, mapping) -> "Lts":
        """Apply a state renaming (a callable or a dict)."""
        f = mapping if callable(mapping) else mapping.__getitem__
        return Lts(
            frozenset(f(s) for s in self.states),
            f(self.initial),
            frozenset((f(a), l, f(b)) for a, l, b in self.transitions),
            self.kind,
        )

    def to_text(self) -> str:
        lines = [f"kind {self.kind}", f"states {len(self.states)}", f"initial {state_name(self.initial)}"]
        lines += [
            f"{state_name(a)} -{l}-> {state_name(b)}" for a, l, b in self.sorted_transitions()
        ]
        return "\n".join(lines) + "\n"


def build_tc(r: Rpes, max_step_size: Optional[int] = None) -> Lts:
    """Transition system whose states are the reachable configurations."""
    seen = {r.initial}
    queue = deque([r.initial])
    transitions = set()
    while queue:
        c = queue.popleft()
        for s in sorted_steps(enumerate_steps(r, c, max_step_size)):
            nxt = apply_step(r, c, s)
            transitions.add((c, step_label(r, s), nxt))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return Lts(frozenset(seen), r.initial, frozenset(transitions), "configuration")

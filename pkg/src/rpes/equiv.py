"""Bisimulation and isomorphism of finite labeled transition systems."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Hashable, Optional

from .stepsem import Lts, StepLabel, state_name


@dataclass(frozen=True)
class Counterexample:
    """A label sequence along which the two systems can be told apart.

    ``path`` is followed in lockstep from the initial states to ``pair``;
    there, ``label`` is enabled on ``side`` only.
    """

    path: tuple[StepLabel, ...]
    pair: tuple[Hashable, Hashable]
    label: StepLabel
    side: str

    @property
    def sequence(self) -> tuple[StepLabel, ...]:
        return self.path + (self.label,)

    def __str__(self) -> str:
        seq = " ".join(str(l) for l in self.sequence)
        a, b = self.pair
        return f"{seq} (only the {self.side} system can do {self.label} at {state_name(a)} / {state_name(b)})"


@dataclass(frozen=True)
class BisimResult:
    bisimilar: bool
    witness: Optional[frozenset] = None
    counterexample: Optional[Counterexample] = None

    def __bool__(self) -> bool:
        return self.bisimilar


def greatest_bisimulation(l1: Lts, l2: Lts) -> frozenset:
    """Largest relation closed under the transfer conditions (initial pair not required)."""
    rel = {(s, t) for s in l1.states for t in l2.states if l1.labels_at(s) == l2.labels_at(t)}
    changed = True
    while changed:
        changed = False
        for s, t in sorted(rel, key=lambda p: (state_name(p[0]), state_name(p[1]))):
            if not _transfers(l1, l2, s, t, rel):
                rel.discard((s, t))
                changed = True
    return frozenset(rel)


def _transfers(l1: Lts, l2: Lts, s, t, rel) -> bool:
    out1, out2 = l1.successors(s), l2.successors(t)
    if out1.keys() != out2.keys():
        return False
    for label, targets in out1.items():
        for s1 in targets:
            if not any((s1, t1) in rel for t1 in out2[label]):
                return False
    for label, targets in out2.items():
        for t1 in targets:
            if not any((s1, t1) in rel for s1 in out1[label]):
                return False
    return True


def _lockstep(l1: Lts, l2: Lts, start, allowed=None):
    """BFS over pairs reachable by equally labeled moves; yields ``(pair, path)``."""
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (s, t), path = queue.popleft()
        yield (s, t), path
        out1, out2 = l1.successors(s), l2.successors(t)
        for label in sorted(out1.keys() & out2.keys()):
            for s1 in sorted(out1[label], key=state_name):
                for t1 in sorted(out2[label], key=state_name):
                    pair = (s1, t1)
                    if pair in seen or (allowed is not None and pair not in allowed):
                        continue
                    seen.add(pair)
                    queue.append((pair, path + (label,)))


def check_bisimulation(l1: Lts, l2: Lts) -> BisimResult:
    """Decide strong bisimilarity of the two initial states.

    On success the witness is the greatest bisimulation restricted to the
    pairs reachable from the initial pair.  On failure the counterexample
    is a shortest lockstep path to a pair whose enabled labels differ.
    """
    start = (l1.initial, l2.initial)
    rel = greatest_bisimulation(l1, l2)
    if start in rel:
        witness = frozenset(pair for pair, _ in _lockstep(l1, l2, start, rel))
        return BisimResult(True, witness=witness)
    for (s, t), path in _lockstep(l1, l2, start):
        only1 = l1.labels_at(s) - l2.labels_at(t)
        only2 = l2.labels_at(t) - l1.labels_at(s)
        if only1 or only2:
            label = min(only1 | only2)
            side = "left" if label in only1 else "right"
            return BisimResult(False, counterexample=Counterexample(path, (s, t), label, side))
    # if every lockstep pair agreed on labels, those pairs would form a bisimulation
    raise AssertionError("non-bisimilar systems without a label mismatch")


def is_bisimulation(l1: Lts, l2: Lts, rel) -> bool:
    """Check the transfer conditions for ``rel`` including the initial pair."""
    rel = set(rel)
    if (l1.initial, l2.initial) not in rel:
        return False
    return all(_transfers_weak(l1, l2, s, t, rel) for s, t in rel)


def _transfers_weak(l1: Lts, l2: Lts, s, t, rel) -> bool:
    out1, out2 = l1.successors(s), l2.successors(t)
    for label, targets in out1.items():
        for s1 in targets:
            if not any((s1, t1) in rel for t1 in out2.get(label, ())):
                return False
    for label, targets in out2.items():
        for t1 in targets:
            if not any((s1, t1) in rel for s1 in out1.get(label, ())):
                return False
    return True


# --------------------------------------------------------------------------
# isomorphism


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    mapping: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.isomorphic


def _signature(l: Lts, s):
    out = Counter()
    loops = Counter()
    for label, targets in l.successors(s).items():
        out[label] += len(targets)
        if s in targets:
            loops[label] += 1
    return (s == l.initial, tuple(sorted(out.items())), tuple(sorted(loops.items())))


def _in_signatures(l: Lts) -> dict:
    incoming: dict = {s: Counter() for s in l.states}
    for _, label, dst in l.transitions:
        incoming[dst][label] += 1
    return {s: tuple(sorted(c.items())) for s, c in incoming.items()}


def check_isomorphism(l1: Lts, l2: Lts) -> IsoResult:
    """Exact search for a bijection preserving initial state and transitions."""
    if len(l1.states) != len(l2.states) or len(l1.transitions) != len(l2.transitions):
        return IsoResult(False)
    if Counter(l for _, l, _ in l1.transitions) != Counter(l for _, l, _ in l2.transitions):
        return IsoResult(False)
    in1, in2 = _in_signatures(l1), _in_signatures(l2)
    sig1 = {s: (_signature(l1, s), in1[s]) for s in l1.states}
    sig2 = {t: (_signature(l2, t), in2[t]) for t in l2.states}
    if Counter(sig1.values()) != Counter(sig2.values()):
        return IsoResult(False)
    buckets: dict = {}
    for t in sorted(l2.states, key=state_name):
        buckets.setdefault(sig2[t], []).append(t)

    edges1 = {(a, b): set() for a, _, b in l1.transitions}
    for a, label, b in l1.transitions:
        edges1[(a, b)].add(label)
    edges2 = {(a, b): set() for a, _, b in l2.transitions}
    for a, label, b in l2.transitions:
        edges2[(a, b)].add(label)

    order = _bfs_order(l1)
    mapping: dict = {}
    used: set = set()

    def consistent(s, t) -> bool:
        if edges1.get((s, s), set()) != edges2.get((t, t), set()):
            return False
        for u, v in mapping.items():
            if edges1.get((s, u), set()) != edges2.get((t, v), set()):
                return False
            if edges1.get((u, s), set()) != edges2.get((v, t), set()):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        s = order[i]
        for t in buckets.get(sig1[s], ()):
            if t in used or not consistent(s, t):
                continue
            mapping[s] = t
            used.add(t)
            if search(i + 1):
                return True
            del mapping[s]
            used.discard(t)
        return False

    if search(0):
        return IsoResult(True, dict(mapping))
    return IsoResult(False)


def _bfs_order(l: Lts) -> list:
    order = [l.initial]
    seen = {l.initial}
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        for label in sorted(l.successors(s)):
            for t in sorted(l.successors(s)[label], key=state_name):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
    order += sorted(l.states - seen, key=state_name)
    return order

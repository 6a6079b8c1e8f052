"""Seeded random generation of event structures.

The random source is SplitMix64 so that a seed reproduces the same
structure in any implementation:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- (z xor (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z <- (z xor (z >> 27)) * 0x94D049BB133111EB mod 2^64
    output z xor (z >> 31)

A uniform float is ``(output >> 11) * 2^-53`` and a coin with probability
``p`` comes up heads iff that float is ``< p``.  A choice among ``k``
options takes ``floor(float * k)``.

Events are ``e0 ... e{n-1}``.  Draws happen in this order:

1. causality: for ``i < j`` (lexicographic over ``(i, j)``), one coin with
   ``causality_density`` adds ``ei < ej``; the result is closed
   transitively.
2. conflict: for ``i < j`` with ``ei``, ``ej`` causally unrelated, one coin
   with ``conflict_density``.  In ``cause-respecting`` and ``causal`` modes
   (and for PESs) the coin is only drawn when no event is above both, and
   conflict is then inherited upwards along causality.  In ``any`` mode the
   raw pairs are used as drawn.
3. labels: if ``label_alphabet > 0``, one choice per event in index order
   picks action ``x{k}``; otherwise each event is labelled by its own id.
4. reversible events: one coin per event with ``reversible_prob``.
5. extra reverse causes: for each reversible ``u`` and each other event
   ``e`` not above ``u``, a coin with ``extra_revcause_density``; the pair
   is kept only if the reverse causes of ``u`` stay conflict-free.
6. prevention: ``cause-respecting`` mode first adds ``e' ▷ u̲`` for every
   ``u < e'``; then for each reversible ``u`` and event ``e`` not already a
   reverse cause or preventer, a coin with ``prevention_density``.
   ``causal`` mode skips steps 5 to 7 and applies the canonical causal
   construction (empty initial configuration) to steps 1 to 4.
7. initial configuration: one coin per event in index order with
   ``init_prob``; the event joins if the coin lands, all its causes are
   already in, and it conflicts with nothing already in.

``any`` mode repeats steps 1-7 on the same stream until the result
validates, up to ``max_attempts`` times.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kernel import (
    Pes,
    Rpes,
    RpesError,
    is_causal,
    is_cause_respecting,
    transitive_closure,
    validate_pes,
    validate_rpes,
    varphi,
)

MASK64 = (1 << 64) - 1
MODES = ("any", "cause-respecting", "causal")


class GenerationError(RpesError):
    pass


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def coin(self, p: float) -> bool:
        return self.random() < p

    def choice_index(self, k: int) -> int:
        return min(int(self.random() * k), k - 1)


@dataclass(frozen=True)
class GenParams:
    num_events: int = 5
    causality_density: float = 0.3
    conflict_density: float = 0.15
    reversible_prob: float = 0.5
    prevention_density: float = 0.1
    extra_revcause_density: float = 0.1
    mode: str = "cause-respecting"
    seed: int = 0
    label_alphabet: int = 0
    init_prob: float = 0.0
    max_attempts: int = 200

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        if self.num_events < 0:
            raise ValueError("num_events must be non-negative")
        for name in (
            "causality_density",
            "conflict_density",
            "reversible_prob",
            "prevention_density",
            "extra_revcause_density",
            "init_prob",
        ):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")


def _events(n: int) -> list[str]:
    return [f"e{i}" for i in range(n)]


def _causality(rng: SplitMix64, events: list[str], density: float) -> frozenset:
    pairs = []
    for i in range(len(events)):
        for j in range(i + 1, len(events)):
            if rng.coin(density):
                pairs.append((events[i], events[j]))
    return transitive_closure(pairs)


def _conflict(rng: SplitMix64, events: list[str], order: frozenset, density: float, hereditary: bool):
    above = {e: {e} | {y for x, y in order if x == e} for e in events}
    base = []
    for i in range(len(events)):
        for j in range(i + 1, len(events)):
            x, y = events[i], events[j]
            if (x, y) in order or (y, x) in order:
                continue
            if hereditary and above[x] & above[y]:
                continue
            if rng.coin(density):
                base.append((x, y))
    conflict = set()
    for x, y in base:
        if hereditary:
            conflict |= {(a, b) for a in above[x] for b in above[y]}
        else:
            conflict.add((x, y))
    return frozenset(conflict | {(b, a) for a, b in conflict})


def _labels(rng: SplitMix64, events: list[str], k: int) -> dict:
    if k <= 0:
        return {e: e for e in events}
    return {e: f"x{rng.choice_index(k)}" for e in events}


def _pes_parts(rng: SplitMix64, params: GenParams, hereditary: bool):
    events = _events(params.num_events)
    order = _causality(rng, events, params.causality_density)
    conflict = _conflict(rng, events, order, params.conflict_density, hereditary)
    labels = _labels(rng, events, params.label_alphabet)
    return events, order, conflict, labels


def _initial(rng: SplitMix64, events: list[str], order, conflict, p: float) -> frozenset:
    chosen: set[str] = set()
    for e in events:
        if not rng.coin(p):
            continue
        causes = {x for x, y in order if y == e}
        if causes <= chosen and not any((e, c) in conflict for c in chosen):
            chosen.add(e)
    return frozenset(chosen)


def gen_pes(params: GenParams) -> Pes:
    """A random PES; ``mode`` and the reversibility parameters are ignored."""
    rng = SplitMix64(params.seed)
    events, order, conflict, labels = _pes_parts(rng, params, hereditary=True)
    p = Pes.build(events, order, conflict, labels)
    assert validate_pes(p).valid
    return p


def gen_reversible_set(params: GenParams, events) -> frozenset:
    """A reproducible random subset of ``events``, one coin each with ``reversible_prob``."""
    rng = SplitMix64(params.seed ^ 0x5EED)
    return frozenset(e for e in sorted(events) if rng.coin(params.reversible_prob))


def _attempt(rng: SplitMix64, params: GenParams) -> Rpes:
    hereditary = params.mode != "any"
    events, order, conflict, labels = _pes_parts(rng, params, hereditary)
    reversible = [e for e in events if rng.coin(params.reversible_prob)]
    if params.mode == "causal":
        p = Pes.build(events, order, conflict, labels)
        return varphi(p, reversible, name=f"gen{params.seed}")

    revcause = {(u, u) for u in reversible}
    for u in reversible:
        for e in events:
            if e == u or (u, e) in order:
                continue
            if rng.coin(params.extra_revcause_density):
                current = {x for x, v in revcause if v == u}
                if not any((e, c) in conflict for c in current):
                    revcause.add((e, u))

    prevention = set()
    if params.mode == "cause-respecting":
        prevention |= {(e, u) for u, e in order if u in reversible}
    for u in reversible:
        for e in events:
            if (e, u) in revcause or (e, u) in prevention:
                continue
            if rng.coin(params.prevention_density):
                prevention.add((e, u))

    initial = _initial(rng, events, order, conflict, params.init_prob)
    return Rpes.build(
        events,
        causality=order,
        conflict=conflict,
        labeling=labels,
        reversible=reversible,
        reverse_causality=revcause,
        prevention=prevention,
        initial=initial,
        name=f"gen{params.seed}",
    )


def gen_rpes(params: GenParams) -> Rpes:
    rng = SplitMix64(params.seed)
    last_report = None
    for _ in range(max(1, params.max_attempts)):
        r = _attempt(rng, params)
        report = validate_rpes(r)
        if report.valid:
            if params.mode == "causal":
                assert is_causal(r)
            elif params.mode == "cause-respecting":
                assert is_cause_respecting(r)
            return r
        if params.mode != "any":
            raise AssertionError(f"generator produced an invalid {params.mode} structure: {report.violations[0]}")
        last_report = report
    v = last_report.violations[0]
    raise GenerationError(
        f"no valid structure after {params.max_attempts} attempts; last violation {v.axiom}: {v.message}"
    )

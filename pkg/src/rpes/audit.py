"""Executable checks of the semantic properties linking traces, residuals, TC and TE.

``audit_semantics`` explores the traces of a structure up to a length bound
and checks each property on every trace, step and trace split it reaches.
Properties that are only guaranteed for cause-respecting structures are
still run on other inputs; their failures are recorded but do not make the
report fail.

Traces are deduplicated by (configuration, residual, executed-and-removed
events).  Every checked property depends on a trace only through that
triple, so deduplication loses no coverage; ``exhaustive=True`` disables it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .equiv import check_bisimulation, check_isomorphism
from .kernel import Rpes, is_cause_respecting, validate_rpes
from .residual import ResidualKey, _remove, build_te, remove_trace
from .stepsem import (
    Step,
    apply_step,
    build_tc,
    enumerate_steps,
    format_config,
    forwards_reachable_configs,
    is_enabled,
    reachable_configs,
    sorted_steps,
    step_label,
    validate_trace,
)
from .textformat import format_trace

# name -> (what is checked, guaranteed only for cause-respecting input)
CHECKS: dict[str, tuple[str, bool]] = {
    "trace-configurations": ("last configurations of traces = configurations reachable in as many steps", False),
    "trace-extension": ("extending a trace by a step moves its last configuration by that step", False),
    "transition-extends-trace": ("every TC move from last(t) extends t to an equivalent trace", False),
    "left-closed": ("reachable configurations are left-closed under causality", True),
    "forwards-reachable": ("reachable configurations are forwards reachable", True),
    "residual-shrinks": ("residual components shrink along a trace", True),
    "residual-cause-respecting": ("every residual is a valid cause-respecting structure", True),
    "undone-were-reversible": ("undone events are reversible in the preceding residual", True),
    "executed-were-present": ("executed events are events of the preceding residual", True),
    "removed-stay-executed": ("events removed as executed stay in the last configuration", True),
    "residual-initial": ("initial configuration of a residual = last configuration restricted to its events", True),
    "trace-concatenation": ("a trace of the residual after t extends t to a trace with the same residual", True),
    "suffix-in-residual": ("the suffix of a trace is a trace of the residual after the prefix", True),
    "residual-in-te": ("the residual after any trace is a TE state", True),
    "te-state-realized": ("every TE state is the residual after some trace", True),
    "tc-step-in-te": ("every TC move from last(t) is matched by a TE move from the residual after t", True),
    "te-step-in-tc": ("every TE move from the residual after t is matched by a TC move from last(t)", True),
    "tc-te-bisimilar": ("TC and TE are bisimilar", True),
}

MAX_RECORDED = 500


@dataclass
class AuditEntry:
    name: str
    description: str
    guaranteed: bool
    checked: int = 0
    failures: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def status(self) -> str:
        if self.passed:
            return "PASS"
        return "FAIL" if self.guaranteed else "FAIL (not guaranteed)"


@dataclass
class AuditReport:
    cause_respecting: bool
    max_trace_len: int
    max_step_size: Optional[int]
    exhaustive: bool
    explored: int
    isomorphic: bool
    entries: dict[str, AuditEntry]

    @property
    def ok(self) -> bool:
        return all(e.passed or not e.guaranteed for e in self.entries.values())

    def __getitem__(self, name: str) -> AuditEntry:
        return self.entries[name]

    def to_text(self) -> str:
        lines = [
            f"cause-respecting: {str(self.cause_respecting).lower()}",
            f"bounds: max-len {self.max_trace_len}, max-step "
            f"{'none' if self.max_step_size is None else self.max_step_size}"
            f"{', exhaustive' if self.exhaustive else ''}",
            f"explored traces: {self.explored}",
        ]
        for e in self.entries.values():
            lines.append(f"{e.status():<22} {e.name} ({e.checked} checked, {e.failures} failed)")
            for cx in e.counterexamples[:3]:
                lines.append(f"    e.g. {cx}")
        lines.append(f"tc-te-isomorphic: {str(self.isomorphic).lower()}")
        lines.append(f"overall: {'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines) + "\n"


@dataclass
class _Node:
    trace: tuple
    config: frozenset
    residual: Rpes
    removed: frozenset

    @property
    def key(self) -> ResidualKey:
        return ResidualKey.of(self.residual)


class _Recorder:
    def __init__(self, cr: bool, initial_empty: bool):
        self.entries = {}
        for name, (desc, needs_cr) in CHECKS.items():
            guaranteed = cr or not needs_cr
            if name == "forwards-reachable":
                # reverse steps can leave a nonempty initial configuration
                guaranteed = guaranteed and initial_empty
            self.entries[name] = AuditEntry(name, desc, guaranteed)

    def check(self, name: str, ok: bool, witness=None) -> None:
        e = self.entries[name]
        e.checked += 1
        if not ok:
            e.failures += 1
            if len(e.counterexamples) < MAX_RECORDED:
                e.counterexamples.append(witness() if callable(witness) else witness)


def _enabled(r: Rpes, c: frozenset, s: Step) -> bool:
    return s.events <= r.events and is_enabled(r, c, s)


def _shrinks(old: Rpes, new: Rpes) -> bool:
    return (
        new.events <= old.events
        and new.reversible <= old.reversible
        and new.causality <= old.causality
        and new.conflict <= old.conflict
        and new.reverse_causality <= old.reverse_causality
        and new.prevention <= old.prevention
        and set(new.labeling.items()) <= set(old.labeling.items())
    )


def _bounded_states(lts, depth: int) -> set:
    seen = {lts.initial}
    frontier = [lts.initial]
    for _ in range(depth):
        nxt = []
        for s in frontier:
            for targets in lts.successors(s).values():
                for t in targets:
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
        frontier = nxt
    return seen


def audit_semantics(
    r: Rpes,
    max_trace_len: int,
    max_step_size: Optional[int] = None,
    exhaustive: bool = False,
) -> AuditReport:
    cr = is_cause_respecting(r)
    rec = _Recorder(cr, not r.initial)
    tc = build_tc(r, max_step_size)
    te = build_te(r, max_step_size)

    def steps_at(structure: Rpes, c: frozenset) -> list[Step]:
        return sorted_steps(enumerate_steps(structure, c, max_step_size))

    residual_ok: dict[ResidualKey, bool] = {}

    start = _Node((), r.initial, r, frozenset())
    ident = (lambda n: n.trace) if exhaustive else (lambda n: (n.config, n.key, n.removed))
    seen = {ident(start)}
    queue = deque([start])
    nodes: list[_Node] = []
    pending_te: list[tuple[_Node, tuple]] = []

    while queue:
        node = queue.popleft()
        nodes.append(node)
        t, c, res, key = node.trace, node.config, node.residual, node.key

        if key not in residual_ok:
            residual_ok[key] = validate_rpes(res).valid and is_cause_respecting(res)
        rec.check("residual-cause-respecting", residual_ok[key], lambda: {"t": format_trace(t)})
        rec.check(
            "removed-stay-executed",
            node.removed <= c,
            lambda: {"t": format_trace(t), "missing": format_config(node.removed - c)},
        )
        rec.check("residual-initial", res.initial == c & res.events, lambda: {"t": format_trace(t)})
        rec.check("residual-in-te", key in te.states, lambda: {"t": format_trace(t)})

        if len(t) >= max_trace_len:
            continue
        budget = max_trace_len - len(t)
        steps = steps_at(r, c)
        children = {}
        for s in steps:
            t2 = t + (s,)
            c2 = apply_step(r, c, s)
            rec.check(
                "trace-extension",
                validate_trace(r, t2)[-1] == c2,
                lambda: {"t": format_trace(t), "step": str(s)},
            )
            rec.check("undone-were-reversible", s.reverse <= res.reversible, lambda: {"t": format_trace(t2)})
            rec.check("executed-were-present", s.forward <= res.events, lambda: {"t": format_trace(t2)})
            res2, removal = _remove(res, s)
            rec.check("residual-shrinks", _shrinks(res, res2), lambda: {"t": format_trace(t2)})
            label = step_label(r, s)
            key2 = ResidualKey.of(res2)
            rec.check(
                "tc-step-in-te",
                (key, label, key2) in te.transitions,
                lambda: {"t": format_trace(t), "step": str(s)},
            )
            children[s] = (label, c2, key2)
            child = _Node(t2, c2, res2, node.removed | removal.tilde_a)
            if ident(child) not in seen:
                seen.add(ident(child))
                queue.append(child)

        for label, targets in tc.successors(c).items():
            for c2 in targets:
                ok = any(lab == label and tgt == c2 for lab, tgt, _ in children.values())
                rec.check(
                    "transition-extends-trace",
                    ok,
                    lambda: {"t": format_trace(t), "label": str(label), "to": format_config(c2)},
                )
        for label, targets in te.successors(key).items():
            for key2 in targets:
                if not any(lab == label and k == key2 for lab, _, k in children.values()):
                    pending_te.append((node, (label, key2)))
                else:
                    rec.check("te-step-in-tc", True)

        _walk_residual_traces(r, node, budget, steps_at, rec)
        _walk_suffixes(r, node, budget, steps_at, rec)

    # a TE move not matched by t itself may still be matched by another trace
    # with the same last configuration
    realized = {(n.config, n.key) for n in nodes}
    for node, (label, key2) in pending_te:
        ok = any((c2, key2) in realized for c2 in tc.successors(node.config).get(label, ()))
        rec.check(
            "te-step-in-tc",
            ok,
            lambda: {"t": format_trace(node.trace), "label": str(label), "to": str(key2)},
        )

    reached = {n.config for n in nodes}
    bounded = _bounded_states(tc, max_trace_len)
    rec.check(
        "trace-configurations",
        reached == bounded,
        lambda: {"only-traces": sorted(map(format_config, reached - bounded)),
                 "only-bfs": sorted(map(format_config, bounded - reached))},
    )
    keys = {n.key for n in nodes}
    for k in sorted(_bounded_states(te, max_trace_len), key=str):
        rec.check("te-state-realized", k in keys, lambda: {"state": str(k)})

    configs = reachable_configs(r)
    for c in sorted(configs, key=lambda c: (len(c), sorted(c))):
        rec.check("left-closed", r.left_closed(c), lambda: {"config": format_config(c)})
    forwards = forwards_reachable_configs(r)
    for c in sorted(configs - forwards, key=lambda c: (len(c), sorted(c))):
        rec.check("forwards-reachable", False, {"config": format_config(c)})
    rec.entries["forwards-reachable"].checked += len(configs & forwards)

    bisim = check_bisimulation(tc, te)
    rec.check("tc-te-bisimilar", bisim.bisimilar, lambda: {"counterexample": str(bisim.counterexample)})

    return AuditReport(
        cause_respecting=cr,
        max_trace_len=max_trace_len,
        max_step_size=max_step_size,
        exhaustive=exhaustive,
        explored=len(nodes),
        isomorphic=check_isomorphism(tc, te).isomorphic,
        entries=rec.entries,
    )


def _walk_residual_traces(r: Rpes, node: _Node, budget: int, steps_at, rec: _Recorder) -> None:
    """Follow traces t' of the residual after t and replay t t' on ``r``."""
    t, res = node.trace, node.residual
    start = (res.initial, node.config, ResidualKey.of(res))
    seen = {start}
    queue = deque([(res, node.config, ())])
    while queue:
        cur, c_root, path = queue.popleft()
        if len(path) >= budget:
            continue
        for s in steps_at(cur, cur.initial):
            p2 = path + (s,)
            ok = _enabled(r, c_root, s)
            rec.check("trace-concatenation", ok, lambda: {"t": format_trace(t), "t'": format_trace(p2)})
            if not ok:
                continue
            nxt = _remove(cur, s)[0]
            c2 = (c_root - s.reverse) | s.forward
            state = (nxt.initial, c2, ResidualKey.of(nxt))
            if state in seen:
                continue
            seen.add(state)
            same = remove_trace(r, t + p2) == remove_trace(res, p2)
            rec.check("trace-concatenation", same, lambda: {"t": format_trace(t), "t'": format_trace(p2)})
            queue.append((nxt, c2, p2))


def _walk_suffixes(r: Rpes, node: _Node, budget: int, steps_at, rec: _Recorder) -> None:
    """Follow extensions t'' of t on ``r`` and check each is a trace of the residual after t."""
    t, res = node.trace, node.residual
    start = (node.config, res.initial)
    seen = {start}
    queue = deque([(node.config, res.initial, ())])
    while queue:
        c_root, c_res, path = queue.popleft()
        if len(path) >= budget:
            continue
        for s in steps_at(r, c_root):
            p2 = path + (s,)
            ok = _enabled(res, c_res, s)
            rec.check("suffix-in-residual", ok, lambda: {"t'": format_trace(t), "t''": format_trace(p2)})
            if not ok:
                continue
            state = ((c_root - s.reverse) | s.forward, (c_res - s.reverse) | s.forward)
            if state not in seen:
                seen.add(state)
                queue.append((*state, p2))

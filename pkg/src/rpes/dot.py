"""Graphviz export of transition systems."""

from __future__ import annotations

from .stepsem import Lts, state_name


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(lts: Lts, name: str = "") -> str:
    """Render ``lts`` as a DOT digraph; the initial state is a double circle.

    Output depends only on the system, so equal systems give identical bytes.
    """
    graph = name or ("TC" if lts.kind == "configuration" else "TE")
    lines = [f"digraph {_quote(graph)} {{", "  rankdir=LR;"]
    for s in lts.sorted_states():
        shape = "doublecircle" if s == lts.initial else "circle"
        lines.append(f"  {_quote(state_name(s))} [shape={shape}];")
    for a, label, b in lts.sorted_transitions():
        lines.append(f"  {_quote(state_name(a))} -> {_quote(state_name(b))} [label={_quote(str(label))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

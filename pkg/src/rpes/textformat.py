"""The line-oriented ``.rpes`` document format and the compact trace syntax.

A document looks like::

    # comments run to end of line
    rpes E2
    events a b
    label a act        # optional; default action is the event id
    cause x y          # x < y; closed transitively
    conflict x y       # symmetrized
    reversible a
    revcause e u       # e is a reverse cause of undoing u
    prevent b a        # b prevents undoing a
    init               # initial configuration, may be empty or omitted

A trace is written as steps separated by ``;``.  Each step is
``forward|reverse`` with comma-separated ids; either side may be empty and
a step without ``|`` is purely forward, so ``a,b;|a`` executes a and b
and then undoes a.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .kernel import Rpes, RpesError, check_token, validate_rpes
from .stepsem import Step


class ParseError(RpesError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


_PAIR_DIRECTIVES = {
    "cause": "causality",
    "conflict": "conflict",
    "revcause": "reverse_causality",
    "prevent": "prevention",
}


def parse_rpes(text: str, validate: bool = True) -> Rpes:
    """Parse a document into a normalized :class:`Rpes`.

    With ``validate`` set (the default) the axioms are checked and a
    :class:`~rpes.kernel.ValidationError` is raised if any fails.
    """
    name = "rpes"
    seen_header = False
    events: list[str] = []
    labels: dict[str, str] = {}
    pairs: dict[str, list[tuple[str, str]]] = {k: [] for k in _PAIR_DIRECTIVES.values()}
    reversible: list[str] = []
    initial: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *args = line.split()
        for a in args:
            try:
                check_token(a, "identifier")
            except RpesError as exc:
                raise ParseError(lineno, str(exc)) from None
        if word == "rpes":
            if seen_header or len(args) != 1:
                raise ParseError(lineno, "expected a single 'rpes <name>' header")
            name, seen_header = args[0], True
        elif word == "events":
            dup = sorted({a for a in args if a in events or args.count(a) > 1})
            if dup:
                raise ParseError(lineno, f"duplicate event(s): {', '.join(dup)}")
            events.extend(args)
        elif word == "label":
            if len(args) != 2:
                raise ParseError(lineno, "expected 'label <event> <action>'")
            labels[args[0]] = args[1]
        elif word in _PAIR_DIRECTIVES:
            if len(args) != 2:
                raise ParseError(lineno, f"expected '{word} <x> <y>'")
            pairs[_PAIR_DIRECTIVES[word]].append((args[0], args[1]))
        elif word == "reversible":
            reversible.extend(args)
        elif word == "init":
            initial.extend(args)
        else:
            raise ParseError(lineno, f"unknown directive {word!r}")
    r = Rpes.build(
        events,
        labeling=labels,
        reversible=reversible,
        initial=initial,
        name=name,
        **pairs,
    )
    if validate:
        validate_rpes(r).raise_if_invalid()
    return r


def covering_pairs(order: Iterable[tuple[str, str]]) -> list[tuple[str, str]]:
    """Transitive reduction of a strict partial order, sorted."""
    order = set(order)
    succ: dict[str, set[str]] = {}
    for x, y in order:
        succ.setdefault(x, set()).add(y)
    return sorted(
        (x, y)
        for x, y in order
        if not any((z, y) in order for z in succ.get(x, ()) if z != y)
    )


def serialize_rpes(r: Rpes) -> str:
    lines = [f"rpes {r.name}", " ".join(["events", *sorted(r.events)])]
    lines += [f"label {e} {a}" for e, a in sorted(r.labeling.items()) if a != e]
    lines += [f"cause {x} {y}" for x, y in covering_pairs(r.causality)]
    lines += [f"conflict {x} {y}" for x, y in sorted(r.conflict) if x < y]
    lines.append(" ".join(["reversible", *sorted(r.reversible)]))
    lines += [f"revcause {e} {u}" for e, u in sorted(r.reverse_causality) if e != u]
    lines += [f"prevent {e} {u}" for e, u in sorted(r.prevention)]
    lines.append(" ".join(["init", *sorted(r.initial)]))
    return "\n".join(lines) + "\n"


def _ids(text: str) -> frozenset[str]:
    return frozenset(check_token(x.strip()) for x in text.split(",") if x.strip())


def parse_config(text: str) -> frozenset[str]:
    """``a,b`` or ``{a,b}``; empty text or ``{}`` is the empty configuration."""
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    return _ids(text)


def parse_step(text: str) -> Step:
    fwd, bar, rev = text.partition("|")
    return Step(_ids(fwd), _ids(rev) if bar else frozenset())


def parse_trace(text: str) -> tuple[Step, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(parse_step(part) for part in text.split(";"))


def format_trace(t: Sequence[Step]) -> str:
    return ";".join(str(s) for s in t)


FIXTURES = ("e0", "e1", "e2", "e3", "e4")


def fixture_text(name: str) -> str:
    from importlib.resources import files

    return (files("rpes") / "fixtures" / f"{name}.rpes").read_text(encoding="utf-8")


def load_fixture(name: str) -> Rpes:
    """One of the bundled example structures ``e0`` ... ``e4``."""
    return parse_rpes(fixture_text(name))

"""Command-line interface.

Exit status is 0 on success, 1 when the answer is negative (not valid, not
bisimilar, not a trace, audit failed) and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .audit import audit_semantics
from .dot import export_dot
from .equiv import check_bisimulation, check_isomorphism
from .generate import MODES, GenParams, gen_rpes
from .kernel import RpesError, is_causal, is_cause_respecting, validate_rpes
from .residual import build_te, remove_trace
from .stepsem import (
    NotEnabledError,
    build_tc,
    config_key,
    enumerate_steps,
    format_config,
    forwards_reachable_configs,
    reachable_configs,
    sorted_steps,
    step_label,
    validate_trace,
)
from .textformat import parse_config, parse_rpes, parse_trace, serialize_rpes


def _load(path: str, validate: bool = True):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_rpes(text, validate=validate)


def _flag(b: bool) -> str:
    return "true" if b else "false"


def _system(r, which: str):
    return build_tc(r) if which == "tc" else build_te(r)


def _write_dot(lts, dest: Optional[str], out) -> None:
    if dest is None:
        out.write(lts.to_text())
        return
    text = export_dot(lts)
    if dest == "-":
        out.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


def cmd_validate(args, out) -> int:
    report = validate_rpes(_load(args.file, validate=False))
    if report.valid:
        out.write("valid\n")
        return 0
    out.write("invalid\n")
    for v in report.violations:
        out.write(f"{v.axiom}: {v.message}\n")
    return 1


def cmd_classify(args, out) -> int:
    r = _load(args.file)
    out.write(f"cause-respecting: {_flag(is_cause_respecting(r))}\n")
    out.write(f"causal: {_flag(is_causal(r))}\n")
    return 0


def cmd_configs(args, out) -> int:
    r = _load(args.file)
    configs = forwards_reachable_configs(r) if args.forward_only else reachable_configs(r)
    for c in sorted(configs, key=config_key):
        out.write(format_config(c) + "\n")
    return 0


def cmd_steps(args, out) -> int:
    r = _load(args.file)
    c = parse_config(args.at)
    if not c <= r.events or not r.conflict_free(c):
        raise RpesError(f"{format_config(c)} is not a conflict-free set of events")
    for s in sorted_steps(enumerate_steps(r, c, args.max_step)):
        out.write(f"{s} {step_label(r, s)}\n")
    return 0


def cmd_tc(args, out) -> int:
    _write_dot(build_tc(_load(args.file)), args.dot, out)
    return 0


def cmd_te(args, out) -> int:
    _write_dot(build_te(_load(args.file)), args.dot, out)
    return 0


def cmd_residual(args, out) -> int:
    r = _load(args.file)
    out.write(serialize_rpes(remove_trace(r, parse_trace(args.trace))))
    return 0


def cmd_trace(args, out) -> int:
    r = _load(args.file)
    for c in validate_trace(r, parse_trace(args.trace)):
        out.write(format_config(c) + "\n")
    return 0


def _pair(args):
    r1 = _load(args.file)
    if args.file2 is None:
        return build_tc(r1), build_te(r1)
    return _system(r1, args.system), _system(_load(args.file2), args.system)


def cmd_bisim(args, out) -> int:
    l1, l2 = _pair(args)
    result = check_bisimulation(l1, l2)
    out.write(f"bisimilar: {_flag(result.bisimilar)}\n")
    if not result.bisimilar:
        out.write(f"counterexample: {result.counterexample}\n")
        return 1
    return 0


def cmd_iso(args, out) -> int:
    l1, l2 = _pair(args)
    result = check_isomorphism(l1, l2)
    out.write(f"isomorphic: {_flag(result.isomorphic)}\n")
    return 0 if result.isomorphic else 1


def cmd_audit(args, out) -> int:
    report = audit_semantics(_load(args.file), args.max_len, args.max_step, args.exhaustive)
    out.write(report.to_text())
    return 0 if report.ok else 1


def cmd_gen(args, out) -> int:
    params = GenParams(
        num_events=args.events,
        mode=args.mode,
        seed=args.seed,
        causality_density=args.causality_density,
        conflict_density=args.conflict_density,
        reversible_prob=args.reversible_prob,
        prevention_density=args.prevention_density,
        extra_revcause_density=args.extra_revcause_density,
        label_alphabet=args.labels,
        init_prob=args.init_prob,
    )
    out.write(serialize_rpes(gen_rpes(params)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rpes", description="Reversible prime event structure toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the axioms and list every violation")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="report cause-respecting / causal")
    p.add_argument("file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("configs", help="list reachable configurations")
    p.add_argument("file")
    p.add_argument("--forward-only", action="store_true")
    p.set_defaults(func=cmd_configs)

    p = sub.add_parser("steps", help="list the steps enabled at a configuration")
    p.add_argument("file")
    p.add_argument("--at", required=True, help="configuration, e.g. 'a,b' or '{}'")
    p.add_argument("--max-step", type=int, default=None)
    p.set_defaults(func=cmd_steps)

    for name, func in (("tc", cmd_tc), ("te", cmd_te)):
        p = sub.add_parser(name, help=f"build the {name.upper()} transition system")
        p.add_argument("file")
        p.add_argument("--dot", metavar="OUT", help="write DOT to OUT ('-' for stdout)")
        p.set_defaults(func=func)

    p = sub.add_parser("residual", help="print the residual after a trace")
    p.add_argument("file")
    p.add_argument("trace", help="e.g. 'a,b|;|a'")
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("trace", help="print the configurations visited by a trace")
    p.add_argument("file")
    p.add_argument("trace")
    p.set_defaults(func=cmd_trace)

    for name, func in (("bisim", cmd_bisim), ("iso", cmd_iso)):
        p = sub.add_parser(name, help="compare TC with TE of one file, or two files")
        p.add_argument("file")
        p.add_argument("file2", nargs="?")
        p.add_argument("--system", choices=("tc", "te"), default="tc")
        p.set_defaults(func=func)

    p = sub.add_parser("audit", help="check the semantic properties on bounded traces")
    p.add_argument("file")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--max-step", type=int, default=None)
    p.add_argument("--exhaustive", action="store_true", help="do not deduplicate traces")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("gen", help="generate a random structure")
    p.add_argument("--events", type=int, required=True)
    p.add_argument("--mode", choices=MODES, default="cause-respecting")
    p.add_argument("--seed", type=int, required=True)
    defaults = GenParams()
    p.add_argument("--causality-density", type=float, default=defaults.causality_density)
    p.add_argument("--conflict-density", type=float, default=defaults.conflict_density)
    p.add_argument("--reversible-prob", type=float, default=defaults.reversible_prob)
    p.add_argument("--prevention-density", type=float, default=defaults.prevention_density)
    p.add_argument("--extra-revcause-density", type=float, default=defaults.extra_revcause_density)
    p.add_argument("--labels", type=int, default=0, help="size of the action alphabet (0: identity labels)")
    p.add_argument("--init-prob", type=float, default=0.0)
    p.set_defaults(func=cmd_gen)
    return parser


def cli_main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except NotEnabledError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except (RpesError, OSError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

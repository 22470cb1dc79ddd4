"""Command-line driver: ``symlin PROGRAM.an [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from .engine import AnalysisOptions, SubstStrategy, check_assertions, solve
from .frontend import ParseError, compile_source
from .interval import Mode
from .linearize import MultStrategy, TooManyForms
from .oracle import StateCapExceeded, collect
from .report import plot_intervals, to_json, to_text

log = logging.getLogger("symlin")


def _thresholds(text: str) -> tuple:
    try:
        return tuple(Fraction(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad threshold list {text!r}") from exc


def _box(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from exc
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty box {text!r}")
    return lo, hi


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="symlin",
        description="Infer variable bounds with interval analysis, linearization and symbolic constants.",
    )
    ap.add_argument("file", help="source program (.an)")
    ap.add_argument("--mult", choices=[m.value for m in MultStrategy], default=MultStrategy.SIMPLIFY.value)
    ap.add_argument("--subst", choices=[s.value for s in SubstStrategy], default=SubstStrategy.FULL_NOCONST.value)
    ap.add_argument("--combo", dest="combo", action="store_true", default=True, help="meet all transfer legs (default)")
    ap.add_argument("--no-combo", dest="combo", action="store_false")
    ap.add_argument("--reduce", type=_nonneg, default=0, metavar="N", help="reduction rounds per transfer")
    ap.add_argument("--mode", choices=[m.value for m in Mode], default=None, help="overrides the program pragma")
    ap.add_argument("--widen-delay", type=_nonneg, default=1, metavar="N")
    ap.add_argument("--thresholds", type=_thresholds, default=(), metavar="a,b,c")
    ap.add_argument("--narrow", type=_nonneg, default=1, metavar="N", help="decreasing passes")
    ap.add_argument("--format", choices=["text", "json"], default="text")
    ap.add_argument("--dump-cfg", action="store_true", help="print the control-flow graph and stop")
    ap.add_argument("--symbolic", action="store_true", help="also print symbolic bindings in text output")
    ap.add_argument("--no-linearize", dest="linearize", action="store_false", help="plain interval transfers")
    ap.add_argument("--no-trunc-refine", dest="refine_trunc", action="store_false")
    ap.add_argument("--plot", metavar="PATH", help="write an interval bar chart to PATH")
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--oracle-box", type=_box, default=None, help=argparse.SUPPRESS)
    return ap


def _dump_cfg(p) -> str:
    lines = [f"entry: {p.entry}", f"exit: {p.exit}"]
    lines += [f"{a.src} -> {a.dst}: {a.instr}" for a in p.arcs]
    lines += [f"assert at {a.point}: {a.test}" for a in p.assertions]
    return "\n".join(lines)


def _oracle_report(p, box: tuple[int, int]) -> str:
    reached = collect(p, {v: box for v in p.variables})
    lines = []
    for node in p.points:
        envs = reached[node]
        if not envs:
            lines.append(f"{node}: unreachable")
            continue
        for v in p.variables:
            vals = [rho[v.index] for rho in envs]
            lines.append(f"{node}: {v.name} in [{min(vals)},{max(vals)}] ({len(envs)} states)")
    return "\n".join(lines)


def _options(args: argparse.Namespace, mode: Mode) -> AnalysisOptions:
    return AnalysisOptions(
        mult=MultStrategy(args.mult),
        subst=SubstStrategy(args.subst),
        combo=args.combo,
        reduce_rounds=args.reduce,
        widening_delay=args.widen_delay,
        thresholds=args.thresholds,
        decreasing_passes=args.narrow,
        mode=mode,
        linearize=args.linearize,
        refine_trunc=args.refine_trunc,
    )


def run_cli(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")

    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"symlin: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return 2
    try:
        program = compile_source(text)
    except ParseError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return 2

    if args.dump_cfg:
        print(_dump_cfg(program))
        return 0
    if args.oracle_box is not None:
        try:
            print(_oracle_report(program, args.oracle_box))
        except (StateCapExceeded, ValueError) as exc:
            print(f"symlin: oracle: {exc}", file=sys.stderr)
            return 2
        return 0

    mode = Mode(args.mode) if args.mode else (program.mode or Mode.RAT)
    try:
        opts = _options(args, mode)
    except ValueError as exc:
        print(f"symlin: {exc}", file=sys.stderr)
        return 2
    try:
        analysis = solve(program, opts)
    except TooManyForms as exc:
        print(f"symlin: {exc}", file=sys.stderr)
        return 2
    verdicts = check_assertions(analysis)
    log.debug("%d iterations, %d widenings", analysis.iterations, analysis.widening_steps)

    if args.format == "json":
        print(to_json(analysis, verdicts))
    else:
        print(to_text(analysis, verdicts, show_symbolic=args.symbolic))
    if args.plot:
        plot_intervals(analysis, args.plot)
    return 0 if all(v.proved for v in verdicts) else 1


def main() -> None:
    sys.exit(run_cli())

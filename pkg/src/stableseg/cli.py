"""Command-line front end: ``stableseg analyze|construct|core|verify``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import fileio
from .constructions import greedy_stable_segmentation, mer_segmentation, two_value_stable
from .cooperative import core_description
from .errors import CapExceeded, ParseError, StableSegError, ValidationError, WrongArity
from .market import optimal_prices
from .oracle import atomize, verify
from .segmentation import average_consumer_surplus, canonicalize, seller_revenue
from .stability import failing_condition, instability_witness, is_efficient, is_saturated, is_stable

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_CAP = 5
EXIT_ARITY = 6


def _segment_lines(s) -> list[tuple[str, object]]:
    rows = []
    for a, seg in enumerate(s.segments):
        masses = " ".join(
            f"{fileio.format_number(v)}:{fileio.format_number(m)}"
            for v, m in zip(seg.coalition.market.values, seg.coalition.masses) if m
        )
        rows.append((f"segment {a} price", seg.price))
        rows.append((f"segment {a} optimal prices", optimal_prices(seg.coalition)))
        rows.append((f"segment {a} masses", masses))
    return rows


def cmd_analyze(args: argparse.Namespace) -> int:
    market = fileio.load_market(args.market)
    s = fileio.load_segmentation(args.segmentation, market)
    if args.canonical:
        s = canonicalize(s)
    k = canonicalize(s)
    stable = is_stable(s)
    rows: list[tuple[str, object]] = [("segments", len(s))]
    rows += _segment_lines(s)
    rows += [
        ("canonical", fileio.format_segmentation(k).strip().replace("\n", "; ")),
        ("efficient", is_efficient(s)),
        ("saturated", is_saturated(s)),
        ("canonical efficient", is_efficient(k)),
        ("canonical saturated", is_saturated(k)),
        ("stable", stable),
        ("failing condition", failing_condition(s)),
        ("ACS", average_consumer_surplus(s)),
        ("seller revenue", seller_revenue(s)),
    ]
    witness = None if stable else instability_witness(s)
    if witness is not None:
        w, plan = witness
        direction = "witness->input" if plan.target == s else "input->witness"
        rows.append(("witness plan", direction))
    sys.stdout.write(fileio.report_lines(rows, args.format))
    if witness is not None:
        w, plan = witness
        text = fileio.format_segmentation(w) + fileio.format_flows(plan)
        if args.witness:
            with open(args.witness, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write("# witness\n" + text)
    return EXIT_OK


def cmd_construct(args: argparse.Namespace) -> int:
    market = fileio.load_market(args.market)
    trace_lines = []
    if args.method == "mer":
        s, trace = mer_segmentation(market)
        for n, step in enumerate(trace.steps, start=1):
            exhausted = fileio.format_values([market.values[i] for i in step.exhausted])
            trace_lines.append(
                f"# step {n}: lambda={fileio.format_number(step.revenue_level)} "
                f"exhausted={exhausted} price={fileio.format_number(step.price)}"
            )
    elif args.method == "greedy":
        s = greedy_stable_segmentation(market)
    else:
        s = two_value_stable(market)
    if args.canonical:
        s = canonicalize(s)
    text = fileio.format_segmentation(s)
    if args.trace and trace_lines:
        text = "\n".join(trace_lines) + "\n" + text
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_core(args: argparse.Namespace) -> int:
    market = fileio.load_market(args.market)
    core = core_description(market)
    if args.format == "machine":
        rows = [("core", "empty" if core.is_empty else "trivial"),
                ("price", core.price),
                ("market optimal prices", core.market_optimal_prices)]
        sys.stdout.write(fileio.report_lines(rows, "machine"))
    else:
        sys.stdout.write(core.describe() + "\n")
        sys.stdout.write(fileio.report_lines(
            [("market optimal prices", core.market_optimal_prices)]))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    market = fileio.load_market(args.market)
    am = atomize(market, args.atoms)
    report = verify(am)
    rows = [
        ("atoms", report.atoms),
        ("segmentations enumerated", report.enumerated),
        ("distinct surplus vectors", report.distinct),
        ("checks performed", report.checks),
        ("violations", len(report.violations)),
        ("grid gaps", len(report.grid_gaps)),
    ]
    sys.stdout.write(fileio.report_lines(rows, args.format))
    for v in report.violations:
        sys.stdout.write(f"# violation: {v}\n")
    for g in report.grid_gaps:
        sys.stdout.write(f"# grid gap: {g}\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stableseg", description="Stable market segmentations with exact arithmetic.")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=["human", "machine"], default="human")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[fmt], help="decide stability of a segmentation")
    p.add_argument("market")
    p.add_argument("segmentation")
    p.add_argument("--canonical", action="store_true", help="canonicalize before analysis")
    p.add_argument("--witness", metavar="FILE", help="write the witness and its plan to FILE")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("construct", parents=[fmt], help="build a stable segmentation")
    p.add_argument("market")
    p.add_argument("--method", choices=["mer", "greedy", "two-value"], default="mer")
    p.add_argument("--trace", action="store_true", help="emit the construction trace as comments")
    p.add_argument("--canonical", action="store_true")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("core", parents=[fmt], help="describe the core")
    p.add_argument("market")
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("verify", parents=[fmt], help="run the brute-force oracle checks")
    p.add_argument("market")
    p.add_argument("--atoms", type=int, default=None, metavar="N")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except WrongArity as exc:
        print(f"arity error: {exc}", file=sys.stderr)
        return EXIT_ARITY
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, StableSegError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

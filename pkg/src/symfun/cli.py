"""Command-line front end.

Subcommands::

    symfun bounds    closed-form bounds (two nodes or per tree edge)
    symfun simulate  exhaustive / random protocol verification
    symfun graph     cut-set rate, star mixing and the 2-OPT ratio
    symfun codebook  dump a block codebook as ``block;codeword`` rows

Exit codes: 0 success, 1 bad input or usage, 2 property violation,
3 resource guard. Logs go to stderr; set ``SYMFUN_LOG=INFO`` (or DEBUG)
for progress messages.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .bounds import interval_bounds, threshold_complexity
from .errors import NetworkError, ProtocolError, ResourceError, SymfunError
from .funckernel import GENERAL, THRESHOLD, FunctionSpec
from .graphnet import CONVENTIONS, min_symmetric_cut_rate, two_opt_check
from .harness import (
    SubtreeScenario,
    TreeScenario,
    TwoNodeScenario,
    exhaustive_verify,
    random_verify,
)
from .network import load_network, norm_edge
from .prefixcode import build_codebook
from .treenet import TreeNetwork, edge_components
from .twonode import TwoNodeInstance, TwoNodeProtocol

log = logging.getLogger("symfun")

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(SymfunError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_function_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--threshold", type=int, metavar="THETA", help="sum-threshold function")
    g.add_argument("--interval", type=int, nargs=2, metavar=("A", "B"), help="sum-interval function")
    g.add_argument("--function-json", metavar="JSON",
                   help='function spec, e.g. \'{"kind": "general", "table": [0, 1, 0, 1]}\'')


def _add_output_args(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--format", choices=("json", "csv"), default=default)
    p.add_argument("--out", metavar="PATH", help="write data here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symfun", description="Zero-error block computation of sum functions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="closed-form lower/upper bounds")
    _add_function_args(p)
    p.add_argument("--m1", type=int)
    p.add_argument("--m2", type=int)
    p.add_argument("--tree", metavar="FILE", help="tree network JSON; one row per edge")
    _add_output_args(p, "csv")

    p = sub.add_parser("simulate", help="run and verify a protocol")
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--two-node", action="store_true")
    where.add_argument("--tree", metavar="FILE")
    where.add_argument("--graph", metavar="FILE", help="general network; use with --subtree")
    _add_function_args(p)
    p.add_argument("--m1", type=int)
    p.add_argument("--m2", type=int)
    p.add_argument("--starter", type=int, choices=(1, 2), default=1)
    p.add_argument("--root", type=int, help="tree root (default: file's root or smallest id)")
    p.add_argument("--subtree", metavar="EDGES", help='spanning tree edges, e.g. "0-1,0-2,0-3"')
    p.add_argument("-B", "--block-length", dest="B", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="all inputs (default)")
    mode.add_argument("--random", action="store_true", help="pseudorandom inputs")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for exhaustive sweeps")
    _add_output_args(p, "json")

    p = sub.add_parser("graph", help="cut-set rate vs star mixing on a graph")
    p.add_argument("network", metavar="FILE")
    _add_function_args(p)
    p.add_argument("--convention", choices=CONVENTIONS + ("both",), default="both")
    p.add_argument("--star-mix", action="store_true", help="require star mixing (complete graphs)")
    _add_output_args(p, "json")

    p = sub.add_parser("codebook", help="dump a codebook as block;codeword rows")
    p.add_argument("--k", type=int, help="effective alphabet size")
    p.add_argument("--r", type=int, help="number of ambiguous letters")
    p.add_argument("--ambiguous", help="comma-separated ambiguous letters (default 0..r-1)")
    _add_function_args(p, required=False)
    p.add_argument("--m1", type=int)
    p.add_argument("--m2", type=int)
    p.add_argument("--starter", type=int, choices=(1, 2), default=1)
    p.add_argument("-B", "--block-length", dest="B", type=int, required=True)
    p.add_argument("--out", metavar="PATH")
    return parser


def _spec(args) -> FunctionSpec:
    if args.threshold is not None:
        return FunctionSpec.threshold(args.threshold)
    if args.interval is not None:
        return FunctionSpec.interval(*args.interval)
    if args.function_json is not None:
        try:
            return FunctionSpec.from_json(args.function_json)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--function-json: {exc}") from None
    raise UsageError("a function is required (--threshold, --interval or --function-json)")


def _need_m(args) -> tuple[int, int]:
    if args.m1 is None or args.m2 is None:
        raise UsageError("--m1 and --m2 are required for two-node problems")
    return args.m1, args.m2


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _rows_to(fmt: str, rows: list[dict]) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _bound_row(label: str, rep) -> dict:
    return {"edge": label, "case": rep.case_tag or "", "fooling_size": rep.fooling_size,
            "upper_size": rep.upper_size, "lower": rep.lower_bits_per_instance,
            "upper": rep.upper_bits_per_instance, "valid": rep.valid}


def cmd_bounds(args) -> int:
    spec = _spec(args)
    if spec.kind == GENERAL:
        raise UsageError("closed-form bounds exist only for --threshold and --interval")

    def report(s_a: int, s_b: int):
        if spec.kind == THRESHOLD:
            return threshold_complexity(spec.theta, s_a, s_b)
        return interval_bounds(spec.a, spec.b, s_a, s_b)

    rows = []
    if args.tree:
        tree = TreeNetwork.from_network(load_network(args.tree))
        total = tree.max_sum()
        for e in tree.edges:
            side, _ = edge_components(tree, e)
            s_a = tree.max_sum(side)
            rows.append(_bound_row(f"{e[0]}-{e[1]}", report(s_a, total - s_a)))
    else:
        m1, m2 = _need_m(args)
        rows.append(_bound_row("1-2", report(m1, m2)))
    _emit(_rows_to(args.format, rows), args.out)
    return EXIT_OK


def _parse_edges(text: str):
    edges = []
    for item in text.split(","):
        try:
            u, v = (int(x) for x in item.strip().split("-"))
        except ValueError:
            raise UsageError(f"--subtree: cannot parse edge {item!r} (expected U-V)") from None
        edges.append(norm_edge(u, v))
    return tuple(edges)


def cmd_simulate(args) -> int:
    spec = _spec(args)
    if args.B < 1:
        raise UsageError("-B must be >= 1")
    if args.two_node:
        m1, m2 = _need_m(args)
        scenario = TwoNodeScenario(m1, m2, spec, args.starter)
    elif args.tree:
        tree = TreeNetwork.from_network(load_network(args.tree), root=args.root)
        scenario = TreeScenario(tree, spec)
    else:
        if not args.subtree:
            raise UsageError("--graph needs --subtree EDGES")
        scenario = SubtreeScenario(load_network(args.graph), _parse_edges(args.subtree), spec, args.root)
        scenario.tree()  # validate early
    if args.random:
        report = random_verify(scenario, args.B, args.trials, args.seed)
    else:
        report = exhaustive_verify(scenario, args.B, jobs=args.jobs)
    text = report.to_json() if args.format == "json" else report.to_csv()
    _emit(text, args.out)
    for e in report.edges:
        log.info("edge %s: measured %d bits, bounds [%d, %d]", e.label, e.measured,
                 e.lower_bits, e.upper_bits)
    if not report.ok:
        bad = [e.label for e in report.edges if not e.within_bounds]
        sys.stderr.write(f"symfun: verification failed: {report.decode_errors} decode errors, "
                         f"edges out of bounds: {bad or 'none'}\n")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_graph(args) -> int:
    spec = _spec(args)
    if spec.kind != THRESHOLD:
        raise UsageError("graph experiments need --threshold")
    net = load_network(args.network)
    if net.n < 2:
        raise UsageError("graph needs at least two nodes")
    if args.star_mix and not net.is_complete():
        raise UsageError("--star-mix needs a complete graph")
    conventions = CONVENTIONS if args.convention == "both" else (args.convention,)
    rows = []
    holds = True
    for conv in conventions:
        r_cut, side = min_symmetric_cut_rate(net, spec, conv)
        row = {"convention": conv, "n": net.n, "r_cut": r_cut,
               "binding_cut": " ".join(map(str, sorted(side))) if side else ""}
        if net.is_complete():
            rep = two_opt_check(net, spec, conv)
            row.update(r_ach=rep.r_ach, ratio=rep.ratio, bound=rep.bound,
                       holds=rep.holds, tight=rep.tight)
            holds = holds and rep.holds
        rows.append(row)
    _emit(_rows_to(args.format, rows), args.out)
    return EXIT_OK if holds else EXIT_VIOLATION


def cmd_codebook(args) -> int:
    if args.k is not None:
        if args.r is None:
            raise UsageError("--k needs --r")
        amb = None
        if args.ambiguous:
            amb = [int(x) for x in args.ambiguous.split(",")]
        cb = build_codebook(args.k, args.r, args.B, ambiguous=amb)
    else:
        spec = _spec(args)
        m1, m2 = _need_m(args)
        cb = TwoNodeProtocol(TwoNodeInstance(m1, m2, spec, args.B, args.starter)).codebook
    _emit(cb.dump_csv(), args.out)
    return EXIT_OK


COMMANDS = {"bounds": cmd_bounds, "simulate": cmd_simulate, "graph": cmd_graph,
            "codebook": cmd_codebook}


def _fail(code: int, exc: Exception) -> int:
    sys.stderr.write(f"symfun: error: {exc}\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get("SYMFUN_LOG", "WARNING").upper(),
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResourceError as exc:
        return _fail(EXIT_RESOURCE, exc)
    except ProtocolError as exc:
        return _fail(EXIT_VIOLATION, exc)
    except (SymfunError, NetworkError, OSError) as exc:
        return _fail(EXIT_INPUT, exc)


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface.

Exit codes: 0 certified, 2 usage error, 3 inconclusive or not applicable,
4 generator matrix over the cell budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable, Sequence

from .cache import CertificateCache, default_cache_path
from .config import RunConfig
from .induction import (
    SINK_MODES,
    CaseRecord,
    InductionReport,
    exp_bound,
    restriction_fixed_degree,
    restriction_fixed_dimension,
    small_s_verify,
    splitting_graph,
    verify_by_splitting,
)
from .secant import SecantQuery, SecantReport, secant_dim
from .statements import CapacityError, InvalidParams, StatementOutcome, evaluate_statement, parse_descriptor

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3
EXIT_CAPACITY = 4


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="field characteristic (env SPLITSECANT_PRIME)")
    common.add_argument("--seed", type=int, help="base random seed (env SPLITSECANT_SEED)")
    common.add_argument("--max-attempts", type=_positive, help="random specializations per statement")
    common.add_argument("--budget", type=_positive, help="largest generator matrix, in cells")
    common.add_argument("--unbounded", action="store_true", help="disable the cell budget")
    common.add_argument("--workers", type=_positive, default=os.cpu_count() or 1,
                        help="processes for independent cases (default: all cores)")
    common.add_argument("--format", choices=("json", "text", "dot"), default="json")
    common.add_argument("--cache", metavar="PATH", help="certificate cache file (env SPLITSECANT_CACHE)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--jsonl", metavar="PATH", help="append one record per evaluated case")

    parser = argparse.ArgumentParser(prog="splitsecant", description=(
        "Certify nondefectivity of secant varieties of completely decomposable forms "
        "by exact rank computations over a prime field."))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", parents=[common], help="dimension of one secant variety")
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("-d", type=_positive, required=True)
    p.add_argument("-s", type=_positive, required=True)

    p = sub.add_parser("statement", parents=[common], help="evaluate one statement descriptor")
    p.add_argument("descriptor", help='e.g. "A:i=0:n=3:d=3:s=const:2:t=const:0:u=const:0:v=const:0"')

    p = sub.add_parser("restriction", parents=[common], help="restriction-induction base cases")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--fixed-dim", action="store_true", help="fix n, induct on d")
    mode.add_argument("--fixed-deg", action="store_true", help="fix d, induct on n")
    p.add_argument("-n", type=_positive)
    p.add_argument("-d", type=_positive)
    p.add_argument("-l", type=_positive, required=True)
    for name in "stuv":
        p.add_argument(f"-{name}", default="const:0", help="function spec (const:, builtin:, pw:)")
    p.add_argument("--max-d", type=_positive, help="evaluate base cases up to this d only")
    p.add_argument("--max-n", type=_positive, help="evaluate base cases up to this n only")
    p.add_argument("--fail-fast", action="store_true", help="stop at the first failing case")

    p = sub.add_parser("split", parents=[common], help="splitting-graph certificate")
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("-d", type=_positive, required=True)
    p.add_argument("-s", type=_positive, required=True)
    p.add_argument("--emit-dot", metavar="PATH", nargs="?", const="",
                   help="write the splitting graph in DOT format (default name split_N_D_S.dot)")
    p.add_argument("--sink-mode", choices=SINK_MODES, default="stilde")
    p.add_argument("--direct", action="store_true", help="same as --sink-mode direct")

    p = sub.add_parser("small-s", parents=[common], help="finite sweep settling one secant order")
    p.add_argument("-s", type=_positive, required=True)
    p.add_argument("--mode", choices=("ranges", "loops"), default="ranges")
    p.add_argument("--fail-fast", action="store_true")

    p = sub.add_parser("exp-bound", parents=[common], help="exponential bound 2^(n-3) c(n, d)")
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("-d", type=_positive, required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_env(prime=args.prime, seed=args.seed, max_attempts=args.max_attempts,
                             matrix_cell_budget=args.budget, workers=args.workers,
                             output=args.format)
    if args.unbounded:
        cfg = cfg.with_(matrix_cell_budget=None)
    return cfg


class _Sinks:
    """Writes case records to the JSONL stream, if one was requested."""

    def __init__(self, path: str | None, cfg: RunConfig) -> None:
        self.path = Path(path) if path else None
        self.cfg = cfg

    def __call__(self, rec: CaseRecord) -> None:
        if self.path is None:
            return
        line = {"descriptor": rec.descriptor, "outcome": rec.outcome, "verdict": rec.verdict,
                "route": rec.route, "seed": self.cfg.seed, "prime": self.cfg.prime,
                "millis": round(rec.millis, 3)}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(line, sort_keys=True) + "\n")


def _cached_evaluator(cache: CertificateCache | None, sink: _Sinks) -> Callable:
    def evaluate(p, cfg: RunConfig) -> StatementOutcome:
        hit = cache.lookup(p.descriptor, cfg.prime, cfg.seed) if cache is not None else None
        if hit is not None and (hit.verified or hit.attempts >= cfg.max_attempts):
            out, route = hit, "cache"
        else:
            out, route = evaluate_statement(p, cfg), "rank"
            if cache is not None:
                cache.record(out)
        sink(CaseRecord(0, out.descriptor, out.verdict.value, out.to_dict(), route, out.millis))
        return out
    return evaluate


def _text_outcome(out: StatementOutcome) -> str:
    return (f"{out.descriptor}\n  verdict {out.verdict.value}: rank {out.achieved_rank} of target "
            f"{out.target} (a = {out.a_value}, ambient {out.ambient}, {out.abundancy.value}); "
            f"seed {out.seed}, prime {out.prime}, {out.attempts} attempt(s)")


def _text_secant(r: SecantReport) -> str:
    return (f"sigma_{r.s}(Split_{r.d}(P^{r.n})): {r.verdict} ({r.provenance}); "
            f"dimension {r.achieved}, expected {r.expected}")


def _text_report(r: InductionReport) -> str:
    lines = [f"{r.driver} {r.parameters}: {r.verdict.value}"]
    if r.failed_gate:
        lines.append(f"  failed gate: {r.failed_gate}")
    if r.message:
        lines.append(f"  {r.message}")
    for c in r.cases:
        lines.append(f"  [{c.key}] {c.descriptor}: {c.verdict} via {c.route} ({c.millis:.0f} ms)")
    return "\n".join(lines)


def _emit(payload: dict, text: str, cfg: RunConfig, out) -> None:
    if cfg.output == "text":
        print(text, file=out)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"splitsecant: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cache = None if args.no_cache else CertificateCache(args.cache or default_cache_path())
    sink = _Sinks(args.jsonl, cfg)
    try:
        return _dispatch(args, cfg, cache, sink, out)
    except (InvalidParams, UsageError) as exc:
        print(f"splitsecant: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"splitsecant: over budget: {exc} (raise --budget or pass --unbounded)", file=sys.stderr)
        return EXIT_CAPACITY


def _dispatch(args, cfg: RunConfig, cache, sink, out) -> int:
    if args.command == "dim":
        try:
            q = SecantQuery(args.n, args.d, args.s)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        report = secant_dim(q, cfg, evaluate=_cached_evaluator(cache, sink))
        _emit(report.to_dict(), _text_secant(report), cfg, out)
        return EXIT_OK if report.certified else EXIT_INCONCLUSIVE

    if args.command == "statement":
        p = parse_descriptor(args.descriptor)
        result = _cached_evaluator(cache, sink)(p, cfg)
        _emit(result.to_dict(), _text_outcome(result), cfg, out)
        return EXIT_OK if result.verified else EXIT_INCONCLUSIVE

    if args.command == "exp-bound":
        b = exp_bound(args.n, args.d)
        _emit(b.to_dict(), f"c({b.n},{b.d}) = {b.c}; nondefective for s <= {b.bound}", cfg, out)
        return EXIT_OK

    if args.command == "restriction":
        funcs = (args.s, args.t, args.u, args.v)
        if args.fixed_dim:
            if args.n is None:
                raise UsageError("--fixed-dim needs -n")
            report = restriction_fixed_dimension(args.n, args.l, *funcs, cfg=cfg, max_d=args.max_d,
                                                 cache=cache, on_case=sink, fail_fast=args.fail_fast)
        else:
            if args.d is None:
                raise UsageError("--fixed-deg needs -d")
            report = restriction_fixed_degree(args.d, args.l, *funcs, cfg=cfg, max_n=args.max_n,
                                              cache=cache, on_case=sink, fail_fast=args.fail_fast)
    elif args.command == "split":
        mode = "direct" if args.direct else args.sink_mode
        report = verify_by_splitting(args.n, args.d, args.s, cfg, mode, cache=cache, on_case=sink)
        if report.failed_gate is None:
            graph = splitting_graph(args.n, args.d, args.s // 2 ** (args.n - 3))
            if args.emit_dot is not None:
                target = Path(args.emit_dot or f"split_{args.n}_{args.d}_{args.s}.dot")
                target.write_text(graph.to_dot())
                report.extra["dot"] = str(target)
            if cfg.output == "dot":
                print(graph.to_dot(), end="", file=out)
                return EXIT_OK if report.verified else EXIT_INCONCLUSIVE
    else:
        report = small_s_verify(args.s, cfg, args.mode, cache=cache, on_case=sink,
                                fail_fast=args.fail_fast)
    _emit(report.to_dict(), _text_report(report), cfg, out)
    return EXIT_OK if report.verified else EXIT_INCONCLUSIVE


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))

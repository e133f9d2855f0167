"""Command-line front end: ``streamsub run|gen|verify|bench``.

Examples::

    streamsub gen cut --n 10 --seed 7 --out g.txt
    streamsub run --alg card-1pass --oracle cut:g.txt --k 3 --eps 0.1 --verify-exact
    streamsub gen costs --d 2 --n 10 --b 5 --seed 7 --out c.txt --caps-out caps.txt
    streamsub run --alg dk-1pass --oracle cut:g.txt --costs c.txt --caps caps.txt --eps 0.1
    streamsub verify --suite all --seeds 200 --sizes 4-12
    streamsub bench --alg card-1pass --kind cut --n 60 --k 8 --eps 0.5,0.2,0.1
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import oracles
from .bench import sweep, to_csv
from .errors import StreamSubError
from .harness import ALGORITHMS, RunConfig, cmd_run, dump_report, report_failed
from .verify import SUITES, run_suites

EXIT_FAIL = 1
EXIT_USAGE = 2


def _csv_list(cast):
    def parse(text):
        if text.strip() == "":
            return []
        return [cast(t) for t in text.split(",") if t.strip()]
    return parse


def _int_range(text):
    """``4-12`` or ``4,6,8``."""
    if "-" in text and "," not in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return _csv_list(int)(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streamsub", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm and emit a JSON report")
    run.add_argument("--alg", required=True, choices=ALGORITHMS)
    run.add_argument("--oracle", required=True, help="kind:path with kind in cut, coverage, table")
    run.add_argument("--k", type=int)
    run.add_argument("--eps", type=float)
    run.add_argument("--costs", help="cost matrix file (d-knapsack algorithms)")
    run.add_argument("--caps", help="capacities: comma list of rationals or a file of them")
    run.add_argument("--v", help="trusted OPT guess, or 'opt' for the exact optimum")
    run.add_argument("--m", help="trusted maximum, or 'true' to compute it by brute force")
    run.add_argument("--solver", default="exact", choices=("exact", "dg", "rdg"))
    run.add_argument("--order", default="file", choices=("file", "shuffle"))
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--grid", default="safe", choices=("safe", "paper"),
                     help="cardinality grids: safe starts at m/(1+eps), paper at m exactly")
    run.add_argument("--gamma", type=float, help="use thresholds tuned for a gamma-approximate solver")
    run.add_argument("--report", help="write the report here instead of stdout")
    run.add_argument("--verify-exact", action="store_true")

    gen = sub.add_parser("gen", help="write a seeded random instance")
    gen.add_argument("kind", choices=("cut", "coverage", "table", "costs"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="output path (stdout if omitted)")
    gen.add_argument("--p", type=float, help="edge / membership probability")
    gen.add_argument("--wmin", type=float, default=0.0)
    gen.add_argument("--wmax", type=float, default=1.0)
    gen.add_argument("--directed", action="store_true")
    gen.add_argument("--universe", type=int)
    gen.add_argument("--no-offset", action="store_true", help="tables: force f(empty) = 0")
    gen.add_argument("--d", type=int, default=1)
    gen.add_argument("--b", default="4", help="costs: upper bound and capacity (rational)")
    gen.add_argument("--caps-out", help="costs: also write the d capacities here")

    ver = sub.add_parser("verify", help="run the seeded property battery")
    ver.add_argument("--suite", default="all", choices=SUITES + ("all",))
    ver.add_argument("--seeds", type=int, default=200, help="number of seeds")
    ver.add_argument("--seed-start", type=int, default=0)
    ver.add_argument("--sizes", type=_int_range, default=list(range(4, 13)))
    ver.add_argument("--eps", type=float, default=0.1)
    ver.add_argument("--rdg-seeds", type=int, default=1000)
    ver.add_argument("--report", help="write the JSON summary here as well")

    ben = sub.add_parser("bench", help="parameter sweep to CSV")
    ben.add_argument("--alg", type=_csv_list(str), default=["card-1pass"])
    ben.add_argument("--kind", default="cut", choices=("cut", "coverage", "table"))
    ben.add_argument("--n", type=int, default=20)
    ben.add_argument("--seeds", type=int, default=1)
    ben.add_argument("--seed-start", type=int, default=0)
    ben.add_argument("--eps", type=_csv_list(float), default=[0.1])
    ben.add_argument("--k", type=_csv_list(int), default=[4])
    ben.add_argument("--d", type=_csv_list(int), default=[1])
    ben.add_argument("--b", type=_csv_list(int), default=[4])
    ben.add_argument("--solver", type=_csv_list(str), default=["exact"])
    ben.add_argument("--rdg-baseline", action="store_true")
    ben.add_argument("--verify-exact", action="store_true")
    ben.add_argument("--p", type=float)
    ben.add_argument("--directed", action="store_true")
    ben.add_argument("--out", help="CSV path (stdout if omitted)")
    return parser


def _emit(text, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _gen(args):
    if args.n < 0:
        raise StreamSubError("--n must be non-negative")
    tmp = args.out or "/dev/stdout"
    if args.kind == "cut":
        g = oracles.random_cut_graph(args.n, args.seed, p=0.5 if args.p is None else args.p,
                                     wmin=args.wmin, wmax=args.wmax, directed=args.directed)
        oracles.write_graph(g, tmp)
    elif args.kind == "coverage":
        fam = oracles.random_family(args.n, args.seed, universe=args.universe, p=0.3 if args.p is None else args.p)
        oracles.write_family(fam, tmp)
    elif args.kind == "table":
        oracles.write_table(oracles.random_table(args.n, args.seed, offset=not args.no_offset), tmp)
    else:
        b = oracles.parse_rational(args.b, "--b")
        if args.d < 1:
            raise StreamSubError("--d must be at least 1")
        oracles.write_costs(oracles.random_costs(args.d, args.n, b, args.seed), tmp)
        if args.caps_out:
            Path(args.caps_out).write_text(" ".join(str(Fraction(b)) for _ in range(args.d)) + "\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig(
                algorithm=args.alg, oracle=args.oracle, k=args.k, costs=args.costs, caps=args.caps,
                epsilon=args.eps, v=args.v, m=args.m, solver=args.solver, order=args.order,
                seed=args.seed, grid=args.grid, gamma=args.gamma, verify_exact=args.verify_exact,
            )
            report = cmd_run(cfg)
            _emit(dump_report(report), args.report)
            return EXIT_FAIL if report_failed(report) else 0
        if args.command == "gen":
            return _gen(args)
        if args.command == "verify":
            names = SUITES if args.suite == "all" else (args.suite,)
            seeds = list(range(args.seed_start, args.seed_start + args.seeds))
            summaries = run_suites(names, seeds, args.sizes, args.eps, args.rdg_seeds)
            doc = {"ok": all(s.ok for s in summaries), "suites": [s.as_dict() for s in summaries]}
            text = json.dumps(doc, indent=2) + "\n"
            sys.stdout.write(text)
            if args.report:
                Path(args.report).write_text(text)
            return 0 if doc["ok"] else EXIT_FAIL
        if args.command == "bench":
            seeds = list(range(args.seed_start, args.seed_start + args.seeds))
            gen_params = {"directed": args.directed}
            if args.p is not None:
                gen_params["p"] = args.p
            rows = sweep(
                algs=args.alg, kind=args.kind, n=args.n, seeds=seeds, eps=args.eps, ks=args.k,
                ds=args.d, bs=args.b, solvers=args.solver, rdg_baseline=args.rdg_baseline,
                verify_exact=args.verify_exact, gen_params=gen_params,
            )
            _emit(to_csv(rows, args.rdg_baseline), args.out)
            return 0
    except (StreamSubError, OSError) as exc:
        print(f"streamsub: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Instance loading, algorithm dispatch and run reports."""

from __future__ import annotations

import dataclasses
import json
import random
import time
from dataclasses import dataclass
from pathlib import Path

from . import oracles
from .cardinality import (
    card_memory_cap,
    sieve_card_known_max,
    sieve_card_known_opt,
    sieve_card_onepass,
)
from .core import Cardinality, is_feasible, make_stream
from .errors import InputError, ParameterError
from .exact import MAX_EXACT_N, exact_opt, verify_ratio
from .grid import card_guarantee, card_tau_ratio, check_epsilon, knapsack_guarantee, knapsack_tau_ratio
from .knapsack import (
    element_density,
    knapsack_memory_cap,
    sieve_dk_known_density,
    sieve_dk_known_opt,
    sieve_dk_onepass,
    standardize,
)
from .unconstrained import UnconstrainedSolver

CARD_ALGS = ("card-opt", "card-max", "card-1pass")
DK_ALGS = ("dk-opt", "dk-density", "dk-1pass")
ALGORITHMS = CARD_ALGS + DK_ALGS
ORACLE_KINDS = ("cut", "coverage", "table")


@dataclass
class RunConfig:
    algorithm: str
    oracle: str  # "kind:path"
    k: int | None = None
    costs: str | None = None
    caps: str | None = None  # comma list of rationals, or a path to a file of them
    epsilon: float | None = None
    v: str | None = None  # number, or "opt" for the exact optimum
    m: str | None = None  # number, or "true" for the exact maximum
    solver: str = "exact"
    order: str = "file"
    seed: int = 0
    grid: str = "safe"
    gamma: float | None = None
    verify_exact: bool = False

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.algorithm in CARD_ALGS and self.k is None:
            raise ParameterError(f"{self.algorithm} needs --k")
        if self.algorithm in DK_ALGS and (self.costs is None or self.caps is None):
            raise ParameterError(f"{self.algorithm} needs --costs and --caps")
        if self.algorithm in ("card-max", "card-1pass", "dk-density", "dk-1pass"):
            if self.epsilon is None:
                raise ParameterError(f"{self.algorithm} needs --eps")
            check_epsilon(self.epsilon)
        if self.algorithm in ("card-opt", "dk-opt") and self.v is None:
            raise ParameterError(f"{self.algorithm} needs the trusted guess --v (a number or 'opt')")
        if self.algorithm in ("card-max", "dk-density") and self.m is None:
            raise ParameterError(f"{self.algorithm} needs the trusted maximum --m (a number or 'true')")
        if self.order not in ("file", "shuffle"):
            raise ParameterError("--order must be 'file' or 'shuffle'")
        UnconstrainedSolver(self.solver)


def load_oracle(spec: str):
    kind, sep, path = spec.partition(":")
    if not sep or kind not in ORACLE_KINDS:
        raise ParameterError(f"--oracle must be kind:path with kind in {ORACLE_KINDS}, got {spec!r}")
    loader = {"cut": oracles.load_graph, "coverage": oracles.load_family, "table": oracles.load_table}[kind]
    return loader(path)


def parse_caps(spec: str) -> list:
    path = Path(spec)
    if "," not in spec and path.is_file():
        tokens = path.read_text().split()
        where = spec
    else:
        tokens = [t for t in spec.replace(",", " ").split()]
        where = "--caps"
    if not tokens:
        raise InputError(f"{where}: no capacities given")
    return [oracles.parse_rational(t, where) for t in tokens]


def stream_order(n: int, order: str, seed: int) -> list[int]:
    ids = list(range(n))
    if order == "shuffle":
        random.Random(seed).shuffle(ids)
    return ids


def execute(
    algorithm,
    oracle,
    *,
    k=None,
    costs=None,
    caps=None,
    epsilon=None,
    v=None,
    m=None,
    solver="exact",
    order="file",
    seed=0,
    grid="safe",
    gamma=None,
    verify_exact=False,
    config_echo=None,
) -> dict:
    """Run one algorithm on an in-memory instance and build its report."""
    n = oracle.n
    solver_obj = UnconstrainedSolver(solver, seed)
    ids = stream_order(n, order, seed)
    started = time.perf_counter()

    std = None
    if algorithm in DK_ALGS:
        std = standardize(costs, caps)
        if std.n != n:
            raise InputError(f"cost matrix covers {std.n} elements but the oracle has {n}")
        constraint = std.original_constraint()
        stream = std.elements(ids)
    else:
        constraint = Cardinality(k)
        stream = make_stream(n, None, ids)

    exact = None
    if verify_exact or v == "opt":
        if n > MAX_EXACT_N:
            raise ParameterError(f"exact verification needs n <= {MAX_EXACT_N}, instance has {n}")
        exact = exact_opt(oracle.metered(), constraint, n)
    if v == "opt":
        v = exact.opt_value
    elif v is not None:
        v = float(v)
    if m == "true":
        probe = oracle.metered()
        if std is None:
            m = max((probe.evaluate([j]) for j in range(n)), default=0.0)
        else:
            m = max((element_density(probe.evaluate([e.id]), e.costs) for e in std.elements()), default=0.0)
    elif m is not None:
        m = float(m)

    if algorithm == "card-opt":
        result = sieve_card_known_opt(stream, oracle, k, v, solver_obj, gamma=gamma)
    elif algorithm == "card-max":
        result = sieve_card_known_max(stream, oracle, k, m, epsilon, solver_obj, grid=grid, gamma=gamma)
    elif algorithm == "card-1pass":
        result = sieve_card_onepass(stream, oracle, k, epsilon, solver_obj, grid=grid, gamma=gamma)
    elif algorithm == "dk-opt":
        result = sieve_dk_known_opt(stream, oracle, std, v, solver_obj, gamma=gamma)
    elif algorithm == "dk-density":
        result = sieve_dk_known_density(stream, oracle, std, m, epsilon, solver_obj, gamma=gamma)
    else:
        result = sieve_dk_onepass(stream, oracle, std, epsilon, solver_obj, gamma=gamma)
    wall = time.perf_counter() - started

    instr = result.instrumentation
    known_guess = algorithm in ("card-opt", "dk-opt")
    gamma_wc = solver_obj.worst_case_gamma
    if std is None:
        factor = card_guarantee(card_tau_ratio(gamma), gamma_wc)
        cap = card_memory_cap(k, None if known_guess else epsilon, gamma)
    else:
        factor = knapsack_guarantee(knapsack_tau_ratio(std.d, gamma), gamma_wc, std.d)
        cap = knapsack_memory_cap(std.d, std.capacity, None if known_guess else epsilon, gamma)

    guarantee = {"factor": factor, "epsilon": None if known_guess else epsilon, "bound": None}
    if known_guess:
        if exact is not None and exact.opt_value > 0:
            alpha = v / exact.opt_value if v <= exact.opt_value else 0.0
            guarantee["bound"] = factor * alpha
    else:
        guarantee["bound"] = factor - epsilon

    checks = {}
    checks["feasible"] = "pass" if is_feasible(constraint, result.solution) else "fail"
    full = instr.elements_seen == n or (result.early_terminated and instr.elements_seen <= n)
    checks["single_pass"] = "pass" if instr.passes == 1 and full else "fail"
    checks["query_bound"] = "pass" if instr.query_bound_violations == 0 else "fail"
    checks["memory_cap"] = "pass" if instr.peak_resident_elements <= cap else "fail"
    exact_block = None
    if exact is not None:
        ratio = verify_ratio(result.value, exact, guarantee["bound"] or 0.0)
        exact_block = {
            "opt_value": exact.opt_value,
            "opt_set": list(exact.opt_set),
            "feasible_count": exact.feasible_count,
            "ratio": ratio.margin,
        }
        checks["ratio"] = "pass" if ratio.passed else "fail"
    else:
        checks["ratio"] = "skip: exact verification not requested"

    report = {
        "config": config_echo if config_echo is not None else {
            "algorithm": algorithm, "k": k, "epsilon": epsilon, "solver": solver,
            "order": order, "seed": seed, "grid": grid, "gamma": gamma,
        },
        "n": n,
        "standardized": None if std is None else {
            "d": std.d, "b": str(std.capacity), "b_prime": str(std.b_prime), "c_prime": str(std.c_prime),
        },
        "trusted_input": {"v": v, "m": m},
        "output": list(result.solution),
        "value": result.value,
        "winner": result.winner,
        "early_termination": result.early_terminated,
        "instrumentation": dataclasses.asdict(instr),
        "live_grid": [inst.exponent for inst in result.instances if inst.exponent is not None],
        "guarantee": guarantee,
        "memory_cap": cap,
        "exact": exact_block,
        "checks": checks,
        "wall_time_s": wall,
    }
    return report


def cmd_run(cfg: RunConfig) -> dict:
    cfg.validate()
    oracle = load_oracle(cfg.oracle)
    costs = caps = None
    if cfg.algorithm in DK_ALGS:
        costs = oracles.load_costs(cfg.costs)
        caps = parse_caps(cfg.caps)
    return execute(
        cfg.algorithm,
        oracle,
        k=cfg.k,
        costs=costs,
        caps=caps,
        epsilon=cfg.epsilon,
        v=cfg.v,
        m=cfg.m,
        solver=cfg.solver,
        order=cfg.order,
        seed=cfg.seed,
        grid=cfg.grid,
        gamma=cfg.gamma,
        verify_exact=cfg.verify_exact,
        config_echo=dataclasses.asdict(cfg),
    )


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def report_failed(report: dict) -> bool:
    return any(v == "fail" for v in report["checks"].values())

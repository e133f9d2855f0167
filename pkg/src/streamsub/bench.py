"""Parameter sweeps emitting one CSV row per run."""

from __future__ import annotations

import csv
import io
import itertools
from fractions import Fraction

from . import oracles
from .harness import CARD_ALGS, DK_ALGS, execute

HEADER = (
    "alg", "kind", "seed", "n", "k", "d", "b", "eps", "solver",
    "value", "opt", "ratio",
    "queries_total", "queries_per_element_max", "peak_resident", "live_instances_max",
    "elements_seen", "time_s",
)
RDG_COLUMNS = ("rdg_value", "rdg_ratio")


def generate(kind, n, seed, **params):
    """The same seeded instance ``streamsub gen <kind>`` writes for these arguments."""
    if kind == "cut":
        return oracles.random_cut_graph(
            n, seed, p=params.get("p", 0.5), wmin=params.get("wmin", 0.0),
            wmax=params.get("wmax", 1.0), directed=params.get("directed", False),
        )
    if kind == "coverage":
        return oracles.random_family(n, seed, universe=params.get("universe"), p=params.get("p", 0.3))
    if kind == "table":
        return oracles.random_table(n, seed, offset=params.get("offset", True))
    raise ValueError(f"unknown instance kind {kind!r}")


def sweep(
    algs=("card-1pass",),
    kind="cut",
    n=20,
    seeds=(0,),
    eps=(0.1,),
    ks=(4,),
    ds=(1,),
    bs=(4,),
    solvers=("exact",),
    rdg_baseline=False,
    verify_exact=False,
    gen_params=None,
):
    """Yield CSV row dicts for the cartesian product of the sweep axes."""
    gen_params = gen_params or {}
    for alg, seed, epsilon, solver in itertools.product(algs, seeds, eps, solvers):
        oracle = generate(kind, n, seed, **gen_params)
        if alg in CARD_ALGS:
            cells = [(k, None, None) for k in ks]
        elif alg in DK_ALGS:
            cells = [(None, d, b) for d, b in itertools.product(ds, bs)]
        else:
            raise ValueError(f"unknown algorithm {alg!r}")
        for k, d, b in cells:
            kwargs = dict(k=k, epsilon=epsilon, seed=seed, verify_exact=verify_exact)
            if d is not None:
                kwargs["costs"] = oracles.random_costs(d, n, b, seed)
                kwargs["caps"] = [Fraction(b)] * d
            if alg in ("card-opt", "dk-opt"):
                kwargs["v"] = "opt"
            if alg in ("card-max", "dk-density"):
                kwargs["m"] = "true"
            rep = execute(alg, oracle, solver=solver, **kwargs)
            exact = rep["exact"]
            instr = rep["instrumentation"]
            row = {
                "alg": alg, "kind": kind, "seed": seed, "n": n,
                "k": "" if k is None else k, "d": "" if d is None else d, "b": "" if b is None else b,
                "eps": "" if alg in ("card-opt", "dk-opt") else epsilon, "solver": solver,
                "value": rep["value"],
                "opt": "" if exact is None else exact["opt_value"],
                "ratio": "" if exact is None or exact["ratio"] is None else exact["ratio"],
                "queries_total": instr["oracle_queries_total"],
                "queries_per_element_max": instr["oracle_queries_per_element_max"],
                "peak_resident": instr["peak_resident_elements"],
                "live_instances_max": instr["live_instances_max"],
                "elements_seen": instr["elements_seen"],
                "time_s": f"{rep['wall_time_s']:.6f}",
            }
            if rdg_baseline:
                base = execute(alg, oracle, solver="rdg", **kwargs)
                row["rdg_value"] = base["value"]
                bex = base["exact"]
                row["rdg_ratio"] = "" if bex is None or bex["ratio"] is None else bex["ratio"]
            yield row


def to_csv(rows, rdg_baseline=False) -> str:
    buf = io.StringIO()
    header = HEADER + (RDG_COLUMNS if rdg_baseline else ())
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()

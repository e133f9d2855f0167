"""Acceptance criteria 1-10 at their stated scales and tolerances.

Ground truth here is computed independently of the package's own verify
battery: optima by itertools enumeration, knapsack loads by direct rational
sums, and query counts by an external counter.
"""

import json
import math
import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from conftest import ACCEPTANCE
from streamsub import oracles
from streamsub.cardinality import (
    card_memory_cap,
    sieve_card_known_opt,
    sieve_card_onepass,
)
from streamsub.core import SubmodularOracle, make_stream
from streamsub.harness import execute, dump_report
from streamsub.knapsack import (
    knapsack_memory_cap,
    sieve_dk_known_opt,
    sieve_dk_onepass,
    standardize,
)
from streamsub.oracles import validate_submodular
from streamsub.unconstrained import (
    UnconstrainedSolver,
    double_greedy_det,
    double_greedy_rand,
    exact_unconstrained,
)

EPS = 0.1
REL_TOL = 1e-9
EXACT = UnconstrainedSolver("exact")

CARD_INSTANCES = 510
KNAP_INSTANCES = 306
LATE_STREAMS = 200
STD_INSTANCES = 120
TABLES = 210
RDG_SEEDS = 1000


def report(num, ok, detail):
    ACCEPTANCE[num] = (ok, detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")


def at_least(value, bound, opt):
    return value >= bound * opt - REL_TOL * max(1.0, opt)


def brute_opt(oracle, n, feasible):
    return max(oracle.evaluate(S) for r in range(n + 1) for S in combinations(range(n), r) if feasible(S))


def loads(costs, S):
    return [sum((row[j] for j in S), Fraction(0)) for row in costs]


def fits(costs, caps, S):
    return all(x <= b for x, b in zip(loads(costs, S), caps))


def orders(n, seed):
    out = [list(range(n)), list(range(n - 1, -1, -1))]
    ids = list(range(n))
    random.Random(10_007 * seed + 1).shuffle(ids)
    out.append(ids)
    return out


class Counted(SubmodularOracle):
    """Forwards to another oracle and logs every evaluation in a shared list."""

    def __init__(self, inner, log):
        super().__init__()
        self.inner, self.log, self.n = inner, log, inner.n

    def _value(self, ids):
        self.log.append(ids)
        return self.inner._value(ids)


# -- batteries, run once and shared by several criteria ----------------------


def card_oracle(seed, n):
    if seed % 2 == 0:
        return oracles.random_cut_graph(n, seed, p=0.4 + 0.1 * (seed % 4), directed=seed % 4 == 2)
    table = oracles.random_table(n, seed)
    assert validate_submodular(table)
    return table


@pytest.fixture(scope="module")
def card_battery():
    runs = []
    for seed in range(CARD_INSTANCES):
        n = 4 + seed % 9
        k = 1 + (seed // 9) % 4
        f = card_oracle(seed, n)
        opt = brute_opt(f, n, lambda S: len(S) <= k)
        for order in orders(n, seed):
            stream = make_stream(n, order=order)
            log = []
            res = sieve_card_onepass(stream, Counted(f, log), k, EPS, EXACT)
            known = sieve_card_known_opt(stream, f, k, opt, EXACT) if opt > 0 else None
            runs.append(dict(seed=seed, n=n, k=k, opt=opt, res=res, known=known, logged=len(log)))
    return runs


def knap_case(seed):
    d = 1 + seed % 3
    b = 2 + (seed // 3) % 5
    n = 3 + seed % 8
    if seed % 2:
        f = oracles.random_table(n, seed, offset=False)
        assert validate_submodular(f)
    else:
        f = oracles.random_cut_graph(n, seed, p=0.5, directed=seed % 4 == 0)
    costs = oracles.random_costs(d, n, b, seed)
    return f, costs, [Fraction(b)] * d, d, b, n


@pytest.fixture(scope="module")
def knap_battery():
    runs = []
    for seed in range(KNAP_INSTANCES):
        f, costs, caps, d, b, n = knap_case(seed)
        std = standardize(costs, caps)
        opt = brute_opt(f, n, lambda S: fits(costs, caps, S))
        m = max(f.evaluate([e.id]) / float(c) for e in std.elements() for c in e.costs)
        order = orders(n, seed)[seed % 3]
        stream = std.elements(order)
        log = []
        res = sieve_dk_onepass(stream, Counted(f, log), std, EPS, EXACT)
        known = sieve_dk_known_opt(stream, f, std, opt, EXACT) if opt > 0 else None
        runs.append(dict(seed=seed, n=n, d=d, b=b, costs=costs, caps=caps, std=std, opt=opt, m=m,
                         res=res, known=known, order=order, logged=len(log), f=f))
    return runs


# -- criteria ----------------------------------------------------------------


def test_criterion_1_cardinality_ratio(card_battery):
    bound = 1 / 6 - EPS
    bad = [r for r in card_battery
           if len(r["res"].solution) > r["k"] or not at_least(r["res"].value, bound, r["opt"])]
    worst = min(r["res"].value / r["opt"] for r in card_battery if r["opt"] > 0)
    instances = len({r["seed"] for r in card_battery})
    ok = not bad and instances >= 500 and len(card_battery) >= 3 * 500
    report(1, ok, f"{instances} instances x 3 orders, worst ratio {worst:.4f} >= {bound:.4f}, failures {len(bad)}")
    assert ok, bad[:3]


def test_criterion_2_known_opt(card_battery, knap_battery):
    card = [r for r in card_battery if r["known"] is not None]
    card_bad = [r for r in card if not at_least(r["known"].value, 1 / 6, r["opt"]) or len(r["known"].solution) > r["k"]]
    knap = [r for r in knap_battery if r["known"] is not None]
    knap_bad = [r for r in knap
                if not at_least(r["known"].value, 1 / (4 * (r["d"] + 1)), r["opt"])
                or not fits(r["costs"], r["caps"], r["known"].solution)]
    wc = min(r["known"].value / r["opt"] for r in card)
    wk = min(r["known"].value / r["opt"] * 4 * (r["d"] + 1) for r in knap)
    ok = not card_bad and not knap_bad
    report(2, ok, f"{len(card)} cardinality runs (worst ratio {wc:.4f} vs 1/6), {len(knap)} knapsack runs "
                  f"(worst ratio/bound {wk:.3f}), failures {len(card_bad) + len(knap_bad)}")
    assert ok


def test_criterion_3_knapsack_ratio(knap_battery):
    bad = []
    worst = math.inf
    for r in knap_battery:
        sol = r["res"].solution
        bound = 1 / (4 * (r["d"] + 1)) - EPS
        if r["d"] == 1:
            bound = max(bound, 1 / 8 - EPS)
        if not fits(r["costs"], r["caps"], sol) or not at_least(r["res"].value, bound, r["opt"]):
            bad.append(r["seed"])
        if r["opt"] > 0:
            worst = min(worst, r["res"].value / r["opt"])
    ds = sorted({r["d"] for r in knap_battery})
    bs = sorted({r["b"] for r in knap_battery})
    ok = not bad and len(knap_battery) >= 300
    report(3, ok, f"{len(knap_battery)} instances, d in {ds}, b in {bs}, worst ratio {worst:.4f}, failures {bad[:5]}")
    assert ok


def test_criterion_4_density_bracket_and_grid(knap_battery):
    bad = []
    for r in knap_battery:
        m, opt, b = r["m"], r["opt"], float(r["std"].capacity)
        tol = REL_TOL * max(1.0, opt)
        if not m - tol <= opt <= b * m + tol:
            bad.append(("bounds", r["seed"]))
        if opt > 0:
            live = [inst.v for inst in r["res"].instances]
            if not any(opt / (1 + EPS) - tol <= v <= opt + tol for v in live):
                bad.append(("grid", r["seed"]))
    ok = not bad
    report(4, ok, f"{len(knap_battery)} standardized instances: m <= OPT <= b m and a live v in [OPT/(1+eps), OPT]; failures {bad[:5]}")
    assert ok


def test_criterion_5_memory(card_battery, knap_battery):
    over = [r["seed"] for r in card_battery if r["res"].instrumentation.peak_resident_elements > card_memory_cap(r["k"], EPS)]
    over += [r["seed"] for r in card_battery
             if r["known"] and r["known"].instrumentation.peak_resident_elements > card_memory_cap(r["k"])]
    over += [r["seed"] for r in knap_battery
             if r["res"].instrumentation.peak_resident_elements > knapsack_memory_cap(r["d"], r["std"].capacity, EPS)]
    over += [r["seed"] for r in knap_battery
             if r["known"] and r["known"].instrumentation.peak_resident_elements > knapsack_memory_cap(r["d"], r["std"].capacity)]

    # growth in 1/eps at k = 8 against k log k / eps
    k, n = 8, 120
    ratios, monotone = [], True
    for seed in range(3):
        f = oracles.random_cut_graph(n, seed, p=0.1)
        peaks = []
        for eps in (0.5, 0.2, 0.1, 0.05):
            peak = sieve_card_onepass(make_stream(n), f, k, eps, EXACT).instrumentation.peak_resident_elements
            peaks.append(peak)
            ratios.append(peak / (k * math.log(k) / eps))
        monotone &= peaks == sorted(peaks)
    spread = max(ratios) / min(ratios)
    ok = not over and monotone and spread <= 2.0
    report(5, ok, f"cap violations {len(over)}; eps sweep peak/(k ln k/eps) in [{min(ratios):.2f}, {max(ratios):.2f}], "
                  f"spread {spread:.2f} <= 2, monotone {monotone}")
    assert ok


def test_criterion_6_query_bound(card_battery, knap_battery):
    runs = [(r["res"], r["logged"]) for r in card_battery + knap_battery]
    runs += [(r["known"], None) for r in card_battery + knap_battery if r["known"]]
    bad = 0
    for res, logged in runs:
        ins = res.instrumentation
        if ins.query_bound_violations or ins.oracle_queries_per_element_max > 2 * ins.live_instances_max + 1:
            bad += 1
        if ins.oracle_queries_total != ins.init_queries + ins.stream_queries + ins.post_pass_queries:
            bad += 1
        if logged is not None and logged != ins.oracle_queries_total:
            bad += 1
    ok = bad == 0
    report(6, ok, f"{len(runs)} runs: per-element queries <= 2 live + 1, counters match an external log; failures {bad}")
    assert ok


DET_ALGS = ["card-opt", "card-max", "card-1pass", "dk-opt", "dk-density", "dk-1pass"]


def _det_config(i):
    alg = DET_ALGS[i % 6]
    n = 5 + i % 6
    seed = 1000 + i
    f = oracles.random_cut_graph(n, seed) if i % 2 else oracles.random_table(n, seed, offset=False)
    kw = dict(epsilon=[0.1, 0.3, 0.5][i % 3], solver=["exact", "dg", "rdg"][(i // 6) % 3],
              order=["file", "shuffle"][(i // 3) % 2], seed=seed, verify_exact=True)
    if alg.startswith("card"):
        kw["k"] = 1 + i % 4
    else:
        d, b = 1 + i % 3, 2 + i % 4
        kw["costs"] = oracles.random_costs(d, n, b, seed)
        kw["caps"] = [Fraction(b)] * d
    if alg.endswith("opt"):
        kw["v"] = "opt"
    if alg in ("card-max", "dk-density"):
        kw["m"] = "true"
    return alg, f, kw


def test_criterion_7_single_pass_and_determinism(card_battery, knap_battery):
    bad = []
    for r in card_battery:
        if r["res"].instrumentation.elements_seen != r["n"] or r["res"].instrumentation.passes != 1:
            bad.append(("card", r["seed"]))
    for r in knap_battery:
        if r["res"].instrumentation.elements_seen != r["n"]:
            bad.append(("dk-1pass", r["seed"]))
        known = r["known"]
        if known is None:
            continue
        seen = known.instrumentation.elements_seen
        if known.early_terminated:
            # the pass stopped right at the big element it returned
            if known.solution != (r["order"][seen - 1],):
                bad.append(("dk-opt prefix", r["seed"]))
        elif seen != r["n"]:
            bad.append(("dk-opt", r["seed"]))

    configs = 60
    for i in range(configs):
        alg, f, kw = _det_config(i)
        texts = []
        for _ in range(2):
            rep = execute(alg, f, **kw)
            rep.pop("wall_time_s")
            texts.append(dump_report(rep))
        if texts[0] != texts[1]:
            bad.append(("determinism", i))
        if json.loads(texts[0])["checks"]["single_pass"] != "pass":
            bad.append(("report single_pass", i))
    ok = not bad
    report(7, ok, f"single pass on all battery runs; {configs} configs byte-identical across reruns; failures {bad[:5]}")
    assert ok


def test_criterion_8_late_instantiation():
    checked, bad = 0, []
    for seed in range(LATE_STREAMS):
        n = 4 + seed % 9
        k = 1 + seed % 4
        f = card_oracle(seed + 5000, n)
        stream = make_stream(n, order=orders(n, seed)[seed % 3])
        for inst in sieve_card_onepass(stream, f, k, EPS, EXACT).instances:
            ref = sieve_card_known_opt(stream, f, k, inst.v, EXACT).instances[0]
            checked += 1
            if (ref.S1.ids, ref.S2.ids) != (inst.S1.ids, inst.S2.ids):
                bad.append(("card", seed, inst.exponent))

    for seed in range(LATE_STREAMS):
        f, costs, caps, d, b, n = knap_case(seed + 7000)
        std = standardize(costs, caps)
        order = orders(n, seed)[seed % 3]
        stream = std.elements(order)
        pos = {u: p for p, u in enumerate(order)}
        for inst in sieve_dk_onepass(stream, f, std, EPS, EXACT).instances:
            ref = sieve_dk_known_opt(stream, f, std, inst.v, EXACT)
            r = ref.instances[0]
            checked += 1
            if not ref.early_terminated:
                same = (r.S1.ids, r.S2.ids) == (inst.S1.ids, inst.S2.ids) and inst.big is None
            else:
                stop = ref.instrumentation.elements_seen - 1
                before = ([u for u in inst.S1.ids if pos[u] < stop], [u for u in inst.S2.ids if pos[u] < stop])
                same = (before == (r.S1.ids, r.S2.ids) and inst.big is not None
                        and inst.big_value >= inst.tau * (1 - 1e-12))
            if not same:
                bad.append(("knapsack", seed, inst.exponent))
    ok = not bad and checked > 0
    report(8, ok, f"{2 * LATE_STREAMS} streams, {checked} surviving instances match fresh single-guess runs; failures {bad[:5]}")
    assert ok


def test_criterion_9_standardization():
    bad, subsets = [], 0
    for seed in range(STD_INSTANCES):
        rng = random.Random(90_000 + seed)
        d, n = rng.randint(1, 3), rng.randint(1, 10)
        caps = [Fraction(rng.randint(1, 60), rng.randint(1, 6)) for _ in range(d)]
        costs = [[Fraction(rng.randint(1, max(1, math.floor(b * q))), q) for q in (rng.randint(1, 6) for _ in range(n))]
                 for b in caps]
        costs = [[min(c, b) for c in row] for row, b in zip(costs, caps)]
        std = standardize(costs, caps)
        new_caps = [std.capacity] * d
        if not all(1 <= c <= std.capacity for row in std.costs for c in row):
            bad.append(("range", seed))
        for mask in range(1 << n):
            S = [j for j in range(n) if mask >> j & 1]
            subsets += 1
            if fits(costs, caps, S) != fits(std.costs, new_caps, S):
                bad.append(("equivalence", seed, mask))
                break
    ok = not bad
    report(9, ok, f"{STD_INSTANCES} instances, {subsets} subsets checked in exact arithmetic; failures {bad[:5]}")
    assert ok


def test_criterion_10_unconstrained():
    bad = []
    worst_dg, worst_rdg = math.inf, math.inf
    for seed in range(TABLES):
        n = 4 + seed % 9
        t = oracles.random_table(n, 20_000 + seed)
        assert validate_submodular(t)
        ground = list(range(n))
        ids, best = exact_unconstrained(t, ground)
        if best != float(np.max(t.values)) or t.evaluate(ids) != best:
            bad.append(("exact", seed))
        dg = t.evaluate(double_greedy_det(t, ground))
        if not at_least(dg, 1 / 3, best):
            bad.append(("dg", seed))
        mean = sum(t.evaluate(double_greedy_rand(t, ground, r)) for r in range(RDG_SEEDS)) / RDG_SEEDS
        if mean < 0.45 * best:
            bad.append(("rdg", seed))
        if best > 0:
            worst_dg, worst_rdg = min(worst_dg, dg / best), min(worst_rdg, mean / best)
    ok = not bad
    report(10, ok, f"{TABLES} tables: worst dg/exact {worst_dg:.3f} >= 1/3, worst rdg mean/exact "
                   f"{worst_rdg:.3f} >= 0.45 over {RDG_SEEDS} seeds; failures {bad[:5]}")
    assert ok

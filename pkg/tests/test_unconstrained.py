import pytest
from hypothesis import given, settings, strategies as st

from streamsub import oracles
from streamsub.errors import ParameterError, SizeError
from streamsub.oracles import CutOracle, TableOracle
from streamsub.unconstrained import (
    UnconstrainedSolver,
    double_greedy_det,
    double_greedy_rand,
    exact_unconstrained,
)

A, B, C = 0, 1, 2


def test_exact_p3_tie_goes_to_smallest_mask(p3):
    # {b} is mask 0b010 = 2, {a, c} is mask 0b101 = 5
    assert exact_unconstrained(p3, [A, B, C]) == ((B,), 2)


def test_exact_empty_and_singleton():
    t = TableOracle(1, [0.5, 1.0])
    assert exact_unconstrained(t, []) == ((), 0.5)
    assert exact_unconstrained(t, [0]) == ((0,), 1.0)
    flat = TableOracle(1, [1.0, 1.0])
    assert exact_unconstrained(flat, [0]) == ((), 1.0)


def test_exact_size_limit():
    with pytest.raises(SizeError):
        exact_unconstrained(CutOracle(23), range(23))


def test_det_single_edge():
    g = CutOracle(2, [(0, 1, 1.0)])
    out = double_greedy_det(g, [0, 1])
    assert out == (0,) and g.evaluate(out) == 1


def test_modular_gives_full_set():
    t = TableOracle(3, [sum((m >> i & 1) * (i + 1) for i in range(3)) for m in range(8)])
    assert double_greedy_det(t, [0, 1, 2]) == (0, 1, 2)
    for seed in range(20):
        assert double_greedy_rand(t, [0, 1, 2], seed) == (0, 1, 2)


def test_empty_ground(p3):
    assert double_greedy_det(p3, []) == ()
    assert double_greedy_rand(p3, [], 1) == ()


def test_rand_is_seeded():
    t = oracles.random_table(8, 4)
    assert double_greedy_rand(t, range(8), 11) == double_greedy_rand(t, range(8), 11)


def test_rand_mean_on_cut_tables():
    for seed in range(5):
        g = oracles.random_cut_graph(8, seed)
        _, opt = exact_unconstrained(g, range(8))
        mean = sum(g.evaluate(double_greedy_rand(g, range(8), r)) for r in range(1000)) / 1000
        assert mean >= 0.45 * opt


def test_solver_kinds(p3):
    assert UnconstrainedSolver("exact").gamma == 1
    assert UnconstrainedSolver("dg").gamma == pytest.approx(1 / 3)
    rdg = UnconstrainedSolver("rdg", 3)
    assert rdg.gamma == 0.5 and rdg.worst_case_gamma == 0
    ids, value = rdg(p3, [A, B, C])
    assert set(ids) <= {A, B, C} and value == p3.evaluate(ids)
    with pytest.raises(ParameterError):
        UnconstrainedSolver("greedy")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 9), st.integers(0, 100_000))
def test_det_bounds_and_subset(n, seed):
    t = oracles.random_table(n, seed)
    ground = list(range(n))
    _, opt = exact_unconstrained(t, ground)
    out = double_greedy_det(t, ground)
    assert set(out) <= set(ground)
    assert opt + 1e-12 >= t.evaluate(out) >= opt / 3 - 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 100_000))
def test_det_relabel_invariance(n, seed):
    """Shifting ids by a constant keeps the iteration order and the answer."""
    g = oracles.random_cut_graph(n, seed)
    shifted = CutOracle(n + 3, [(u + 3, v + 3, w) for u, v, w in g.edges])
    out = double_greedy_det(g, range(n))
    assert tuple(u + 3 for u in out) == double_greedy_det(shifted, range(3, n + 3))

from fractions import Fraction

import pytest

from streamsub.core import (
    CandidateSet,
    Cardinality,
    DKnapsack,
    GroundElement,
    at_least,
    is_feasible,
    make_stream,
    marginal,
    pick_best,
    stream_drive,
)
from streamsub.errors import ContractError, InputError, ParameterError, StreamError

A, B, C = 0, 1, 2


def _set(oracle, ids):
    s = CandidateSet(oracle.evaluate(()))
    for u in ids:
        s.add(GroundElement(u), oracle.evaluate(list(s.ids) + [u]))
    return s


def test_marginal_examples(p3):
    assert marginal(p3, B, _set(p3, [A])) == 0
    assert marginal(p3, C, _set(p3, [A])) == 1
    for u in range(3):
        assert marginal(p3, u, _set(p3, [])) == p3.evaluate([u])


def test_marginal_rejects_member(p3):
    with pytest.raises(ContractError):
        marginal(p3, A, _set(p3, [A]))


def test_evaluate_counts_and_range(p3):
    q = p3.metered()
    q.evaluate([A])
    q.evaluate([A, B])
    assert q.query_count == 2
    with pytest.raises(InputError):
        q.evaluate([5])


def test_is_feasible_examples():
    assert not is_feasible(Cardinality(1), [A], B)
    knap = DKnapsack([[1, 2, 1]], 4)
    assert is_feasible(knap, [A, B], C)
    assert not is_feasible(DKnapsack([[1, 2, 2]], 4), [A, B, C])
    assert is_feasible(Cardinality(1), [])
    assert is_feasible(knap, [])


def test_knapsack_is_exact_rational():
    knap = DKnapsack([[Fraction(1, 3)] * 3], 1)
    assert is_feasible(knap, [0, 1, 2])
    assert knap.load([0, 1, 2]) == (Fraction(1),)


def test_constraint_validation():
    with pytest.raises(ParameterError):
        Cardinality(-1)
    with pytest.raises((ParameterError, InputError)):
        DKnapsack([[1, 2], [1]], [3, 3])


def test_threshold_guard_is_inclusive():
    assert at_least(1.0, 1.0)
    assert at_least(1.0 - 1e-14, 1.0)
    assert not at_least(0.999, 1.0)


def test_pick_best_first_maximum():
    cands = [("x", (0,), 1.0), ("y", (1,), 2.0), ("z", (2,), 2.0)]
    assert pick_best(cands)[0] == "y"
    assert pick_best([]) is None


class _Echo:
    """Minimal algorithm: records ids, optionally stops after a given count."""

    def __init__(self, oracle, stop_after=None):
        self.oracle = oracle
        self.stop_after = stop_after
        self.seen = []

    live_instances = 1

    def resident(self):
        return len(self.seen)

    def start(self):
        pass

    def step(self, elem):
        self.seen.append(elem.id)
        return self.stop_after is None or len(self.seen) < self.stop_after

    def finish(self):
        from streamsub.core import Outcome
        return Outcome(tuple(self.seen), 0.0, winner="echo")


def test_stream_drive_counts(p3):
    outcome, instr = stream_drive(make_stream(3), _Echo(p3))
    assert instr.elements_seen == 3 and instr.passes == 1
    _, instr = stream_drive([], _Echo(p3))
    assert instr.elements_seen == 0


def test_stream_drive_early_stop(p3):
    _, instr = stream_drive(make_stream(3), _Echo(p3, stop_after=2))
    assert instr.elements_seen == 2


def test_stream_drive_rejects_duplicates(p3):
    with pytest.raises(StreamError):
        stream_drive([GroundElement(0), GroundElement(0)], _Echo(p3))


def test_make_stream_order_and_costs():
    s = make_stream(3, [[1, 2, 3]], order=[2, 0, 1])
    assert [e.id for e in s] == [2, 0, 1]
    assert s[0].costs == (3,)

"""Ground elements, metered oracles, constraints and the one-pass stream driver."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ContractError, InputError, ParameterError, StreamError

# Relative slack applied to every float threshold comparison (inclusive side).
THRESHOLD_GUARD = 1e-12


def at_least(x: float, threshold: float) -> bool:
    return x >= threshold - THRESHOLD_GUARD * abs(threshold)


@dataclass(frozen=True)
class GroundElement:
    """One stream item: a dense integer id plus its per-dimension costs."""

    id: int
    costs: tuple = ()


class SubmodularOracle:
    """Value oracle for a non-negative set function over ids ``0..n-1``.

    Subclasses implement ``_value``.  ``evaluate`` is the only public way to
    query the function and it bumps ``query_count`` by one per call.
    """

    n: int = 0

    def __init__(self):
        self.query_count = 0

    def evaluate(self, ids: Iterable[int]) -> float:
        s = frozenset(ids)
        if s and (min(s) < 0 or max(s) >= self.n):
            raise InputError(f"element id out of range 0..{self.n - 1}: {sorted(s)}")
        self.query_count += 1
        return self._value(s)

    def _value(self, ids: frozenset) -> float:
        raise NotImplementedError

    def metered(self) -> "SubmodularOracle":
        """Return a view sharing this oracle's data but with a fresh counter."""
        twin = copy.copy(self)
        twin.query_count = 0
        return twin


# -- constraints -------------------------------------------------------------


@dataclass(frozen=True)
class Cardinality:
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ParameterError(f"cardinality k must be a positive integer, got {self.k!r}")


class DKnapsack:
    """``d`` packing constraints ``C x_S <= b`` with exact rational data.

    ``capacity`` is either one rational shared by all rows (the standardized
    form) or a sequence of ``d`` rationals.
    """

    def __init__(self, costs: Sequence[Sequence], capacity):
        rows = [tuple(Fraction(c) for c in row) for row in costs]
        if not rows:
            raise InputError("d-knapsack needs at least one cost row")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise InputError("cost rows have different lengths")
        if isinstance(capacity, (list, tuple)):
            caps = tuple(Fraction(c) for c in capacity)
            if len(caps) != len(rows):
                raise InputError(
                    f"capacity vector has {len(caps)} entries but there are {len(rows)} cost rows"
                )
        else:
            caps = (Fraction(capacity),) * len(rows)
        self.costs = tuple(rows)
        self.caps = caps
        self._scaled = None

    @property
    def d(self) -> int:
        return len(self.costs)

    @property
    def n(self) -> int:
        return len(self.costs[0])

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.costs)

    def load(self, ids: Iterable[int]) -> tuple:
        ids = list(ids)
        for j in ids:
            if not 0 <= j < self.n:
                raise InputError(f"element id {j} out of range 0..{self.n - 1}")
        return tuple(sum((row[j] for j in ids), Fraction(0)) for row in self.costs)

    def scaled_integers(self):
        """Costs and capacities multiplied by a common denominator (exact ints)."""
        if self._scaled is None:
            den = 1
            for x in (*self.caps, *(c for row in self.costs for c in row)):
                den = den * x.denominator // math.gcd(den, x.denominator)
            costs = tuple(tuple(int(c * den) for c in row) for row in self.costs)
            caps = tuple(int(c * den) for c in self.caps)
            self._scaled = (costs, caps)
        return self._scaled


def is_feasible(constraint, S: Iterable[int], u: int | None = None) -> bool:
    members = set(S)
    if u is not None:
        members.add(u)
    if isinstance(constraint, Cardinality):
        return len(members) <= constraint.k
    if isinstance(constraint, DKnapsack):
        load = constraint.load(members)
        return all(x <= cap for x, cap in zip(load, constraint.caps))
    raise InputError(f"unknown constraint type {type(constraint).__name__}")


# -- candidate sets and marginals --------------------------------------------


class CandidateSet:
    """Insertion-ordered id list with cached f-value and per-dimension load."""

    __slots__ = ("ids", "_members", "value", "costs")

    def __init__(self, value: float, dims: int = 0):
        self.ids: list[int] = []
        self._members: set[int] = set()
        self.value = value
        self.costs = [Fraction(0)] * dims

    def __len__(self):
        return len(self.ids)

    def __contains__(self, u):
        return u in self._members

    def __iter__(self):
        return iter(self.ids)

    def fits(self, elem: GroundElement, capacity) -> bool:
        return all(load + c <= capacity for load, c in zip(self.costs, elem.costs))

    def add(self, elem: GroundElement, new_value: float) -> None:
        self.ids.append(elem.id)
        self._members.add(elem.id)
        self.value = new_value
        if self.costs:
            self.costs = [load + c for load, c in zip(self.costs, elem.costs)]

    def __repr__(self):
        return f"CandidateSet({self.ids}, value={self.value!r})"


def probe(oracle: SubmodularOracle, u: int, S: CandidateSet) -> tuple[float, float]:
    """Return ``(f(u|S), f(S+u))`` using exactly one oracle query."""
    if u in S:
        raise ContractError(f"element {u} is already in the candidate set")
    with_u = oracle.evaluate([*S.ids, u])
    return with_u - S.value, with_u


def marginal(oracle: SubmodularOracle, u: int, S: CandidateSet) -> float:
    return probe(oracle, u, S)[0]


def pick_best(candidates):
    """First maximum of ``(label, ids, value)`` triples; ``None`` if empty."""
    best = None
    for cand in candidates:
        if best is None or cand[2] > best[2]:
            best = cand
    return best


# -- instrumentation and the driver ------------------------------------------


@dataclass
class Instrumentation:
    oracle_queries_total: int = 0
    oracle_queries_per_element_max: int = 0
    peak_resident_elements: int = 0
    passes: int = 0
    elements_seen: int = 0
    init_queries: int = 0
    stream_queries: int = 0
    post_pass_queries: int = 0
    live_instances_max: int = 0
    # elements whose query count exceeded 2 * live_instances + 1
    query_bound_violations: int = 0


@dataclass
class Outcome:
    solution: tuple
    value: float
    early_terminated: bool = False
    winner: str = ""


@dataclass
class SieveResult:
    solution: tuple
    value: float
    instrumentation: Instrumentation
    instances: list = field(default_factory=list)
    early_terminated: bool = False
    winner: str = ""


def stream_drive(source: Iterable[GroundElement], algorithm):
    """Feed ``source`` through ``algorithm`` once and account for its work.

    ``algorithm`` must expose ``oracle``, ``start()``, ``step(elem) -> bool``
    (False stops the pass), ``finish() -> Outcome``, ``resident() -> int``
    and ``live_instances``.
    """
    oracle = algorithm.oracle
    instr = Instrumentation(passes=1)
    base = oracle.query_count
    algorithm.start()
    instr.init_queries = oracle.query_count - base
    peak = algorithm.resident()
    seen = set()
    for elem in source:
        if elem.id in seen:
            raise StreamError(f"element {elem.id} appeared twice in the stream")
        seen.add(elem.id)
        before = oracle.query_count
        keep_going = algorithm.step(elem)
        spent = oracle.query_count - before
        live = algorithm.live_instances
        instr.elements_seen += 1
        instr.stream_queries += spent
        instr.oracle_queries_per_element_max = max(instr.oracle_queries_per_element_max, spent)
        instr.live_instances_max = max(instr.live_instances_max, live)
        if spent > 2 * live + 1:
            instr.query_bound_violations += 1
        peak = max(peak, algorithm.resident())
        if keep_going is False:
            break
    before = oracle.query_count
    outcome = algorithm.finish()
    instr.post_pass_queries = oracle.query_count - before
    instr.peak_resident_elements = max(peak, algorithm.resident())
    instr.oracle_queries_total = oracle.query_count - base
    return outcome, instr


def make_stream(n: int, costs=None, order: Sequence[int] | None = None) -> list[GroundElement]:
    """Build elements ``0..n-1`` (optionally with cost columns) in ``order``."""
    if order is None:
        order = range(n)
    out = []
    for j in order:
        if not 0 <= j < n:
            raise InputError(f"stream order names unknown element {j}")
        col = tuple(row[j] for row in costs) if costs else ()
        out.append(GroundElement(j, col))
    return out

"""Threshold sieves for ``max f(S)`` subject to ``d`` knapsack rows ``C x_S <= b``.

The sieves run on a standardized instance: every row shares one capacity
``b`` and every cost is at least 1.  Element acceptance uses density
``f(u|S) / c_{i,u}`` against ``2 tau / b`` in every row; an element that is
"big" (cost >= b/2 in some row with singleton density >= 2 tau / b) is worth
``tau`` on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    CandidateSet,
    DKnapsack,
    Outcome,
    SieveResult,
    at_least,
    make_stream,
    pick_best,
    probe,
    stream_drive,
)
from .errors import ContractError, InputError, ParameterError
from .grid import GuessGrid, check_epsilon, grid_size_bound, knapsack_tau_ratio
from .unconstrained import UnconstrainedSolver


@dataclass(frozen=True)
class StandardizedInstance:
    costs: tuple  # d rows of n Fractions, all >= 1
    capacity: Fraction
    b_prime: Fraction
    c_prime: Fraction
    original_costs: tuple
    original_caps: tuple

    @property
    def d(self) -> int:
        return len(self.costs)

    @property
    def n(self) -> int:
        return len(self.costs[0]) if self.costs else 0

    def constraint(self) -> DKnapsack:
        return DKnapsack(self.costs, self.capacity)

    def original_constraint(self) -> DKnapsack:
        return DKnapsack(self.original_costs, list(self.original_caps))

    def elements(self, order=None):
        return make_stream(self.n, self.costs, order)


def standardize(costs, caps) -> StandardizedInstance:
    """Rescale to a common capacity with all costs >= 1.

    ``b' = max_i b_i``, ``c' = min_{i,j} b' c_ij / b_i``; each ``c_ij``
    becomes ``b' c_ij / (b_i c')`` and every capacity becomes ``b' / c'``.
    The map is a positive per-row scaling, so feasibility is unchanged.
    """
    rows = [tuple(Fraction(c) for c in row) for row in costs]
    caps = tuple(Fraction(b) for b in caps)
    if not rows or len(rows) != len(caps):
        raise InputError(f"need one capacity per cost row: {len(rows)} rows, {len(caps)} capacities")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise InputError("cost rows have different lengths")
    for i, (row, b) in enumerate(zip(rows, caps)):
        if b <= 0:
            raise InputError(f"capacity b_{i} = {b} must be positive")
        for j, c in enumerate(row):
            if not 0 < c <= b:
                raise InputError(f"cost c[{i}][{j}] = {c} must lie in (0, b_{i}] = (0, {b}]")
    b_prime = max(caps)
    if n:
        c_prime = min(b_prime * c / b for row, b in zip(rows, caps) for c in row)
    else:
        c_prime = Fraction(1)
    new = tuple(tuple(b_prime * c / (b * c_prime) for c in row) for row, b in zip(rows, caps))
    return StandardizedInstance(new, b_prime / c_prime, b_prime, c_prime, tuple(rows), caps)


def element_density(f_u: float, costs) -> float:
    return max((f_u / float(c) for c in costs), default=0.0)


def density_max(oracle, elements) -> float:
    """Running maximum of ``f(u)/c_{i,u}`` over ``elements`` and rows (0 if empty)."""
    m = 0.0
    for elem in elements:
        m = max(m, element_density(oracle.evaluate([elem.id]), elem.costs))
    return m


class KnapsackInstance:
    """Sieve state for one guess ``v``: S1, S2, the post-pass S3 and a big singleton."""

    __slots__ = (
        "exponent", "v", "tau", "capacity", "threshold",
        "S1", "S2", "S3", "S3_value", "big", "big_value", "born",
    )

    def __init__(self, v, tau_ratio, capacity, d, f_empty, exponent=None, born=0):
        self.exponent = exponent
        self.v = v
        self.tau = tau_ratio * v
        self.capacity = capacity
        self.threshold = 2.0 * self.tau / float(capacity)
        self.S1 = CandidateSet(f_empty, d)
        self.S2 = CandidateSet(f_empty, d)
        self.S3 = None
        self.S3_value = None
        self.big = None
        self.big_value = None
        self.born = born

    def is_big(self, elem, f_u) -> bool:
        return any(2 * c >= self.capacity and at_least(f_u / float(c), self.threshold) for c in elem.costs)

    def offer(self, oracle, elem, f_u, cmax) -> str:
        """Return ``"big"``, ``"S1"``, ``"S2"`` or ``""`` (rejected)."""
        if self.is_big(elem, f_u):
            self.big = elem.id
            self.big_value = f_u
            return "big"
        for name in ("S1", "S2"):
            S = getattr(self, name)
            if S.fits(elem, self.capacity):
                gain, value = probe(oracle, elem.id, S)
                # density >= threshold in every row <=> against the largest cost
                if at_least(gain / cmax, self.threshold):
                    S.add(elem, value)
                    return name
        return ""

    def solve(self, oracle, solver) -> None:
        self.S3, self.S3_value = solver(oracle, self.S1.ids)

    def candidates(self):
        tag = "v" if self.exponent is None else f"i={self.exponent}"
        yield f"{tag}:S1", tuple(self.S1.ids), self.S1.value
        yield f"{tag}:S2", tuple(self.S2.ids), self.S2.value
        if self.S3 is not None:
            yield f"{tag}:S3", tuple(self.S3), self.S3_value
        if self.big is not None:
            yield f"{tag}:Sbig", (self.big,), self.big_value

    def resident(self) -> int:
        extra = len(self.S3) if self.S3 is not None else 0
        return len(self.S1) + len(self.S2) + extra + (self.big is not None)


class _KnapsackSieve:
    def __init__(self, oracle, std, solver, tau_ratio):
        self.oracle = oracle
        self.d = std.d
        self.capacity = std.capacity
        self.solver = solver
        self.tau_ratio = tau_ratio
        self.instances: dict = {}
        self.f_empty = None
        self.position = 0
        self.early = None

    @property
    def live_instances(self) -> int:
        return len(self.instances)

    def resident(self) -> int:
        return sum(inst.resident() for inst in self.instances.values())

    def start(self):
        self.f_empty = self.oracle.evaluate(())
        self._setup()

    def _setup(self):
        pass

    def _check(self, elem):
        if len(elem.costs) != self.d:
            raise InputError(f"element {elem.id} has {len(elem.costs)} costs, expected {self.d}")
        if any(c < 1 for c in elem.costs):
            raise ContractError(f"element {elem.id} has a cost below 1; standardize the instance first")

    def _spawn(self, exponents, grid):
        for i in exponents:
            self.instances[i] = KnapsackInstance(
                grid.value(i), self.tau_ratio, self.capacity, self.d, self.f_empty,
                exponent=i, born=self.position,
            )

    def step(self, elem):
        self._check(elem)
        f_u = self.oracle.evaluate([elem.id])
        self._before(elem, f_u)
        cmax = float(max(elem.costs))
        for key in sorted(self.instances):
            verdict = self.instances[key].offer(self.oracle, elem, f_u, cmax)
            if verdict == "big" and self._stop_on_big:
                self.early = (elem.id, f_u)
                self.position += 1
                return False
        self.position += 1
        return True

    _stop_on_big = False

    def _before(self, elem, f_u):
        pass

    def finish(self) -> Outcome:
        if self.early is not None:
            u, f_u = self.early
            return Outcome((u,), f_u, early_terminated=True, winner="big")
        ordered = [self.instances[key] for key in sorted(self.instances)]
        for inst in ordered:
            inst.solve(self.oracle, self.solver)
        best = pick_best(c for inst in ordered for c in inst.candidates())
        if best is None:
            return Outcome((), self.f_empty, winner="empty")
        label, ids, value = best
        return Outcome(tuple(sorted(ids)), value, winner=label)


class KnapsackKnownOpt(_KnapsackSieve):
    _stop_on_big = True

    def __init__(self, oracle, std, v, solver, tau_ratio):
        super().__init__(oracle, std, solver, tau_ratio)
        self.v = v

    def _setup(self):
        self.instances[0] = KnapsackInstance(self.v, self.tau_ratio, self.capacity, self.d, self.f_empty)


class KnapsackGridSieve(_KnapsackSieve):
    """Grid over ``[m/(1+eps), upper_factor * m]``, fixed or following the running density max."""

    def __init__(self, oracle, std, epsilon, solver, tau_ratio, upper_factor, m=None):
        super().__init__(oracle, std, solver, tau_ratio)
        self.grid = GuessGrid(epsilon)
        self.lower_factor = 1.0 / (1.0 + epsilon)
        self.upper_factor = upper_factor
        self.online = m is None
        self.m = 0.0 if m is None else m

    def _setup(self):
        if not self.online and self.m > 0:
            added, _ = self.grid.retarget(self.lower_factor * self.m, self.upper_factor * self.m)
            self._spawn(added, self.grid)

    def _before(self, elem, f_u):
        if not self.online:
            return
        self.m = max(self.m, element_density(f_u, elem.costs))
        if self.m <= 0:
            return
        added, removed = self.grid.retarget(self.lower_factor * self.m, self.upper_factor * self.m)
        for i in removed:
            del self.instances[i]
        self._spawn(added, self.grid)


def _prepare(std, solver, gamma):
    if not isinstance(std, StandardizedInstance):
        raise ContractError("knapsack sieves need a StandardizedInstance (see standardize())")
    if solver is None:
        solver = UnconstrainedSolver("exact")
    return solver, knapsack_tau_ratio(std.d, gamma)


def _result(outcome, instr, alg) -> SieveResult:
    instances = [alg.instances[key] for key in sorted(alg.instances)]
    return SieveResult(outcome.solution, outcome.value, instr, instances, outcome.early_terminated, outcome.winner)


def sieve_dk_known_opt(stream, oracle, std, v, solver=None, *, gamma=None) -> SieveResult:
    """Single instance for a trusted guess of OPT; returns early on a big element."""
    solver, c = _prepare(std, solver, gamma)
    if not v > 0:
        raise ParameterError(f"guess v must be positive, got {v}")
    alg = KnapsackKnownOpt(oracle.metered(), std, v, solver, c)
    outcome, instr = stream_drive(stream, alg)
    return _result(outcome, instr, alg)


def sieve_dk_known_density(stream, oracle, std, m, epsilon, solver=None, *, gamma=None) -> SieveResult:
    """Grid over ``[m/(1+eps), b m]`` from the trusted max density ``m``.

    ``m <= 0`` means ``f`` vanishes on every singleton; no instance is built
    and the output is the empty set.
    """
    solver, c = _prepare(std, solver, gamma)
    check_epsilon(epsilon)
    alg = KnapsackGridSieve(oracle.metered(), std, epsilon, solver, c, float(std.capacity), m=max(m, 0.0))
    outcome, instr = stream_drive(stream, alg)
    return _result(outcome, instr, alg)


def sieve_dk_onepass(stream, oracle, std, epsilon, solver=None, *, gamma=None) -> SieveResult:
    """Fully online sieve over ``[m/(1+eps), b m / (2c)]`` for the running max density ``m``."""
    solver, c = _prepare(std, solver, gamma)
    check_epsilon(epsilon)
    alg = KnapsackGridSieve(oracle.metered(), std, epsilon, solver, c, float(std.capacity) / (2.0 * c))
    outcome, instr = stream_drive(stream, alg)
    return _result(outcome, instr, alg)


def knapsack_grid_bound(d, capacity, epsilon, gamma=None) -> int:
    """Most live instances the one-pass grid can hold."""
    spread = float(capacity) * (1.0 + epsilon) / (2.0 * knapsack_tau_ratio(d, gamma))
    return grid_size_bound(epsilon, spread)


def knapsack_memory_cap(d, capacity, epsilon=None, gamma=None) -> float:
    """Closed-form cap on resident ids: ``(3b + 1)(|Q_max| + 1)``; ``3b + 1`` for a single guess."""
    per_instance = 3 * float(capacity) + 1
    if epsilon is None:
        return per_instance
    return per_instance * (knapsack_grid_bound(d, capacity, epsilon, gamma) + 1)

"""Deterministic one-pass threshold sieves for non-negative submodular
maximization under cardinality and d-knapsack constraints."""

from .cardinality import sieve_card_known_max, sieve_card_known_opt, sieve_card_onepass
from .core import (
    Cardinality,
    CandidateSet,
    DKnapsack,
    GroundElement,
    Instrumentation,
    SieveResult,
    SubmodularOracle,
    is_feasible,
    make_stream,
    marginal,
    stream_drive,
)
from .exact import ExactResult, exact_opt, verify_ratio
from .knapsack import (
    StandardizedInstance,
    density_max,
    sieve_dk_known_density,
    sieve_dk_known_opt,
    sieve_dk_onepass,
    standardize,
)
from .oracles import (
    CoverageOracle,
    CutOracle,
    TableOracle,
    load_family,
    load_graph,
    load_table,
    validate_submodular,
)
from .unconstrained import (
    UnconstrainedSolver,
    double_greedy_det,
    double_greedy_rand,
    exact_unconstrained,
)

__version__ = "0.1.0"

"""Exact loop-sequence string operations, strong-coupling coefficients and
trajectory sums for SO(N) lattice gauge theory, with a Monte Carlo oracle."""

from .loops import (
    DSLError,
    Edge,
    Loop,
    LoopError,
    LoopSequence,
    NULL_LOOP,
    NULL_SEQUENCE,
    Path,
    canonical_key,
    canonicalize,
    filling_bound,
    measures,
    nonbacktracking_core,
    parse_loop_dsl,
    plaquette,
    plaquettes_containing,
    to_dsl,
)
from .ops import (
    OperationError,
    OperationStep,
    deform,
    enumerate_first_edge,
    enumerate_full,
    iter_operations,
    merger,
    splitting,
    twisting,
)
from .coefficients import (
    CoefficientEngine,
    SeriesResult,
    catalan,
    coeff_bound,
    f_partial,
    growth_bound,
    guaranteed_regime,
    parse_fraction,
    tail_bound,
)
from .trajectories import Budget, Trajectory, TrajectorySums, enumerate_vanishing, trajectory_sum

__version__ = "0.1.0"

__all__ = [
    "DSLError", "Edge", "Loop", "LoopError", "LoopSequence", "NULL_LOOP", "NULL_SEQUENCE", "Path",
    "canonical_key", "canonicalize", "filling_bound", "measures", "nonbacktracking_core",
    "parse_loop_dsl", "plaquette", "plaquettes_containing", "to_dsl",
    "OperationError", "OperationStep", "deform", "enumerate_first_edge", "enumerate_full",
    "iter_operations", "merger", "splitting", "twisting",
    "CoefficientEngine", "SeriesResult", "catalan", "coeff_bound", "f_partial", "growth_bound",
    "guaranteed_regime", "parse_fraction", "tail_bound",
    "Budget", "Trajectory", "TrajectorySums", "enumerate_vanishing", "trajectory_sum",
]

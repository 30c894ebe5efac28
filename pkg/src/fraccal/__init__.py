"""Finite difference approximations of the Caputo derivative.

The package is organised in layers:

* :mod:`fraccal.specfun`: gamma, digamma, zeta and Mittag-Leffler functions;
* :mod:`fraccal.weights`: coefficient vectors of every scheme;
* :mod:`fraccal.approx`: applying schemes to samples, exact derivatives;
* :mod:`fraccal.solver`: time stepping for scalar equations and 2x2 systems;
* :mod:`fraccal.cli`: convergence tables from the command line.
"""

from __future__ import annotations

from fraccal.errors import (
    AccuracyError,
    DomainError,
    FraccalError,
    SchemeMismatchError,
    SingularStepError,
    SizeError,
    UnsupportedError,
)
from fraccal.weights import DEFAULT_POLICY, SchemeKind, TailPolicy, WeightVector, build_scheme
from fraccal.approx import SampledFunction, apply_scheme, estimate_order
from fraccal.solver import (
    CaputoProblem,
    SystemProblem,
    Trajectory,
    max_error,
    solve_ns1,
    solve_ns2,
    solve_ns3,
    solve_ns4,
)

__version__ = "0.1.0"

__all__ = (
    "DEFAULT_POLICY",
    "AccuracyError",
    "CaputoProblem",
    "DomainError",
    "FraccalError",
    "SampledFunction",
    "SchemeKind",
    "SchemeMismatchError",
    "SingularStepError",
    "SizeError",
    "SystemProblem",
    "TailPolicy",
    "Trajectory",
    "UnsupportedError",
    "WeightVector",
    "apply_scheme",
    "build_scheme",
    "estimate_order",
    "max_error",
    "solve_ns1",
    "solve_ns2",
    "solve_ns3",
    "solve_ns4",
)

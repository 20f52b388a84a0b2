"""Width-independent first-order solver for positive packing/covering LPs."""

from .kernel import BACKENDS, DEFAULT_BACKEND
from .instance import RawInstance, ScaledInstance, SparseNonnegMatrix, build_raw, prepare
from .solver import SolveReport, SolverParams, derive_params, solve

__all__ = [
    "BACKENDS",
    "DEFAULT_BACKEND",
    "RawInstance",
    "ScaledInstance",
    "SparseNonnegMatrix",
    "SolveReport",
    "SolverParams",
    "build_raw",
    "derive_params",
    "prepare",
    "solve",
]

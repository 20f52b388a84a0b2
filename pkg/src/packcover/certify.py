"""Weak-duality certificates for packing and covering solutions.

A nonnegative packing point ``x`` scaled down by its worst row violation is
feasible, so its objective over ``1 + violation`` lower-bounds OPT. A
covering point ``y`` scaled up by its smallest column slack is feasible, so
its objective over that slack upper-bounds OPT. No tolerances are applied
here; judging the residuals is left to callers.

Both scaled instances (``b = c = 1``) and raw instances are accepted. For a
raw instance the residuals are taken relative to ``b`` and ``c``, i.e. row
``i`` of ``Ax <= b`` contributes ``(Ax)_i / b_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NegativeInput, NoUpperBound
from .instance import RawInstance, ScaledInstance, matvec, tmatvec

__all__ = [
    "PrimalCertificate",
    "DualCertificate",
    "check_primal",
    "check_covering",
    "duality_sandwich",
]


@dataclass(frozen=True)
class PrimalCertificate:
    objective: float
    max_violation: float
    feasible_at: float
    opt_lower_bound: float


@dataclass(frozen=True)
class DualCertificate:
    objective: float
    min_slack: float
    opt_upper_bound: float | None

    @property
    def has_upper_bound(self) -> bool:
        return self.opt_upper_bound is not None


def _weights(inst: ScaledInstance | RawInstance) -> tuple[np.ndarray | None, np.ndarray | None]:
    if isinstance(inst, RawInstance):
        return inst.b, inst.c
    return None, None


def _nonneg(v, size: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (size,):
        raise DimensionMismatch(f"{name} has shape {v.shape}, expected ({size},)")
    if np.any(~(v >= 0)) or not np.all(np.isfinite(v)):
        raise NegativeInput(f"{name} must be nonnegative and finite")
    return v


def check_primal(inst: ScaledInstance | RawInstance, x) -> PrimalCertificate:
    """Objective, worst row violation and implied lower bound on OPT for ``x``."""
    x = _nonneg(x, inst.n, "x")
    b, c = _weights(inst)
    ax = matvec(inst.matrix, x)
    objective = math.fsum(x if c is None else c * x)
    load = ax if b is None else ax / b
    max_violation = float(load.max()) - 1.0 if load.size else -1.0
    excess = max(0.0, max_violation)
    return PrimalCertificate(objective, max_violation, excess, objective / (1.0 + excess))


def check_covering(inst: ScaledInstance | RawInstance, y) -> DualCertificate:
    """Objective, smallest column slack and implied upper bound on OPT for ``y``."""
    y = _nonneg(y, inst.m, "y")
    b, c = _weights(inst)
    aty = tmatvec(inst.matrix, y, compensated=True)
    objective = math.fsum(y if b is None else b * y)
    cover = aty if c is None else aty / c
    min_slack = float(cover.min())
    upper = objective / min_slack if min_slack > 0 else None
    return DualCertificate(objective, min_slack, upper)


def duality_sandwich(p: PrimalCertificate, d: DualCertificate) -> tuple[float, float]:
    """``(lower, upper)`` bracket on OPT from a pair of certificates."""
    if not d.min_slack > 0:
        raise NoUpperBound(f"covering point has min slack {d.min_slack}; no upper bound")
    return p.opt_lower_bound, d.opt_upper_bound

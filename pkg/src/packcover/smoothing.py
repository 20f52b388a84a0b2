"""Smoothed packing objective and its (truncated) gradient.

``f_alpha(x) = -<1, x> + alpha/(1+alpha) * sum_i (Ax)_i^((1+alpha)/alpha)``

Exponents like ``1/alpha`` reach the thousands for small accuracies, so every
power goes through :func:`stable_pow`, which works in the log domain and
saturates at a cap instead of overflowing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeInput, NonPositiveInput
from .instance import ScaledInstance, matvec, tmatvec

__all__ = [
    "DEFAULT_CAP",
    "SmoothingContext",
    "GradientBundle",
    "stable_pow",
    "f_alpha",
    "gradient_bundle",
    "truncate_gradient",
    "local_smoothness_check",
]

DEFAULT_CAP = 1e300


@dataclass(frozen=True)
class SmoothingContext:
    alpha: float
    saturation_cap: float = DEFAULT_CAP

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.saturation_cap > 1.0:
            raise ValueError("saturation_cap must exceed 1")

    @property
    def inv_alpha(self) -> float:
        return 1.0 / self.alpha


@dataclass(frozen=True, eq=False)
class GradientBundle:
    """Everything one gradient evaluation produces.

    ``row_powers[i] = (Ax)_i^(1/alpha)`` doubles as the dual iterate ``y``.
    """

    ax: np.ndarray
    row_powers: np.ndarray
    gradient: np.ndarray
    truncated: np.ndarray
    f_value: float
    saturated: np.ndarray

    @property
    def saturation_events(self) -> int:
        return int(self.saturated.sum())


def _pow_from_log(log_u, e, cap):
    t = np.multiply(e, log_u)
    return np.where(t >= math.log(cap), cap, np.exp(np.minimum(t, math.log(cap))))


def stable_pow(u, e, cap=DEFAULT_CAP):
    """``u**e`` as ``exp(e log u)`` with ``0 -> 0`` and saturation at ``cap``.

    Works elementwise on arrays; returns a float for scalar input.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(u_arr < 0):
        raise NegativeInput("stable_pow needs u >= 0")
    if not e > 0:
        raise ValueError(f"exponent must be positive, got {e}")
    with np.errstate(divide="ignore"):
        log_u = np.log(u_arr)
    out = np.where(u_arr > 0, _pow_from_log(np.where(u_arr > 0, log_u, 0.0), e, cap), 0.0)
    return float(out) if out.ndim == 0 else out


def _check_nonneg(x, n):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise ValueError(f"x has shape {x.shape}, expected ({n},)")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise NegativeInput("x must be finite and nonnegative")
    return x


def f_alpha(inst: ScaledInstance, ctx: SmoothingContext, x) -> float:
    x = _check_nonneg(x, inst.n)
    ax = matvec(inst.matrix, x)
    barrier = stable_pow(ax, (1.0 + ctx.alpha) / ctx.alpha, ctx.saturation_cap)
    return -math.fsum(x) + ctx.alpha / (1.0 + ctx.alpha) * math.fsum(barrier)


def truncate_gradient(g) -> np.ndarray:
    """Clamp from above at 1; the gradient of ``f_alpha`` is never below -1."""
    return np.minimum(np.asarray(g, dtype=np.float64), 1.0)


def gradient_bundle(inst: ScaledInstance, ctx: SmoothingContext, x) -> GradientBundle:
    x = _check_nonneg(x, inst.n)
    ax = matvec(inst.matrix, x)
    rp = stable_pow(ax, ctx.inv_alpha, ctx.saturation_cap)
    saturated = rp >= ctx.saturation_cap
    grad = -1.0 + tmatvec(inst.matrix, rp, compensated=True)
    f_value = -math.fsum(x) + ctx.alpha / (1.0 + ctx.alpha) * math.fsum(ax * rp)
    return GradientBundle(
        ax=ax,
        row_powers=rp,
        gradient=grad,
        truncated=truncate_gradient(grad),
        f_value=f_value,
        saturated=saturated,
    )


def local_smoothness_check(inst: ScaledInstance, ctx: SmoothingContext, x, c) -> bool:
    """Check ``f(x + Bx) - f(x) <= -alpha sum_j c_j (1 - 2 c_j) g_j T_j x_j``.

    ``B = diag(-c_j alpha T_j)``. Holds up to an additive ``1e-9 (1 + |rhs|)``.
    """
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if np.any(x <= 0):
        raise NonPositiveInput("x must be strictly positive")
    if c.shape != x.shape or np.any(c < 0) or np.any(c >= 0.5):
        raise ValueError("c must have one entry in [0, 1/2) per coordinate")
    bundle = gradient_bundle(inst, ctx, x)
    t = bundle.truncated
    stepped = x * (1.0 - c * ctx.alpha * t)
    lhs = f_alpha(inst, ctx, stepped) - bundle.f_value
    rhs = -ctx.alpha * math.fsum(c * (1.0 - 2.0 * c) * bundle.gradient * t * x)
    return bool(lhs <= rhs + 1e-9 * (1.0 + abs(rhs)))

"""Mirror map for the dual-averaging step.

``psi(x) = eta * (-<1, x> + sum_j x_j^(1-alpha) / (1-alpha))`` is concave on
the positive orthant. Its concave conjugate and the conjugate's gradient have
closed forms:

    psi*(z)      = -(eta alpha / (1-alpha)) sum_j (1 + z_j/eta)^(-(1-alpha)/alpha)
    grad psi*(z) = (1 + z/eta)^(-1/alpha)

``grad_psi`` and ``grad_psi_star`` are inverse maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, NonPositiveInput
from .smoothing import DEFAULT_CAP, _pow_from_log

__all__ = ["RegularizerContext", "psi", "grad_psi", "psi_star", "grad_psi_star"]


@dataclass(frozen=True)
class RegularizerContext:
    alpha: float
    eta: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")


def _positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(x > 0)) or not np.all(np.isfinite(x)):
        raise NonPositiveInput("x must be strictly positive and finite")
    return x


def _log_base(ctx: RegularizerContext, z) -> np.ndarray:
    """``log(1 + z/eta)``, raising if the base is not positive."""
    z = np.asarray(z, dtype=np.float64)
    ratio = z / ctx.eta
    if np.any(~(ratio > -1.0)) or not np.all(np.isfinite(z)):
        raise DomainViolation("1 + z_j/eta must be positive for every coordinate")
    return np.log1p(ratio)


def psi(ctx: RegularizerContext, x) -> float:
    x = _positive(x)
    a = ctx.alpha
    powered = _pow_from_log(np.log(x), 1.0 - a, DEFAULT_CAP)
    return ctx.eta * math.fsum(powered / (1.0 - a) - x)


def grad_psi(ctx: RegularizerContext, x) -> np.ndarray:
    """``eta (x^-alpha - 1)`` via ``expm1`` so tiny ``alpha |log x|`` keeps precision."""
    x = _positive(x)
    return ctx.eta * np.expm1(-ctx.alpha * np.log(x))


def psi_star(ctx: RegularizerContext, z) -> float:
    a = ctx.alpha
    terms = _pow_from_log(_log_base(ctx, z), -(1.0 - a) / a, DEFAULT_CAP)
    return -(ctx.eta * a / (1.0 - a)) * math.fsum(terms)


def grad_psi_star(ctx: RegularizerContext, z) -> np.ndarray:
    return _pow_from_log(_log_base(ctx, z), -1.0 / ctx.alpha, DEFAULT_CAP)

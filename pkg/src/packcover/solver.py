"""Width-independent dual averaging for scaled packing/covering LPs.

The solver minimises the smoothed objective ``f_alpha`` by dual averaging
with the mirror map from :mod:`packcover.regularizer`:

    x^(k)   = grad psi*(z^(k-1))
    z^(k)   = z^(k-1) + gamma * T(x^(k))        (T: gradient clamped at 1)
    ybar   += gamma * (A x^(k))^(1/alpha)

running while ``A_k = 1 + k gamma <= eta``. One extra primal point
``x^(K+1)`` is formed after the loop; it is the returned packing solution and
its dual contribution is part of the returned covering average.

The loop itself lives in a compiled kernel with a pure-Python fallback
(:mod:`packcover.kernel`); this module owns parameters, state and reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernel as _kernel
from .errors import (
    BadAccuracy,
    DegenerateLog,
    DomainViolation,
    IterationCapExceeded,
    NumericalFailure,
)
from .instance import ScaledInstance, check_accuracy, matvec, tmatvec
from .regularizer import RegularizerContext, grad_psi, grad_psi_star, psi_star
from .smoothing import DEFAULT_CAP, GradientBundle, SmoothingContext, gradient_bundle

__all__ = [
    "SolverParams",
    "SolverState",
    "DiagnosticRecord",
    "InvariantReport",
    "SolveReport",
    "derive_params",
    "init_state",
    "step",
    "solve",
    "gap_diagnostics",
]


@dataclass(frozen=True)
class SolverParams:
    eps: float
    alpha: float
    eta: float
    gamma: float
    a0: float
    max_iters: int

    @property
    def iteration_bound(self) -> int:
        """``ceil(eta / gamma)``, the a-priori bound on the loop count."""
        return math.ceil(self.eta / self.gamma)

    @property
    def smoothing(self) -> SmoothingContext:
        return SmoothingContext(self.alpha)

    @property
    def regularizer(self) -> RegularizerContext:
        return RegularizerContext(self.alpha, self.eta)


def derive_params(m: int, n: int, a_inf: float, eps: float) -> SolverParams:
    """Parameters of the method for an ``m x n`` scaled instance.

    ``alpha = (eps/4) / log(m n a_inf / eps)``, ``eta = 1/eps``,
    ``gamma = alpha^2 eta / 4``; the iteration guard is
    ``ceil((eta - 1)/gamma) + 2``.
    """
    try:
        eps = check_accuracy(eps)
    except BadAccuracy:
        raise
    if m < 1 or n < 1:
        raise ValueError("instance dimensions must be positive")
    if not a_inf > 0:
        raise ValueError(f"a_inf must be positive, got {a_inf}")
    log_arg = m * n * a_inf / eps
    if not log_arg > 1.0:
        raise DegenerateLog(f"m n a_inf / eps = {log_arg} must exceed 1")
    alpha = (eps / 4.0) / math.log(log_arg)
    eta = 1.0 / eps
    gamma = alpha * alpha * eta / 4.0
    max_iters = math.ceil((eta - 1.0) / gamma) + 2
    return SolverParams(eps, alpha, eta, gamma, 1.0, max_iters)


@dataclass(frozen=True, slots=True)
class DiagnosticRecord:
    """Optimality-gap snapshot after iteration ``k``.

    ``f_value`` is the upper bound ``U_k = f_alpha(x^(k+1))``;
    ``surrogate_lower`` is the dual-averaging lower bound without its
    constant ``phi(x*)`` term, and ``weighted_gap = A_k (U_k - surrogate_lower)``.
    """

    k: int
    f_value: float
    surrogate_lower: float
    weighted_gap: float
    min_z: float
    max_step_ratio: float


@dataclass(frozen=True)
class InvariantReport:
    """Debug-mode tallies of the analysis invariants.

    Violation counts come first; the extremes show how close each invariant
    came to failing (``min_c``/``max_c`` are the recovered step constants).
    """

    z_floor: int = 0
    step_ratio: int = 0
    grad_floor: int = 0
    surrogate_gap: int = 0
    gap_monotone: int = 0
    min_z: float = math.inf
    min_c: float = math.inf
    max_c: float = -math.inf
    min_surrogate_gap: float = math.inf
    max_gap_increase: float = -math.inf

    @property
    def total(self) -> int:
        return (
            self.z_floor + self.step_ratio + self.grad_floor + self.surrogate_gap + self.gap_monotone
        )


_EXTREMES_INIT = (math.inf, math.inf, -math.inf, math.inf, -math.inf)


@dataclass
class SolverState:
    """Mutable loop state after ``k`` completed iterations.

    ``x`` is the latest primal iterate ``x^(k)``, ``z`` the dual-averaging
    vector ``z^(k)``. ``y_acc + y_comp`` is the compensated running sum of
    ``gamma * y^(s)`` for ``s = 1..k`` (plus ``s = K+1`` once finalised) and
    ``lin_sum + lin_comp`` the running sum of
    ``a_s (f_alpha(x^(s)) - <grad f_alpha(x^(s)), x^(s)>)`` for ``s = 0..k``.
    """

    k: int
    z: np.ndarray
    x: np.ndarray
    y_acc: np.ndarray
    y_comp: np.ndarray
    lin_sum: float
    lin_comp: float = 0.0
    gamma: float = 0.0
    prev_gap: float = 0.0
    has_prev_gap: bool = False
    finalized: bool = False
    saturation_events: int = 0
    trace: list[DiagnosticRecord] = field(default_factory=list)
    violations: np.ndarray = field(default_factory=lambda: np.zeros(5, dtype=np.int64))
    extremes: np.ndarray = field(default_factory=lambda: np.array(_EXTREMES_INIT))

    @property
    def A_k(self) -> float:
        return 1.0 + self.k * self.gamma

    @property
    def weight_acc(self) -> float:
        """Total weight of the dual iterates folded into ``y_acc``."""
        return (self.k + (1 if self.finalized else 0)) * self.gamma

    @property
    def y_bar(self) -> np.ndarray:
        """Weighted average of the accumulated dual iterates."""
        if self.weight_acc == 0:
            return np.zeros_like(self.y_acc)
        return (self.y_acc + self.y_comp) / self.weight_acc

    def invariants(self) -> InvariantReport:
        v, e = self.violations, self.extremes
        return InvariantReport(*(int(c) for c in v), *(float(t) for t in e))

    def copy(self) -> "SolverState":
        return replace(
            self,
            z=self.z.copy(),
            x=self.x.copy(),
            y_acc=self.y_acc.copy(),
            y_comp=self.y_comp.copy(),
            trace=list(self.trace),
            violations=self.violations.copy(),
            extremes=self.extremes.copy(),
        )


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Result of :func:`solve`, in scaled coordinates."""

    x_scaled: np.ndarray
    y_bar_scaled: np.ndarray
    iterations: int
    params: SolverParams
    primal_objective: float
    dual_objective: float
    max_primal_violation: float
    min_dual_slack: float
    saturation_events: int
    trace: list[DiagnosticRecord] | None = None
    invariants: InvariantReport | None = None
    backend: str = ""


def init_state(inst: ScaledInstance, params: SolverParams) -> SolverState:
    """``x^(0) = (1-eps)/(n a_inf)``, ``z^(0) = grad psi(x^(0))``, ``A_0 = 1``."""
    n, m = inst.n, inst.m
    x0 = np.full(n, (1.0 - params.eps) / (n * inst.a_inf))
    z0 = grad_psi(params.regularizer, x0)
    bundle = gradient_bundle(inst, params.smoothing, x0)
    lin0 = params.a0 * (-1.0 / (1.0 + params.alpha)) * math.fsum(bundle.ax * bundle.row_powers)
    return SolverState(
        k=0,
        z=z0,
        x=x0,
        y_acc=np.zeros(m),
        y_comp=np.zeros(m),
        lin_sum=lin0,
        gamma=params.gamma,
    )


def _advance(
    inst: ScaledInstance,
    params: SolverParams,
    state: SolverState,
    *,
    max_steps: int,
    stop_at_eta: bool,
    finalize: bool,
    stride: int,
    debug: bool,
    backend: str | None,
) -> None:
    """Run the kernel on ``state`` in place and translate its status."""
    run = _kernel.get_kernel(backend)
    mat = inst.matrix
    capacity = (max_steps // stride + 2) if stride > 0 else 0
    trace_buf = np.zeros((capacity, 6))
    istate = np.array(
        [state.k, 0, state.saturation_events, int(state.has_prev_gap), int(state.finalized)],
        dtype=np.int64,
    )
    fstate = np.array([state.lin_sum, state.lin_comp, state.prev_gap])
    status = run(
        mat.row_ptr,
        mat.row_cols,
        mat.row_vals,
        mat.col_ptr,
        mat.col_rows,
        mat.col_vals,
        params.alpha,
        params.eta,
        params.gamma,
        params.eps,
        DEFAULT_CAP,
        state.z,
        state.x,
        state.y_acc,
        state.y_comp,
        istate,
        fstate,
        state.violations,
        state.extremes,
        trace_buf,
        int(max_steps),
        bool(stop_at_eta),
        bool(finalize),
        int(stride),
        bool(debug),
    )
    state.k = int(istate[0])
    state.saturation_events = int(istate[2])
    state.has_prev_gap = bool(istate[3])
    state.finalized = bool(istate[4])
    state.lin_sum, state.lin_comp, state.prev_gap = (float(v) for v in fstate)
    for row in trace_buf[: int(istate[1])]:
        state.trace.append(DiagnosticRecord(int(row[0]), *(float(v) for v in row[1:])))

    if status == _kernel.STATUS_OK:
        return
    if status == _kernel.STATUS_DOMAIN:
        raise DomainViolation(f"1 + z_j/eta <= 0 at iteration {state.k}")
    reasons = {
        _kernel.STATUS_NONFINITE: "non-finite value",
        _kernel.STATUS_ZFLOOR: f"z fell below -eps*eta/2 = {-params.eps * params.eta / 2}",
        _kernel.STATUS_STEPRATIO: "multiplicative step constant left [1/16, 1/(4(1-eps))]",
        _kernel.STATUS_POSITIVITY: "iterate lost strict positivity",
    }
    raise NumericalFailure(f"{reasons.get(status, f'status {status}')} at iteration {state.k}")


def step(
    inst: ScaledInstance,
    params: SolverParams,
    state: SolverState,
    *,
    diagnostics_stride: int = 0,
    debug: bool = False,
    backend: str | None = None,
) -> SolverState:
    """Apply exactly one iteration; ``state`` itself is left untouched."""
    new = state.copy()
    _advance(
        inst,
        params,
        new,
        max_steps=1,
        stop_at_eta=False,
        finalize=False,
        stride=diagnostics_stride,
        debug=debug,
        backend=backend,
    )
    return new


def gap_diagnostics(
    inst: ScaledInstance, params: SolverParams, state: SolverState, bundle: GradientBundle
) -> DiagnosticRecord:
    """Gap record for ``state`` from closed forms, independently of the kernel.

    ``bundle`` must be evaluated at the next iterate ``x^(k+1) =
    grad psi*(z^(k))``; its ``f_value`` is the upper bound ``U_k``.
    """
    reg = params.regularizer
    a_k = state.A_k
    lin = state.lin_sum + state.lin_comp
    pstar = psi_star(reg, state.z)
    lower = (lin + pstar) / a_k
    x_next = grad_psi_star(reg, state.z)
    return DiagnosticRecord(
        k=state.k,
        f_value=bundle.f_value,
        surrogate_lower=lower,
        weighted_gap=a_k * bundle.f_value - lin - pstar,
        min_z=float(state.z.min()),
        max_step_ratio=float(np.max(x_next / state.x)),
    )


def solve(
    inst: ScaledInstance,
    eps: float,
    *,
    diagnostics_stride: int = 0,
    debug: bool = False,
    backend: str | None = None,
    params: SolverParams | None = None,
) -> SolveReport:
    """Run the full method on a scaled (and truncated) instance.

    Parameters
    ----------
    inst
        Output of :func:`packcover.instance.prepare`.
    eps
        Accuracy in ``(0, 1/4]``.
    diagnostics_stride
        Record a :class:`DiagnosticRecord` every this many iterations
        (0 disables the trace; the final record is always kept when enabled).
    debug
        Check the analysis invariants at every iteration. Leaving the proven
        regime (z floor, step constants, positivity) raises
        :class:`NumericalFailure`; the remaining checks are tallied in
        ``report.invariants``.
    backend
        ``"compiled"``, ``"python"`` or ``None`` for the import-time default.
    params
        Override :func:`derive_params` (mainly for tests).

    Raises
    ------
    IterationCapExceeded
        The loop did not stop within ``params.max_iters`` iterations.
    NumericalFailure, DomainViolation
        The iteration produced unusable values.
    """
    eps = check_accuracy(eps)
    if params is None:
        params = derive_params(inst.m, inst.n, inst.a_inf, eps)
    if diagnostics_stride < 0:
        raise ValueError("diagnostics_stride must be >= 0")
    state = init_state(inst, params)
    _advance(
        inst,
        params,
        state,
        max_steps=params.max_iters,
        stop_at_eta=True,
        finalize=True,
        stride=diagnostics_stride,
        debug=debug,
        backend=backend,
    )
    if not state.finalized:
        raise IterationCapExceeded(
            f"A_k = {state.A_k} still <= eta = {params.eta} after {state.k} iterations"
        )
    x = state.x.copy()
    y_bar = state.y_bar
    return SolveReport(
        x_scaled=x,
        y_bar_scaled=y_bar,
        iterations=state.k,
        params=params,
        primal_objective=math.fsum(x),
        dual_objective=math.fsum(y_bar),
        max_primal_violation=float(matvec(inst.matrix, x).max()) - 1.0,
        min_dual_slack=float(tmatvec(inst.matrix, y_bar).min()),
        saturation_events=state.saturation_events,
        trace=state.trace if diagnostics_stride > 0 else None,
        invariants=state.invariants() if debug else None,
        backend=backend if backend not in (None, "auto") else _kernel.DEFAULT_BACKEND,
    )

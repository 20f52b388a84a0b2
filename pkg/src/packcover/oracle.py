"""Exact solutions of tiny packing/covering LPs by vertex enumeration.

Every basis of the packing polytope ``{x >= 0 : Ax <= 1}`` is a choice of
``n`` tight constraints among the ``m`` rows and the ``n`` coordinate
hyperplanes; each is solved by Gaussian elimination with partial pivoting,
infeasible or singular bases are discarded, and the best vertex wins. The
covering side ``{y >= 0 : A^T y >= 1}`` is enumerated the same way. Nothing
here shares code with the iterative solver, which is the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import NumericalFailure, SingularOnly, TooLarge
from .instance import ScaledInstance

__all__ = ["ExactSolution", "exact_opt", "MAX_COLS", "MAX_ROWS"]

MAX_COLS = 6
MAX_ROWS = 8
PIVOT_CUTOFF = 1e-12
FEAS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ExactSolution:
    opt_value: float
    x_star: np.ndarray
    y_star: np.ndarray
    status: str = "optimal"


def _batched_solve(mats: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve a stack of square systems; returns ``(solutions, nonsingular mask)``."""
    mats = mats.copy()
    rhs = rhs.copy()
    count, size, _ = mats.shape
    ok = np.ones(count, dtype=bool)
    idx = np.arange(count)
    for col in range(size):
        piv = col + np.argmax(np.abs(mats[:, col:, col]), axis=1)
        for arr in (mats, rhs):
            top = arr[idx, col].copy()
            arr[idx, col] = arr[idx, piv]
            arr[idx, piv] = top
        pivot = mats[:, col, col]
        ok &= np.abs(pivot) >= PIVOT_CUTOFF
        pivot = np.where(ok, pivot, 1.0)
        factors = mats[:, col + 1 :, col] / pivot[:, None]
        mats[:, col + 1 :, :] -= factors[:, :, None] * mats[:, col, None, :]
        rhs[:, col + 1 :] -= factors * rhs[:, col, None]
    sol = np.zeros_like(rhs)
    for row in range(size - 1, -1, -1):
        acc = rhs[:, row] - np.einsum("bk,bk->b", mats[:, row, row + 1 :], sol[:, row + 1 :])
        diag = np.where(ok, mats[:, row, row], 1.0)
        sol[:, row] = acc / diag
    return sol, ok


def _best_vertex(A: np.ndarray, maximize: bool) -> tuple[float, np.ndarray]:
    """Optimal vertex of ``{v >= 0 : A v <= 1}`` (maximize) or ``{v >= 0 : A v >= 1}``.

    Returns the lexicographically smallest vertex among those within a
    relative ``1e-9`` of the optimal objective.
    """
    rows, dim = A.shape
    system = np.vstack([A, np.eye(dim)])
    target = np.concatenate([np.ones(rows), np.zeros(dim)])
    bases = np.array(list(combinations(range(rows + dim), dim)), dtype=np.intp)
    sol, ok = _batched_solve(system[bases], target[bases])
    sol = np.where(np.abs(sol) < 1e-15, 0.0, sol)
    load = sol @ A.T
    feasible = ok & np.all(sol >= -FEAS_TOL, axis=1)
    if maximize:
        feasible &= np.all(load <= 1.0 + FEAS_TOL, axis=1)
    else:
        feasible &= np.all(load >= 1.0 - FEAS_TOL, axis=1)
    if not feasible.any():
        raise SingularOnly("no feasible vertex among the enumerated bases")
    verts = np.clip(sol[feasible], 0.0, None)
    values = verts.sum(axis=1)
    best = values.max() if maximize else values.min()
    near = np.abs(values - best) <= 1e-9 * (1.0 + abs(best))
    cands = verts[near]
    order = np.lexsort(np.round(cands, 12).T[::-1])
    vertex = cands[order[0]]
    return math.fsum(vertex), vertex


def exact_opt(inst: ScaledInstance) -> ExactSolution:
    """Optimal value and primal/dual optimal vertices of a small scaled instance.

    Raises
    ------
    TooLarge
        More than ``MAX_COLS`` columns or ``MAX_ROWS`` rows.
    NumericalFailure
        Primal and dual optima disagree beyond ``1e-9 (1 + OPT)``.
    """
    m, n = inst.m, inst.n
    if n > MAX_COLS or m > MAX_ROWS:
        raise TooLarge(f"oracle handles n <= {MAX_COLS}, m <= {MAX_ROWS}; got m={m}, n={n}")
    A = inst.matrix.toarray()
    primal, x_star = _best_vertex(A, maximize=True)
    dual, y_star = _best_vertex(A.T, maximize=False)
    if abs(primal - dual) > 1e-9 * (1.0 + primal):
        raise NumericalFailure(f"strong duality failed: primal {primal!r} vs dual {dual!r}")
    return ExactSolution(primal, x_star, y_star)

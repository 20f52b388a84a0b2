import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packcover.errors import BadAccuracy, DegenerateLog, IterationCapExceeded
from packcover.instance import matvec, prepare, tmatvec
from packcover.oracle import exact_opt
from packcover.smoothing import gradient_bundle
from packcover.solver import (
    derive_params,
    gap_diagnostics,
    init_state,
    solve,
    step,
)

from _support import TWO_BY_TWO, dense, dense_matrices, raw_from_dense

ONE = dense([[1.0]])
TWO = dense(TWO_BY_TWO)


def test_derive_params_examples():
    # reference values from mpmath at 50 digits
    # (the first alpha is 0.0161449, rounding to 0.016145)
    p = derive_params(2, 2, 3.0, 0.25)
    assert p.alpha == pytest.approx(0.016144860425458049, rel=1e-14)
    assert p.eta == 4.0
    assert p.gamma == pytest.approx(2.6065651815752144e-04, rel=1e-13)
    assert p.a0 == 1.0

    p = derive_params(2, 2, 1.0, 0.1)
    assert p.alpha == pytest.approx(6.7771257670454198e-03, rel=1e-14)
    assert p.eta == 10.0
    assert p.gamma == pytest.approx(1.1482358415587742e-04, rel=1e-13)
    assert p.max_iters == math.ceil((p.eta - 1) / p.gamma) + 2

    with pytest.raises(BadAccuracy):
        derive_params(2, 2, 1.0, 0.3)
    with pytest.raises(BadAccuracy):
        derive_params(2, 2, 1.0, 0.0)


def test_degenerate_log():
    with pytest.raises(DegenerateLog):
        derive_params(1, 1, 0.2, 0.25)


def test_init_state_examples():
    p = derive_params(1, 1, 1.0, 0.25)
    s = init_state(ONE, p)
    assert s.x.tolist() == [0.75]
    assert s.k == 0 and s.A_k == 1.0 and s.weight_acc == 0.0
    assert s.y_acc.tolist() == [0.0]

    inst = dense([[1.0, 3.0], [2.0, 1.0]])
    p = derive_params(2, 2, 3.0, 0.25)
    s = init_state(inst, p)
    np.testing.assert_allclose(s.x, [0.125, 0.125], rtol=1e-15)
    assert np.all(s.z <= 0.5)


def test_first_step_reproduces_initial_point():
    p = derive_params(1, 1, 1.0, 0.25)
    s0 = init_state(ONE, p)
    s1 = step(ONE, p, s0)
    assert s1.x[0] == pytest.approx(0.75, rel=1e-14)
    assert s1.A_k == 1.0 + p.gamma
    assert s1.k == 1 and s0.k == 0  # original state untouched


def test_step_matches_closed_forms():
    p = derive_params(2, 2, 3.0, 0.1)
    s = init_state(TWO, p)
    for _ in range(5):
        bundle = gradient_bundle(TWO, p.smoothing, np.asarray((1 + s.z / p.eta) ** (-1 / p.alpha)))
        nxt = step(TWO, p, s)
        np.testing.assert_allclose(nxt.x, (1 + s.z / p.eta) ** (-1 / p.alpha), rtol=1e-12)
        np.testing.assert_allclose(nxt.z, s.z + p.gamma * bundle.truncated, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(
            nxt.y_acc + nxt.y_comp, s.y_acc + s.y_comp + p.gamma * bundle.row_powers, rtol=1e-10
        )
        assert nxt.A_k == 1.0 + nxt.k * p.gamma
        s = nxt


def test_step_constants_in_range():
    p = derive_params(2, 2, 3.0, 0.1)
    s = init_state(TWO, p)
    for _ in range(50):
        s = step(TWO, p, s, debug=True)
    inv = s.invariants()
    assert inv.step_ratio == 0 and inv.z_floor == 0 and inv.grad_floor == 0
    assert 1 / 16 <= inv.min_c <= inv.max_c <= 1 / (4 * (1 - p.eps))


def test_gap_diagnostics_agrees_with_kernel_trace():
    p = derive_params(2, 2, 3.0, 0.25)
    s = init_state(TWO, p)
    for _ in range(30):
        x_next = (1 + s.z / p.eta) ** (-1 / p.alpha)
        rec = gap_diagnostics(TWO, p, s, gradient_bundle(TWO, p.smoothing, x_next))
        nxt = step(TWO, p, s, diagnostics_stride=1)
        kern = nxt.trace[-1]
        assert kern.k == rec.k == s.k
        assert kern.f_value == pytest.approx(rec.f_value, rel=1e-12, abs=1e-13)
        assert kern.surrogate_lower == pytest.approx(rec.surrogate_lower, rel=1e-10)
        assert kern.weighted_gap == pytest.approx(rec.weighted_gap, rel=1e-9, abs=1e-12)
        assert kern.min_z == rec.min_z
        assert kern.max_step_ratio == pytest.approx(rec.max_step_ratio, rel=1e-12)
        s = nxt


def test_solve_one_by_one():
    r = solve(ONE, 0.25)
    assert 0.25 <= r.x_scaled[0] <= 1.25
    assert matvec(ONE.matrix, r.x_scaled)[0] <= 1.25
    assert r.iterations == 1476
    assert r.iterations <= r.params.iteration_bound
    assert r.iterations <= r.params.max_iters


def test_solve_two_by_two():
    r = solve(TWO, 0.1)
    assert r.primal_objective >= 0.42
    assert r.max_primal_violation <= 0.1
    assert r.min_dual_slack >= 1 - 0.2
    assert r.dual_objective <= 1.4 * 0.6
    assert r.iterations <= r.params.iteration_bound


def test_weighted_gap_monotone_one_by_one():
    r = solve(ONE, 0.25, diagnostics_stride=1)
    gaps = [rec.weighted_gap for rec in r.trace]
    assert len(gaps) == r.iterations + 1
    for prev, cur in zip(gaps, gaps[1:]):
        assert cur <= prev + 1e-9 * (1 + abs(cur))


def test_trace_stride_keeps_last_record():
    r = solve(ONE, 0.25, diagnostics_stride=100)
    ks = [rec.k for rec in r.trace]
    assert ks[0] == 0 and ks[-1] == r.iterations
    assert all(k % 100 == 0 for k in ks[:-1])
    assert solve(ONE, 0.25).trace is None


def test_iteration_cap():
    p = derive_params(1, 1, 1.0, 0.25)
    with pytest.raises(IterationCapExceeded):
        solve(ONE, 0.25, params=replace(p, max_iters=10))


def test_true_gap_positive_on_diagonal():
    # x*_alpha_j = d_j^(-1-alpha) for A = diag(d), so f(x*_alpha) is exact
    d = np.array([1.0, 2.5, 4.0])
    inst = dense(np.diag(d))
    eps = 0.25
    p = derive_params(3, 3, inst.a_inf, eps)
    x_opt = d ** (-1 - p.alpha)
    f_opt = gradient_bundle(inst, p.smoothing, x_opt)
    np.testing.assert_allclose(f_opt.gradient, 0.0, atol=1e-12)
    r = solve(inst, eps, diagnostics_stride=1)
    for rec in r.trace:
        assert rec.f_value >= f_opt.f_value - 1e-12


@settings(max_examples=15, deadline=None)
@given(dense_matrices(max_rows=3, max_cols=3))
def test_guarantees_on_random_instances(a):
    eps = 0.25
    inst = prepare(raw_from_dense(a), eps)
    r = solve(inst, eps, debug=True)
    opt = exact_opt(inst).opt_value
    assert r.iterations <= r.params.iteration_bound
    assert matvec(inst.matrix, r.x_scaled).max() <= 1 + eps + 1e-9
    assert r.primal_objective >= (1 - 3 * eps) * opt - 1e-9
    assert tmatvec(inst.matrix, r.y_bar_scaled).min() >= 1 - 2 * eps - 1e-9
    assert r.dual_objective <= (1 + 4 * eps) * opt + 1e-9
    inv = r.invariants
    assert inv.z_floor == inv.step_ratio == inv.grad_floor == inv.gap_monotone == 0
    assert np.all(r.x_scaled > 0)

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from packcover.errors import NegativeInput
from packcover.instance import matvec
from packcover.oracle import exact_opt
from packcover.smoothing import (
    SmoothingContext,
    f_alpha,
    gradient_bundle,
    local_smoothness_check,
    stable_pow,
    truncate_gradient,
)
from packcover.solver import derive_params

from _support import dense, dense_matrices

ONE = dense([[1.0]])


def barrier(inst, alpha, x):
    ax = matvec(inst.matrix, x)
    return alpha / (1 + alpha) * math.fsum(stable_pow(ax, (1 + alpha) / alpha))


def test_stable_pow_examples():
    assert stable_pow(0.0, 3.7) == 0.0
    assert stable_pow(1.0, 123.0) == 1.0
    assert stable_pow(2.0, 2000.0, 1e300) == 1e300
    assert stable_pow(2.0, 10.0) == pytest.approx(1024.0, rel=1e-14)
    with pytest.raises(NegativeInput):
        stable_pow(-1.0, 2.0)


@given(
    st.floats(0, 1e6, allow_nan=False),
    st.floats(0, 1e6, allow_nan=False),
    st.floats(0.01, 500),
)
def test_stable_pow_monotone(u, v, e):
    lo, hi = sorted((u, v))
    assert stable_pow(lo, e) <= stable_pow(hi, e)


def test_f_alpha_examples():
    assert f_alpha(ONE, SmoothingContext(0.3), [0.0]) == 0.0
    assert f_alpha(ONE, SmoothingContext(1.0), [1.0]) == pytest.approx(-0.5, rel=1e-15)
    assert f_alpha(ONE, SmoothingContext(0.5), [1.0]) == pytest.approx(-2.0 / 3.0, rel=1e-15)
    with pytest.raises(NegativeInput):
        f_alpha(ONE, SmoothingContext(0.5), [-1.0])


def test_gradient_bundle_examples():
    b = gradient_bundle(ONE, SmoothingContext(1.0), [1.0])
    assert b.gradient.tolist() == [0.0] and b.truncated.tolist() == [0.0]

    inst = dense([[1.0, 2.0], [3.0, 1.0]])
    b = gradient_bundle(inst, SmoothingContext(0.2), [0.0, 0.0])
    assert b.gradient.tolist() == [-1.0, -1.0] and b.truncated.tolist() == [-1.0, -1.0]

    b = gradient_bundle(ONE, SmoothingContext(0.5), [2.0])
    assert b.gradient.tolist() == pytest.approx([3.0]) and b.truncated.tolist() == [1.0]
    assert b.row_powers.tolist() == pytest.approx([4.0])


def test_saturation_flagged():
    b = gradient_bundle(ONE, SmoothingContext(0.001), [2.0])
    assert b.saturation_events == 1
    assert b.row_powers[0] == 1e300


@given(dense_matrices(max_rows=5, max_cols=5), st.floats(0.05, 0.95), st.integers(0, 2**32 - 1))
def test_bundle_invariants(a, alpha, seed):
    inst = dense(a)
    ctx = SmoothingContext(alpha)
    x = np.random.default_rng(seed).uniform(0, 1, inst.n)
    b = gradient_bundle(inst, ctx, x)
    assert np.all(b.gradient >= -1.0)
    assert np.all((b.truncated >= -1.0) & (b.truncated <= 1.0))
    keep = b.gradient <= 1.0
    np.testing.assert_array_equal(b.truncated[keep], b.gradient[keep])
    np.testing.assert_array_equal(truncate_gradient(b.truncated), b.truncated)
    assert b.f_value == pytest.approx(f_alpha(inst, ctx, x), rel=1e-12, abs=1e-12)


@given(dense_matrices(max_rows=5, max_cols=5), st.floats(0.1, 0.9), st.integers(0, 2**32 - 1))
def test_gradient_finite_differences(a, alpha, seed):
    inst = dense(a)
    ctx = SmoothingContext(alpha)
    x = np.random.default_rng(seed).uniform(1e-3, 1, inst.n)
    b = gradient_bundle(inst, ctx, x)
    assume(b.saturation_events == 0)
    for j in range(inst.n):
        h = 1e-6 * max(1.0, abs(x[j]))
        up, dn = x.copy(), x.copy()
        up[j] += h
        dn[j] -= h
        fd = (f_alpha(inst, ctx, up) - f_alpha(inst, ctx, dn)) / (2 * h)
        # rounding in f is amplified by 1/h when the row powers are large
        roundoff = 64 * np.finfo(float).eps * (abs(b.f_value) + math.fsum(x)) / h
        assert fd == pytest.approx(b.gradient[j], rel=1e-4, abs=1e-6 + roundoff)


@given(
    dense_matrices(max_rows=4, max_cols=4),
    st.floats(0.05, 0.95),
    st.integers(0, 2**32 - 1),
)
def test_convexity_midpoint(a, alpha, seed):
    inst = dense(a)
    ctx = SmoothingContext(alpha)
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(0, 0.5, (2, inst.n))
    mid = f_alpha(inst, ctx, (x + y) / 2)
    avg = (f_alpha(inst, ctx, x) + f_alpha(inst, ctx, y)) / 2
    assert mid <= avg + 1e-9 * (1 + abs(avg))


def test_local_smoothness_examples():
    ctx = SmoothingContext(0.5)
    assert local_smoothness_check(ONE, ctx, [1.0], [0.0])
    assert local_smoothness_check(ONE, ctx, [1.0], [0.125])


def test_local_smoothness_random_3x3():
    rng = np.random.default_rng(7)
    for _ in range(100):
        a = rng.uniform(1, 10, (3, 3))
        inst = dense(a / a.min())
        p = derive_params(3, 3, inst.a_inf, 0.1)
        ctx = SmoothingContext(p.alpha)
        x = rng.uniform(0.01, 1.0, 3) / inst.a_inf
        assert local_smoothness_check(inst, ctx, x, np.full(3, 0.125))


@settings(max_examples=60, deadline=None)
@given(dense_matrices(max_rows=4, max_cols=4), st.sampled_from([0.05, 0.1, 0.25]))
def test_barrier_small_when_strictly_feasible(a, eps):
    inst = dense(a / a[a > 0].min())
    p = derive_params(inst.m, inst.n, inst.a_inf, eps)
    sol = exact_opt(inst)
    x = (1 - eps / 2) * sol.x_star
    assert barrier(inst, p.alpha, x) <= eps / 2 * sol.opt_value


@settings(max_examples=60, deadline=None)
@given(dense_matrices(max_rows=4, max_cols=4), st.sampled_from([0.05, 0.1, 0.25]))
def test_barrier_large_when_violated(a, eps):
    inst = dense(a / a[a > 0].min())
    assume(inst.m * inst.n >= 3)
    p = derive_params(inst.m, inst.n, inst.a_inf, eps)
    sol = exact_opt(inst)
    x = sol.x_star / matvec(inst.matrix, sol.x_star).max() * (1 + eps / 2)
    assert barrier(inst, p.alpha, x) > 2 * sol.opt_value


@pytest.mark.parametrize(
    "a, eps",
    [([[1.0]], 0.05), ([[1.0]], 0.1), ([[1.0]], 0.25), ([[1.0, 1.0]], 0.25)],
)
def test_barrier_violated_branch_fails_on_tiny_instances(a, eps):
    # too small for the (mn a_inf / eps)^(7/4) estimate to beat 2 OPT
    inst = dense(a)
    p = derive_params(inst.m, inst.n, inst.a_inf, eps)
    sol = exact_opt(inst)
    x = sol.x_star / matvec(inst.matrix, sol.x_star).max() * (1 + eps / 2)
    assert barrier(inst, p.alpha, x) < 2 * sol.opt_value

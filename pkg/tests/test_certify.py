import numpy as np
import pytest
from hypothesis import given, settings

from packcover.certify import check_covering, check_primal, duality_sandwich
from packcover.errors import NegativeInput, NoUpperBound
from packcover.instance import prepare, scale
from packcover.oracle import exact_opt
from packcover.solver import solve

from _support import TWO_BY_TWO, dense, dense_matrices, raw_from_dense

TWO = dense(TWO_BY_TWO)
ONE = dense([[1.0]])


def test_primal_examples():
    p = check_primal(TWO, [0.0, 0.0])
    assert (p.objective, p.max_violation, p.opt_lower_bound) == (0.0, -1.0, 0.0)

    p = check_primal(TWO, [0.2, 0.4])
    assert p.objective == pytest.approx(0.6)
    assert p.max_violation == pytest.approx(0.0, abs=1e-15)

    p = check_primal(ONE, [1.25])
    assert p.max_violation == 0.25 and p.feasible_at == 0.25
    assert p.opt_lower_bound == 1.0

    with pytest.raises(NegativeInput):
        check_primal(ONE, [-0.1])


def test_covering_examples():
    d = check_covering(TWO, [0.4, 0.2])
    assert d.objective == pytest.approx(0.6)
    assert d.min_slack == pytest.approx(1.0)

    d = check_covering(TWO, [0.0, 0.0])
    assert d.objective == 0.0 and d.min_slack == 0.0 and d.opt_upper_bound is None

    d = check_covering(ONE, [2.0])
    assert d.min_slack == 2.0 and d.opt_upper_bound == 1.0

    with pytest.raises(NegativeInput):
        check_covering(ONE, [-2.0])


def test_sandwich_examples():
    lo, hi = duality_sandwich(check_primal(TWO, [0.2, 0.4]), check_covering(TWO, [0.4, 0.2]))
    assert lo == pytest.approx(0.6) and hi == pytest.approx(0.6)

    lo, hi = duality_sandwich(check_primal(TWO, [0.0, 0.0]), check_covering(TWO, [1.0, 1.0]))
    assert lo == 0.0 <= hi

    with pytest.raises(NoUpperBound):
        duality_sandwich(check_primal(TWO, [0.0, 0.0]), check_covering(TWO, [0.0, 0.0]))


def test_sandwich_from_solver_output():
    eps = 0.1
    r = solve(TWO, eps)
    p = check_primal(TWO, r.x_scaled)
    d = check_covering(TWO, r.y_bar_scaled)
    lo, hi = duality_sandwich(p, d)
    assert lo <= 0.6 <= hi
    assert hi - lo <= 0.6 * ((1 + 4 * eps) / (1 - 2 * eps) * (1 + eps) - (1 - 3 * eps))
    assert p.max_violation <= eps and d.min_slack >= 1 - 2 * eps


def test_raw_instance_weights():
    raw = raw_from_dense([[8.0]], b=[2.0], c=[4.0])
    p = check_primal(raw, [0.25])
    assert p.objective == 1.0 and p.max_violation == 0.0
    d = check_covering(raw, [0.5])
    assert d.objective == 1.0 and d.min_slack == 1.0 and d.opt_upper_bound == 1.0


@settings(max_examples=40, deadline=None)
@given(dense_matrices(max_rows=4, max_cols=4))
def test_sandwich_sound_against_oracle(a):
    inst = scale(raw_from_dense(a))
    opt = exact_opt(inst).opt_value
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.uniform(0, 1, inst.n)
        y = rng.uniform(0, 1, inst.m)
        lo, hi = duality_sandwich(check_primal(inst, x), check_covering(inst, y))
        assert lo <= opt * (1 + 1e-9) + 1e-9
        assert hi >= opt * (1 - 1e-9) - 1e-9


@settings(max_examples=10, deadline=None)
@given(dense_matrices(max_rows=3, max_cols=3))
def test_solver_certificate_conformance(a):
    eps = 0.25
    inst = prepare(raw_from_dense(a), eps)
    r = solve(inst, eps)
    assert check_primal(inst, r.x_scaled).max_violation <= eps
    assert check_covering(inst, r.y_bar_scaled).min_slack >= 1 - 2 * eps

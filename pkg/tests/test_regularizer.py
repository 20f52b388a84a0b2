import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from packcover.errors import DomainViolation, NonPositiveInput
from packcover.regularizer import RegularizerContext, grad_psi, grad_psi_star, psi, psi_star
from packcover.solver import derive_params

CTX = RegularizerContext(alpha=0.5, eta=10.0)


def test_psi_examples():
    assert psi(CTX, [1.0]) == pytest.approx(10.0)
    assert psi(RegularizerContext(0.3, 1.0), [1.0]) == pytest.approx(0.3 / 0.7)
    assert psi(CTX, [4.0]) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(NonPositiveInput):
        psi(CTX, [0.0])


def test_grad_psi_examples():
    assert grad_psi(CTX, [1.0]).tolist() == [0.0]
    assert grad_psi(CTX, [0.25]).tolist() == pytest.approx([10.0])
    with pytest.raises(NonPositiveInput):
        grad_psi(CTX, [-1.0])


@pytest.mark.parametrize("m, n, a_inf", [(1, 1, 1.0), (2, 2, 3.0), (6, 6, 10.0), (8, 6, 48.0)])
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.25])
def test_initial_dual_vector_at_most_half(m, n, a_inf, eps):
    p = derive_params(m, n, a_inf, eps)
    x0 = np.full(n, (1 - eps) / (n * a_inf))
    assert np.all(grad_psi(p.regularizer, x0) <= 0.5)


def test_psi_star_examples():
    assert psi_star(CTX, [0.0]) == pytest.approx(-10.0)
    ctx = RegularizerContext(0.2, 4.0)
    assert psi_star(ctx, np.zeros(3)) == pytest.approx(-(4.0 * 0.2 / 0.8) * 3)
    assert psi_star(CTX, [10.0]) == pytest.approx(-5.0)
    with pytest.raises(DomainViolation):
        psi_star(CTX, [-10.0])


def test_grad_psi_star_examples():
    assert grad_psi_star(CTX, [0.0, 0.0]).tolist() == [1.0, 1.0]
    assert grad_psi_star(CTX, [10.0]).tolist() == pytest.approx([0.25])
    with pytest.raises(DomainViolation):
        grad_psi_star(CTX, [-11.0])


@given(st.floats(0.005, 0.9), st.floats(4.0, 100.0), st.integers(0, 2**32 - 1))
def test_inverse_pair(alpha, eta, seed):
    ctx = RegularizerContext(alpha, eta)
    x = np.exp(np.random.default_rng(seed).uniform(np.log(1e-6), np.log(1e3), 5))
    back = grad_psi_star(ctx, grad_psi(ctx, x))
    np.testing.assert_allclose(back, x, rtol=1e-9)


@given(st.floats(0.05, 0.9), st.floats(4.0, 40.0), st.lists(st.floats(-0.9, 5.0), min_size=1, max_size=4))
def test_psi_star_nonpositive_and_fd(alpha, eta, zr):
    ctx = RegularizerContext(alpha, eta)
    z = np.array(zr) * eta
    assert psi_star(ctx, z) <= 0
    g = grad_psi_star(ctx, z)
    for j in range(len(z)):
        # separable: difference the j-th term alone, step on its own length scale
        h = 1e-4 * alpha * (eta + z[j])
        fd = (psi_star(ctx, [z[j] + h]) - psi_star(ctx, [z[j] - h])) / (2 * h)
        assert fd == pytest.approx(g[j], rel=1e-5)

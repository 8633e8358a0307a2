import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hurwitz_frobenius import theta as th
from hurwitz_frobenius.numeric import numeric_derivative

PI_I = 1j * math.pi
taus = st.builds(complex, st.floats(-1, 1), st.floats(0.5, 3))
zs = st.builds(lambda r, p: r * cmath.exp(1j * p), st.floats(0, 1), st.floats(0, 2 * math.pi))


def direct_sum(j, z, tau, n):
    """Plain loop over the Fourier series with n terms on each side."""
    total = 0j
    for m in range(-n, n + 2):
        if j in (1, 2):
            k = m - 0.5
        elif m > n:
            continue
        else:
            k = m
        term = cmath.exp(PI_I * tau * k * k + 2 * PI_I * k * z)
        if j == 1:
            term *= 1j * (-1) ** (m % 2)
        elif j == 4:
            term *= (-1) ** abs(m)
        total += term
    return total


def stable_direct(j, z, tau):
    n, prev = 4, None
    while True:
        val = direct_sum(j, z, tau, n)
        if prev is not None and abs(val - prev) < 1e-14:
            return val
        prev, n = val, 2 * n


@pytest.mark.parametrize("tau", [1j, 0.4 + 0.7j, -0.9 + 2.2j])
def test_theta1_vanishes_at_origin(tau):
    assert abs(th.theta(1, 0.0, tau)) < 1e-15


def test_theta3_limit():
    assert abs(th.theta(3, 0.0, 40j) - 1) < 1e-12


@pytest.mark.parametrize("j", [1, 2, 3, 4])
@pytest.mark.parametrize("z,tau", [(0.0, 1j), (0.3 - 0.2j, 0.25 + 0.9j), (0.7j, -0.6 + 1.4j)])
def test_series_against_direct_summation(j, z, tau):
    ref = stable_direct(j, z, tau)
    assert abs(th.theta(j, z, tau) - ref) < 1e-13 * max(1.0, abs(ref))


def test_theta2_reference_at_i():
    assert abs(th.theta(2, 0.0, 1j) - stable_direct(2, 0.0, 1j)) < 1e-14


@pytest.mark.parametrize("tau", [1j, 0.3 + 0.6j, -0.5 + 2.0j])
def test_theta1_prime_nonzero(tau):
    assert abs(th.theta_dz(1, 1, 0.0, tau)) > 1e-10


def test_order_zero_is_theta():
    z, tau = 0.2 + 0.1j, 0.1 + 1.3j
    for j in (1, 2, 3, 4):
        assert th.theta_dz(j, 0, z, tau) == th.theta(j, z, tau)


@pytest.mark.parametrize("tau", [1j, 0.3 + 0.6j])
def test_theta2_even(tau):
    assert abs(th.theta_dz(2, 1, 0.0, tau)) < 1e-14


@settings(max_examples=100, deadline=None)
@given(zs, taus, st.integers(1, 4))
def test_heat_equation(z, tau, j):
    r = th.theta_dz(j, 2, z, tau) - 4 * PI_I * th.theta_dtau(j, z, tau)
    assert abs(r) < 1e-10


def test_dtau_theta3_asymptotics():
    # leading terms n = +-1 of the Fourier series
    lead = 2 * PI_I * cmath.exp(PI_I * 40j)
    assert abs(th.theta_dtau(3, 0.0, 40j) - lead) < 1e-20
    assert abs(th.theta_dtau(3, 0.0, 40j) - 2 * PI_I * cmath.exp(2 * PI_I * 40j)) < 1e-20


def test_theta1_dtau_at_origin():
    assert abs(th.theta_dtau(1, 0.0, 0.3 + 1.1j)) < 1e-15


@settings(max_examples=30, deadline=None)
@given(zs, taus)
def test_theta3_periodic(z, tau):
    assert abs(th.theta(3, z + 1, tau) - th.theta(3, z, tau)) < 1e-12


@pytest.mark.parametrize("tau", [1j, 0.5 + 0.8j, -0.2 + 2.5j])
@pytest.mark.parametrize("p", [2, 3, 4])
def test_ratio_is_2pi_i_X(p, tau):
    assert abs(th.theta_ratio(p, tau) - 2 * PI_I * th.X(p, tau)) < 1e-12 * max(1, abs(th.X(p, tau)))


def test_X_limits():
    assert abs(th.X(3, 40j)) < 1e-12
    assert abs(th.X(4, 40j)) < 1e-12
    assert abs(th.X(2, 40j) - PI_I / 2) < 1e-12
    assert abs(th.gamma(40j) - PI_I / 3) < 1e-10


def test_X_rejects_p1():
    with pytest.raises(ValueError):
        th.X(1, 1j)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_X_derivatives_against_differences(order):
    tau = 0.2 + 1.1j
    d = numeric_derivative(lambda t: th.X(3, t, order - 1), tau)
    assert abs(d - th.X(3, tau, order)) < 1e-7 * max(1, abs(d))


def test_X_jet_consistent():
    tau = -0.3 + 0.9j
    jet = th.X_jet(tau, 3)
    for p in (2, 3, 4):
        for m in range(4):
            assert abs(jet[p][m] - th.X(p, tau, m)) < 1e-12 * max(1, abs(jet[p][m]))


def test_gamma_holomorphic():
    tau = 0.1 + 1.2j
    a = numeric_derivative(lambda t: th.gamma(t), tau, step=1e-4)
    b = numeric_derivative(lambda t: th.gamma(t), tau, step=5e-5)
    assert abs(a - b) < 1e-8 * abs(a)
    assert abs(a - th.gamma(tau, 1)) < 1e-8 * abs(a)


@pytest.mark.parametrize("tau", [1j, 0.2 + 0.7j, 0.9 + 2.9j])
def test_theta1_triple_ratio_identity(tau):
    lhs = th.theta1_ratio(tau)
    rhs = sum(th.theta_ratio(p, tau) for p in (2, 3, 4))
    assert abs(lhs - rhs) < 1e-10 * max(1, abs(lhs))


def test_required_terms_bound():
    n = th.required_terms(0.5j, 0.0, order=0)
    assert abs(cmath.exp(PI_I * 0.5j)) ** ((n + 0.5) ** 2) < 1e-16
    assert n <= th.MAX_TERMS


def test_truncation_unsatisfiable():
    with pytest.raises(th.TruncationError):
        th.theta(3, 0.0, 0.001j)


def test_modular_parameter_floor():
    tau = 1.5j
    short = th.ModularParameter(tau, 1)
    long = th.ModularParameter(tau, 40)
    assert abs(th.theta(4, 0.1, short) - th.theta(4, 0.1, long)) < 1e-15
    with pytest.raises(ValueError):
        th.ModularParameter(-1j, 5)


def test_theta_vectorized():
    z = np.array([0.1, 0.2 + 0.1j, -0.3j])
    vals = th.theta(2, z, 1j)
    assert vals.shape == (3,)
    assert all(abs(vals[i] - th.theta(2, complex(z[i]), 1j)) < 1e-15 for i in range(3))


def test_bad_index():
    with pytest.raises(ValueError):
        th.theta(5, 0.0, 1j)

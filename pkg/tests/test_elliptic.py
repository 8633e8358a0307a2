import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hurwitz_frobenius import elliptic as el
from hurwitz_frobenius import theta as th
from hurwitz_frobenius.numeric import ContourSpec, PoleError, contour_integral, laurent_coefficient, numeric_derivative

PI_I = 1j * math.pi
taus = st.builds(complex, st.floats(-1, 1), st.floats(0.6, 3))
cells = st.builds(complex, st.floats(0.08, 0.92), st.floats(0.08, 0.92))


def square_shell_wp(z, tau, M):
    m = np.arange(-M, M + 1)
    A, B = np.meshgrid(m, m)
    om = (A + B * tau).ravel()
    om = om[om != 0]
    return 1 / z**2 + np.sum(1 / (z - om) ** 2 - 1 / om**2)


def brute_wp(z, tau):
    # square-shell truncation error is O(M^-2); one Richardson step
    a, b = square_shell_wp(z, tau, 100), square_shell_wp(z, tau, 200)
    return (4 * b - a) / 3


def in_cell(c, tau):
    return c.real + c.imag * tau


@pytest.mark.parametrize("z,tau", [(0.23 + 0.11j, 0.3 + 1.1j), (-0.4 + 0.3j, 1j), (0.1 - 0.05j, -0.2 + 0.8j)])
def test_wp_against_brute_force(z, tau):
    assert abs(el.wp_normalized(z, tau) - brute_wp(z, tau)) < 1e-7


@settings(max_examples=40, deadline=None)
@given(cells, taus)
def test_wp_even_and_periodic(c, tau):
    z = in_cell(c, tau)
    w = el.wp_normalized(z, tau)
    assert abs(el.wp_normalized(-z, tau) - w) < 1e-10 * max(1, abs(w))
    assert abs(el.wp_normalized(z + 1, tau) - w) < 1e-10 * max(1, abs(w))
    assert abs(el.wp_normalized(z + tau, tau) - w) < 1e-10 * max(1, abs(w))


@settings(max_examples=40, deadline=None)
@given(cells, taus)
def test_zeta_odd_and_quasi_periodic(c, tau):
    z = in_cell(c, tau)
    zt = el.zeta_normalized(z, tau)
    assert abs(el.zeta_normalized(-z, tau) + zt) < 1e-10 * max(1, abs(zt))
    two_eta = 2 * el.eta1_normalized(tau)
    assert abs(el.zeta_normalized(z + 1, tau) - zt - two_eta) < 1e-9 * max(1, abs(zt))


def test_scaling_between_lattices():
    w1, tau = 1.3, 0.2 + 1.1j
    lat = el.LatticeParams(w1, w1 * tau)
    z = 0.4 + 0.5j
    lhs = (2 * w1) ** 2 * el.wp(z, lat)
    assert abs(lhs - el.wp_normalized(z / (2 * w1), tau)) < 1e-12 * abs(lhs)


@pytest.mark.parametrize("z", [0.21 + 0.13j, -0.3 + 0.4j])
def test_zeta_derivative_is_minus_wp(z):
    tau = 0.1 + 1.2j
    d = numeric_derivative(lambda x: el.zeta_normalized(x, tau), z)
    assert abs(-d - el.wp_normalized(z, tau)) < 1e-6 * max(1, abs(d))


@pytest.mark.parametrize("order", [1, 2, 3])
def test_wp_derivatives(order):
    tau, z = -0.3 + 0.9j, 0.27 + 0.18j
    d = numeric_derivative(lambda x: el.wp_normalized(x, tau, order - 1), z)
    assert abs(d - el.wp_normalized(z, tau, order)) < 1e-6 * max(1, abs(d))


def test_tau_derivatives():
    tau, z = 0.15 + 1.05j, 0.31 + 0.22j
    d = numeric_derivative(lambda t: el.wp_normalized(z, t), tau)
    assert abs(d - el.wp_dtau_normalized(z, tau)) < 1e-7 * max(1, abs(d))
    d = numeric_derivative(lambda t: el.zeta_normalized(z, t), tau)
    assert abs(d - el.zeta_dtau_normalized(z, tau)) < 1e-7 * max(1, abs(d))
    d = numeric_derivative(el.eta1_normalized, tau)
    assert abs(d - el.eta1_dtau_normalized(tau)) < 1e-7 * max(1, abs(d))


def test_bundle_matches_individual_functions():
    tau = 0.4 + 0.95j
    z = np.array([0.2 + 0.1j, -0.35 + 0.6j, 0.45 - 0.3j])
    b = el.weierstrass_bundle(z, tau)
    for k in range(4):
        assert np.allclose(b[f"wp{k}"], el.wp_normalized(z, tau, k), rtol=1e-13, atol=1e-13)
    assert np.allclose(b["zeta"], el.zeta_normalized(z, tau), rtol=1e-13, atol=1e-13)
    assert np.allclose(b["wp_t"], el.wp_dtau_normalized(z, tau), rtol=1e-12, atol=1e-12)
    assert np.allclose(b["zeta_t"], el.zeta_dtau_normalized(z, tau), rtol=1e-12, atol=1e-12)


def test_pole_rejected():
    with pytest.raises(PoleError):
        el.wp_normalized(1 + 1j + 1e-11, 1j)
    with pytest.raises(PoleError):
        el.zeta_normalized(0.0, 0.3 + 1j)


def test_residue_of_zeta_is_one():
    f = lambda z: el.zeta_normalized(z, 0.2 + 1.3j)
    assert abs(laurent_coefficient(f, 0, -1, ContourSpec(0, 0.25)) - 1) < 1e-12


@pytest.mark.parametrize("k", [-1, 1, 3])
def test_wp_laurent_odd_and_constant_vanish(k):
    f = lambda z: el.wp_normalized(z, -0.1 + 0.9j)
    assert abs(laurent_coefficient(f, 0, k, ContourSpec(0, 0.25))) < 1e-9


def test_wp_no_constant_term():
    f = lambda z: el.wp_normalized(z, -0.1 + 0.9j)
    assert abs(laurent_coefficient(f, 0, 0, ContourSpec(0, 0.25))) < 1e-9


def test_residue_sums_of_elliptic_combinations_vanish():
    tau = 0.3 + 1.2j
    p = 0.41 + 0.37j
    # each function has its poles at 0 and p only; both centres lie in one cell
    fns = [
        lambda z: el.wp_normalized(z, tau) * el.wp_normalized(z - p, tau),
        lambda z: el.wp_normalized(z, tau, 1),
        lambda z: el.zeta_normalized(z, tau) * el.wp_normalized(z, tau, 1),
        lambda z: el.zeta_normalized(z, tau) - el.zeta_normalized(z - p, tau),
    ]
    for f in fns:
        total = contour_integral(f, ContourSpec(0, 0.2)) + contour_integral(f, ContourSpec(p, 0.2))
        assert abs(total) < 1e-9


def test_zeta_alone_is_not_elliptic():
    tau = 0.3 + 1.2j
    f = lambda z: el.zeta_normalized(z, tau)
    assert abs(contour_integral(f, ContourSpec(0, 0.2)) - 1) < 1e-12


def test_legendre_on_general_lattices(rng):
    for _ in range(10):
        tau = complex(rng.uniform(-1, 1), rng.uniform(0.5, 3))
        w1 = rng.uniform(0.5, 2) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        c = el.constants(el.LatticeParams(w1, w1 * tau))
        assert abs(c.eta1 * c.omega2 - c.eta2 * c.omega1 - PI_I / 2) < 1e-10


def test_legendre_inconsistency_raises(monkeypatch):
    real = el.zeta_w
    monkeypatch.setattr(el, "zeta_w", lambda z, lat: real(z, lat) + 1e-3 * z * z)
    with pytest.raises(el.LatticeInconsistency):
        el.constants(el.LatticeParams(0.5, 0.5j))


@pytest.mark.parametrize("tau", [1j, 0.25 + 0.8j, -0.7 + 1.9j])
def test_e_values_two_routes(tau):
    c = el.constants(tau)
    direct = (c.e1, c.e2, c.e3)
    for a, b in zip(direct, el.e_values_theta(tau)):
        assert abs(a - b) < 1e-8 * max(1, abs(a))
    assert abs(c.e_sum) < 1e-8 * max(abs(x) for x in direct)


@pytest.mark.parametrize("tau", [1j, 0.25 + 0.8j, -0.7 + 1.9j])
def test_invariants_from_e_values(tau):
    c = el.constants(tau)
    g2 = -4 * (c.e1 * c.e2 + c.e2 * c.e3 + c.e3 * c.e1)
    g3 = 4 * c.e1 * c.e2 * c.e3
    assert abs(c.g2 - g2) < 1e-8 * abs(g2)
    assert abs(c.g3 - g3) < 1e-8 * max(1, abs(g3))


@pytest.mark.parametrize("tau", [1j, 0.25 + 0.8j, -0.7 + 1.9j])
def test_eta1_omega1_routes(tau):
    eo = el.eta1_normalized(tau) / 2
    assert abs(eo - el.eta1_omega1_theta(tau)) < 1e-10 * abs(eo)
    assert abs(eo + PI_I / 4 * th.gamma(tau)) < 1e-10 * abs(eo)
    c = el.constants(el.LatticeParams(0.5, tau / 2))
    assert abs(c.eta1 * c.omega1 - eo) < 1e-10 * abs(eo)


def test_wp_at_half_periods_vs_order():
    tau = 0.2 + 1.1j
    for h in (0.5, tau / 2, (1 + tau) / 2):
        assert abs(el.wp_normalized(h, tau, 1)) < 1e-10


def test_fs_ellipticize_periodic():
    tau = 0.1 + 1.1j
    h = lambda v: el.fs_ellipticize(lambda x: el.wp_dtau_normalized(x, tau),
                                    lambda x: el.wp_normalized(x, tau, 1), v, tau)
    for v in (0.3 + 0.2j, -0.15 + 0.45j):
        base = h(v)
        assert abs(h(v + 1) - base) < 1e-9 * max(1, abs(base))
        assert abs(h(v + tau) - base) < 1e-9 * max(1, abs(base))


def test_fs_ellipticize_constant():
    zero = lambda v: np.zeros_like(np.asarray(v, dtype=complex))
    assert abs(el.fs_ellipticize(zero, zero, 0.3 + 0.1j, 1j)) == 0


def test_lattice_orientation():
    with pytest.raises(ValueError):
        el.LatticeParams(0.5, -0.5j)

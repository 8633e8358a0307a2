"""Weierstrass functions on the lattice Z + tau Z and on 2w1 Z + 2w2 Z.

The lattice sums are evaluated row by row: summing ``1/(z + m + n tau)^2``
over ``m`` in closed form gives ``pi^2 / sin^2(pi (z + n tau))``, and the
remaining sum over rows converges geometrically.  Symmetric pairs ``n, -n``
are always taken together.  The general lattice is reduced to the normalized
one by ``(2 w1)^2 wp(z; 2w1, 2w2) = wp(z / 2w1; tau)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .numeric import ContourSpec, DEFAULT_CONFIG, NumericConfig, PoleError, laurent_coefficient
from . import theta as th

ROW_TOL = 1e-18
POLE_RADIUS = 1e-9
ETA_PROBE = 0.17 + 0.13j


@dataclass(frozen=True)
class LatticeParams:
    omega1: complex
    omega2: complex

    def __post_init__(self):
        if not (complex(self.omega2) / complex(self.omega1)).imag > 0:
            raise ValueError("Im(omega2/omega1) must be positive")

    @property
    def tau(self) -> complex:
        return complex(self.omega2) / complex(self.omega1)

    @classmethod
    def normalized(cls, tau: complex) -> "LatticeParams":
        return cls(0.5 + 0j, complex(tau) / 2)


LatticeLike = Union[LatticeParams, complex]


def _lattice(lattice: LatticeLike) -> LatticeParams:
    if isinstance(lattice, LatticeParams):
        return lattice
    return LatticeParams.normalized(complex(lattice))


def _rows(tau: complex, z: np.ndarray) -> int:
    ymax = float(np.max(np.abs(z.imag))) if z.size else 0.0
    base = math.ceil(-math.log(ROW_TOL) / (2 * math.pi * tau.imag))
    return base + math.ceil(ymax / tau.imag) + 1


def check_poles(z: np.ndarray, tau: complex, radius: float = POLE_RADIUS):
    b = np.round(z.imag / tau.imag)
    a = np.round(z.real - b * tau.real)
    d = np.abs(z - a - b * tau)
    if np.any(d < radius):
        bad = np.asarray(z).ravel()[np.argmin(d.ravel())]
        raise PoleError(f"z = {bad} is within {radius} of a lattice point")


@lru_cache(maxsize=256)
def _eta_series(tau: complex):
    """(2*eta1, d/dtau 2*eta1) for the normalized lattice.

    ``2 eta1 = pi^2/3 + sum_{n != 0} pi^2 csc^2(pi n tau)``.
    """
    n_rows = _rows(tau, np.zeros(1))
    n = np.arange(1, n_rows + 1)
    s = np.sin(np.pi * n * tau)
    c = np.cos(np.pi * n * tau)
    csc2 = np.pi**2 / s**2
    two_eta = np.pi**2 / 3 + 2 * csc2.sum()
    # d/dtau pi^2 csc^2(pi n tau) = -2 pi^3 n cot csc^2 ; rows n and -n give equal terms
    d_two_eta = 2 * np.sum(-2 * np.pi**3 * n * c / s**3)
    return complex(two_eta), complex(d_two_eta)


def _row_terms(z: np.ndarray, tau: complex):
    n_rows = _rows(tau, z)
    n = np.arange(-n_rows, n_rows + 1)
    w = np.multiply.outer(z, np.ones_like(n)) + n * tau
    return n, w


def _csc_derivs(w: np.ndarray, order: int):
    """d^order/dw^order of pi^2 / sin^2(pi w)."""
    s = np.sin(np.pi * w)
    c = np.cos(np.pi * w) / s
    csc2 = 1.0 / s**2
    if order == 0:
        return np.pi**2 * csc2
    if order == 1:
        return -2 * np.pi**3 * c * csc2
    if order == 2:
        return 2 * np.pi**4 * csc2 * (csc2 + 2 * c * c)
    if order == 3:
        return -8 * np.pi**5 * c * csc2 * (2 + 3 * c * c)
    raise ValueError("order must be between 0 and 3")


def wp_normalized(z, tau: complex, order: int = 0, check: bool = True):
    """``wp^(order)(z; tau)`` for the lattice Z + tau Z (order 0..3)."""
    tau = complex(tau)
    z_arr = np.asarray(z, dtype=complex)
    if check:
        check_poles(z_arr, tau)
    _, w = _row_terms(z_arr, tau)
    out = _csc_derivs(w, order).sum(axis=-1)
    if order == 0:
        out = out - _eta_series(tau)[0]
    return complex(out) if z_arr.ndim == 0 else out


def wp_dtau_normalized(z, tau: complex, check: bool = True):
    """Partial derivative of ``wp(z; tau)`` in tau at fixed z."""
    tau = complex(tau)
    z_arr = np.asarray(z, dtype=complex)
    if check:
        check_poles(z_arr, tau)
    n, w = _row_terms(z_arr, tau)
    out = (n * _csc_derivs(w, 1)).sum(axis=-1) - _eta_series(tau)[1]
    return complex(out) if z_arr.ndim == 0 else out


def _cot_rows(z: np.ndarray, tau: complex):
    n, w = _row_terms(z, tau)
    cot_w = np.pi / np.tan(np.pi * w)
    nt = n * tau
    with np.errstate(divide="ignore", invalid="ignore"):
        cot_n = np.where(n == 0, 0, np.pi / np.tan(np.pi * nt))
    return n, w, cot_w, cot_n


def zeta_normalized(z, tau: complex, check: bool = True):
    """Weierstrass zeta for the lattice Z + tau Z.

    ``zeta(z) = 2 eta1 z + sum_n [pi cot(pi (z + n tau)) - pi cot(pi n tau)]``
    with the n = 0 subtraction omitted.
    """
    tau = complex(tau)
    z_arr = np.asarray(z, dtype=complex)
    if check:
        check_poles(z_arr, tau)
    _, _, cot_w, cot_n = _cot_rows(z_arr, tau)
    out = (cot_w - cot_n).sum(axis=-1) + _eta_series(tau)[0] * z_arr
    return complex(out) if z_arr.ndim == 0 else out


def zeta_dtau_normalized(z, tau: complex, check: bool = True):
    tau = complex(tau)
    z_arr = np.asarray(z, dtype=complex)
    if check:
        check_poles(z_arr, tau)
    n, w, _, _ = _cot_rows(z_arr, tau)
    nt = n * tau
    with np.errstate(divide="ignore", invalid="ignore"):
        csc_n = np.where(n == 0, 0, np.pi**2 / np.sin(np.pi * nt) ** 2)
    out = (-n * _csc_derivs(w, 0) + n * csc_n).sum(axis=-1) + _eta_series(tau)[1] * z_arr
    return complex(out) if z_arr.ndim == 0 else out


def weierstrass_bundle(z, tau: complex, dtau: bool = True) -> dict:
    """wp, wp', wp'', wp''', zeta and (optionally) their tau-partials at once.

    Shares the row sines and cosines between all quantities; keys are
    ``wp0..wp3``, ``zeta``, ``wp_t`` and ``zeta_t``.
    """
    tau = complex(tau)
    z = np.asarray(z, dtype=complex)
    n, w = _row_terms(z, tau)
    two_eta, d_two_eta = _eta_series(tau)
    s = np.sin(np.pi * w)
    cot = np.cos(np.pi * w) / s
    csc2 = 1.0 / s**2
    p2 = np.pi**2
    out = {
        "wp0": (p2 * csc2).sum(axis=-1) - two_eta,
        "wp1": (-2 * np.pi**3 * cot * csc2).sum(axis=-1),
        "wp2": (2 * np.pi**4 * csc2 * (csc2 + 2 * cot * cot)).sum(axis=-1),
        "wp3": (-8 * np.pi**5 * cot * csc2 * (2 + 3 * cot * cot)).sum(axis=-1),
    }
    cot_n, csc_n = _row_constants(tau, n.size // 2)
    out["zeta"] = (np.pi * cot - cot_n).sum(axis=-1) + two_eta * z
    if dtau:
        out["wp_t"] = (n * (-2 * np.pi**3 * cot * csc2)).sum(axis=-1) - d_two_eta
        out["zeta_t"] = (-n * p2 * csc2 + n * csc_n).sum(axis=-1) + d_two_eta * z
    return out


@lru_cache(maxsize=256)
def _row_constants(tau: complex, n_rows: int):
    n = np.arange(-n_rows, n_rows + 1)
    safe = np.where(n == 0, 1, n) * tau
    cot_n = np.where(n == 0, 0, np.pi / np.tan(np.pi * safe))
    csc_n = np.where(n == 0, 0, np.pi**2 / np.sin(np.pi * safe) ** 2)
    return cot_n, csc_n


def eta1_normalized(tau: complex) -> complex:
    """Quasi-period eta1 of Z + tau Z (so that zeta(z+1) - zeta(z) = 2 eta1)."""
    return _eta_series(complex(tau))[0] / 2


def eta1_dtau_normalized(tau: complex) -> complex:
    return _eta_series(complex(tau))[1] / 2


# --- general lattice -------------------------------------------------------


def wp(z, lattice: LatticeLike, order: int = 0):
    """``wp^(order)(z; 2w1, 2w2)``; a bare complex ``lattice`` means tau."""
    lat = _lattice(lattice)
    s = 2 * complex(lat.omega1)
    val = wp_normalized(np.asarray(z, dtype=complex) / s, lat.tau, order)
    return val / s ** (order + 2)


def wp_prime(z, lattice: LatticeLike):
    return wp(z, lattice, 1)


def wp_second(z, lattice: LatticeLike):
    return wp(z, lattice, 2)


def zeta_w(z, lattice: LatticeLike):
    lat = _lattice(lattice)
    s = 2 * complex(lat.omega1)
    return zeta_normalized(np.asarray(z, dtype=complex) / s, lat.tau) / s


@dataclass(frozen=True)
class EllipticConstants:
    omega1: complex
    omega2: complex
    eta1: complex
    eta2: complex
    e1: complex
    e2: complex
    e3: complex
    g2: complex
    g3: complex

    @property
    def legendre_residual(self) -> float:
        return abs(self.eta1 * self.omega2 - self.eta2 * self.omega1 - 0.5j * math.pi)

    @property
    def e_sum(self) -> complex:
        return self.e1 + self.e2 + self.e3


class LatticeInconsistency(ArithmeticError):
    pass


def _min_period(lat: LatticeParams) -> float:
    w1, w2 = 2 * complex(lat.omega1), 2 * complex(lat.omega2)
    return min(abs(w1), abs(w2), abs(w1 + w2), abs(w1 - w2))


def constants(lattice: LatticeLike, legendre_tol: float = 1e-9,
              config: NumericConfig = DEFAULT_CONFIG) -> EllipticConstants:
    """Quasi-periods, half-period values and invariants of the lattice.

    ``eta_i`` from the jump of zeta across a period at a fixed probe point,
    ``e_i`` from wp at the half-periods, ``g2, g3`` from the z^2 and z^4
    Laurent coefficients of wp at the origin.
    """
    lat = _lattice(lattice)
    w1, w2 = complex(lat.omega1), complex(lat.omega2)
    probe = ETA_PROBE * 2 * w1
    eta1 = (zeta_w(probe + 2 * w1, lat) - zeta_w(probe, lat)) / 2
    eta2 = (zeta_w(probe + 2 * w2, lat) - zeta_w(probe, lat)) / 2
    e1 = wp(w1, lat)
    e2 = wp(-w1 - w2, lat)
    e3 = wp(w2, lat)
    radius = 0.3 * _min_period(lat)
    contour = ContourSpec(0j, radius)
    f = lambda z: wp(z, lat)
    g2 = 20 * laurent_coefficient(f, 0j, 2, contour, config)
    g3 = 28 * laurent_coefficient(f, 0j, 4, contour, config)
    out = EllipticConstants(w1, w2, complex(eta1), complex(eta2), complex(e1), complex(e2),
                            complex(e3), complex(g2), complex(g3))
    scale = max(1.0, abs(eta1 * w2), abs(eta2 * w1))
    if out.legendre_residual > legendre_tol * scale:
        raise LatticeInconsistency(
            f"Legendre identity violated by {out.legendre_residual:.3e}; lattice sums inconsistent"
        )
    return out


def e_values_theta(tau: complex):
    """e1, e2, e3 on Z + tau Z from theta constants.

    ``e_k = (1/3) theta1'''/theta1' - theta_p''/theta_p`` with p = 2, 3, 4.
    """
    base = th.theta1_ratio(tau) / 3
    return tuple(base - th.theta_ratio(p, tau) for p in (2, 3, 4))


def eta1_omega1_theta(tau: complex) -> complex:
    """``eta1 * omega1 = -(1/12) theta1'''/theta1'``."""
    return -th.theta1_ratio(tau) / 12


def fs_ellipticize(f_dtau: Callable, f_dv: Callable, v, tau: complex):
    """``h_f = -2 pi i d_tau f + (zeta(v) - 2 eta1 v) d_v f`` on Z + tau Z.

    For f elliptic in v the result is elliptic with the same periods.
    """
    tau = complex(tau)
    v = np.asarray(v, dtype=complex)
    two_eta = _eta_series(tau)[0]
    return -2j * math.pi * f_dtau(v) + (zeta_normalized(v, tau) - two_eta * v) * f_dv(v)

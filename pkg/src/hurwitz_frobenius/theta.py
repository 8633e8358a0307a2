"""Jacobi theta functions from their Fourier series.

``theta_1 = i sum (-1)^n q^((n-1/2)^2) e^((2n-1) pi i z)`` and friends, with
``q^x = exp(pi i tau x)``.  Derivatives in ``z`` and ``tau`` are obtained by
differentiating the series term by term, so the heat equation
``d^2/dz^2 theta = 4 pi i d/dtau theta`` holds at every truncation level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

DEFAULT_TAIL_TOL = 1e-16
MAX_TERMS = 64


class TruncationError(ValueError):
    """No admissible truncation satisfies the tail tolerance."""


@dataclass(frozen=True)
class ModularParameter:
    """A point of the upper half-plane with its Fourier truncation."""

    tau: complex
    truncation: int
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise ValueError(f"tau must lie in the upper half-plane, got {self.tau}")
        if self.truncation < 1:
            raise ValueError("truncation must be positive")

    @classmethod
    def from_tau(cls, tau: complex, tail_tol: float = DEFAULT_TAIL_TOL, max_terms: int = MAX_TERMS):
        tau = complex(tau)
        return cls(tau, required_terms(tau, 0.0, tail_tol, max_terms), tail_tol)


TauLike = Union[complex, ModularParameter]


def required_terms(tau: complex, ymax: float, tail_tol: float = DEFAULT_TAIL_TOL,
                   max_terms: int = MAX_TERMS, order: int = 4) -> int:
    """Smallest N with the omitted terms |n| > N below ``tail_tol`` relative.

    Term magnitudes are ``exp(-a k^2 + b |k|)`` with ``a = pi Im tau`` and
    ``b = 2 pi |Im z|``, times a polynomial from differentiation.  The tail is
    bounded by twice the first omitted term once the ratio of successive
    terms is below one half.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError(f"tau must lie in the upper half-plane, got {tau}")
    a = math.pi * tau.imag
    b = 2 * math.pi * abs(ymax)
    log_peak = b * b / (4 * a)  # max over k of -a k^2 + b k
    log_tol = math.log(tail_tol)
    for n in range(1, max_terms + 1):
        k = n + 0.5
        log_term = -a * k * k + b * k + order * math.log(2 * math.pi * (k + 1) ** 2)
        ratio = -a * (2 * k + 1) + b + order * math.log(((k + 2) / (k + 1)) ** 2)
        if ratio < -math.log(2) and log_term + math.log(4) - log_peak < log_tol:
            return n
    raise TruncationError(
        f"theta series needs more than {max_terms} terms at tau={tau}, |Im z|={ymax}; "
        "Im tau is too small for the configured truncation"
    )


@lru_cache(maxsize=64)
def _indices(j: int, n: int):
    if j in (1, 2):
        k = np.arange(-n, n + 2) - 0.5
    else:
        k = np.arange(-n, n + 1).astype(float)
    if j == 1:
        sign = 1j * np.where(np.mod(k + 0.5, 2) == 0, 1.0, -1.0)
    elif j == 4:
        sign = np.where(np.mod(k, 2) == 0, 1.0, -1.0).astype(complex)
    else:
        sign = np.ones_like(k, dtype=complex)
    return k, sign


def _check_index(j: int):
    if j not in (1, 2, 3, 4):
        raise ValueError(f"theta index must be in 1..4, got {j}")


def _resolve(tau: TauLike, z: np.ndarray, order: int):
    if isinstance(tau, ModularParameter):
        t, tol = complex(tau.tau), tau.tail_tol
        ymax = float(np.max(np.abs(z.imag))) if z.size else 0.0
        # the configured truncation is a floor; the tail bound may demand more
        return t, max(tau.truncation, required_terms(t, ymax, tol, order=order))
    t = complex(tau)
    ymax = float(np.max(np.abs(z.imag))) if z.size else 0.0
    return t, required_terms(t, ymax, order=order)


def theta_series(j: int, z, tau: TauLike, dz: int = 0, dtau: int = 0):
    """``d^dz/dz^dz d^dtau/dtau^dtau theta_j(z, tau)`` by termwise differentiation."""
    _check_index(j)
    z_arr = np.asarray(z, dtype=complex)
    t, n = _resolve(tau, z_arr.ravel(), dz + 2 * dtau)
    k, sign = _indices(j, n)
    coef = sign * np.exp(1j * np.pi * t * k * k)
    if dtau:
        coef = coef * (1j * np.pi * k * k) ** dtau
    if dz:
        coef = coef * (2j * np.pi * k) ** dz
    phase = np.exp(2j * np.pi * np.multiply.outer(z_arr, k))
    out = phase @ coef
    return complex(out) if z_arr.ndim == 0 else out


def theta(j: int, z, tau: TauLike):
    return theta_series(j, z, tau)


def theta_dz(j: int, order: int, z, tau: TauLike):
    if not 0 <= order <= 3:
        raise ValueError("z-derivative order must be between 0 and 3")
    return theta_series(j, z, tau, dz=order)


def theta_dtau(j: int, z, tau: TauLike, order: int = 1):
    return theta_series(j, z, tau, dtau=order)


def theta_constant(j: int, tau: TauLike, dz: int = 0, dtau: int = 0) -> complex:
    if j == 1 and dz % 2 == 0:
        raise ValueError("theta_1(0, tau) vanishes identically; no theta constant for j=1")
    return theta_series(j, 0.0, tau, dz=dz, dtau=dtau)


def _log_derivatives(values):
    """Derivatives of log f up to order 4 from f, f', ..., f''''."""
    f0, f1, f2, f3, f4 = values
    r1, r2, r3, r4 = f1 / f0, f2 / f0, f3 / f0, f4 / f0
    return (
        r1,
        r2 - r1**2,
        r3 - 3 * r1 * r2 + 2 * r1**3,
        r4 - 4 * r1 * r3 - 3 * r2**2 + 12 * r1**2 * r2 - 6 * r1**4,
    )


def X(p: int, tau: TauLike, order: int = 0) -> complex:
    """``X_p = 2 d/dtau log theta_p(0, tau)`` and its tau-derivatives (order <= 3)."""
    if p not in (2, 3, 4):
        raise ValueError(f"X_p is defined for p in 2..4, got {p}")
    if not 0 <= order <= 3:
        raise ValueError("X derivative order must be between 0 and 3")
    vals = [theta_series(p, 0.0, tau, dtau=m) for m in range(order + 2)]
    vals += [1.0] * (5 - len(vals))
    return 2 * _log_derivatives(vals)[order]


def X_jet(tau: TauLike, order: int = 3) -> dict:
    """``{p: [X_p, X_p', ...]}`` for p = 2, 3, 4."""
    out = {}
    for p in (2, 3, 4):
        vals = [theta_series(p, 0.0, tau, dtau=m) for m in range(order + 2)]
        vals += [1.0] * (5 - len(vals))
        logs = _log_derivatives(vals)
        out[p] = [2 * logs[m] for m in range(order + 1)]
    return out


def gamma(tau: TauLike, order: int = 0) -> complex:
    """``(2/3) (X_2 + X_3 + X_4)``."""
    return 2.0 / 3.0 * sum(X(p, tau, order) for p in (2, 3, 4))


def theta1_ratio(tau: TauLike) -> complex:
    """``theta_1'''(0) / theta_1'(0)``."""
    return theta_series(1, 0.0, tau, dz=3) / theta_series(1, 0.0, tau, dz=1)


def theta_ratio(p: int, tau: TauLike) -> complex:
    """``theta_p''(0) / theta_p(0)`` for p = 2, 3, 4."""
    return theta_series(p, 0.0, tau, dz=2) / theta_series(p, 0.0, tau)

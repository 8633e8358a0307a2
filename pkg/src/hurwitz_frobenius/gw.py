"""Genus-zero potential of the orbifold line with four Z/2 points.

The potential is a quartic polynomial in ``t0..t4`` whose coefficients are
functions of the sixth coordinate ``t`` built from the logarithmic theta
derivatives ``X_2, X_3, X_4``.  It is stored as a list of monomials so that
all derivatives in ``t0..t4`` are exact; derivatives in ``t`` come from the
termwise differentiated theta series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import theta as th

FRAMES = ("original", "tilde")
COEFFICIENTS = ("one", "t", "X2", "X3", "X4", "gamma", "f0", "f1", "f2")
# index 5 is the coordinate t
N_COORDS = 6
JET_ORDER = 3

Jets = Mapping[str, Sequence[complex]]


class MetricNotConstant(ArithmeticError):
    pass


@dataclass(frozen=True)
class GWPoint:
    t0: complex
    ti: Tuple[complex, complex, complex, complex]
    t: complex
    frame: str = "tilde"

    def __post_init__(self):
        object.__setattr__(self, "t0", complex(self.t0))
        object.__setattr__(self, "ti", tuple(complex(x) for x in self.ti))
        object.__setattr__(self, "t", complex(self.t))
        if len(self.ti) != 4:
            raise ValueError("need four twisted-sector coordinates")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}, got {self.frame!r}")

    @property
    def flat(self) -> np.ndarray:
        """(t0, t1, t2, t3, t4) as an array."""
        return np.array([self.t0, *self.ti])

    def to_original(self) -> "GWPoint":
        if self.frame == "original":
            return self
        a, b, c, d = self.ti
        return GWPoint(self.t0, (d - c, d + c, a - b, a + b), self.t, "original")

    def to_tilde(self) -> "GWPoint":
        if self.frame == "tilde":
            return self
        t1, t2, t3, t4 = self.ti
        return GWPoint(self.t0, ((t3 + t4) / 2, (t4 - t3) / 2, (t2 - t1) / 2, (t1 + t2) / 2),
                       self.t, "tilde")


@dataclass(frozen=True)
class Term:
    constant: float
    coefficient: str
    powers: Tuple[int, int, int, int, int]


def _pairs_term(const: float, coef: str, pairs) -> List[Term]:
    out = []
    for i, j in pairs:
        p = [0] * 5
        p[i] += 2
        p[j] += 2
        out.append(Term(const, coef, tuple(p)))
    return out


@lru_cache(maxsize=None)
def potential_terms(frame: str) -> Tuple[Term, ...]:
    if frame not in FRAMES:
        raise ValueError(f"unknown frame {frame!r}")
    terms = [Term(0.5, "t", (2, 0, 0, 0, 0))]
    if frame == "original":
        for i in range(1, 5):
            p = [1, 0, 0, 0, 0]
            p[i] = 2
            terms.append(Term(0.25, "one", tuple(p)))
            q = [0] * 5
            q[i] = 4
            terms.append(Term(0.25, "f1", tuple(q)))
        terms.append(Term(1.0, "f0", (0, 1, 1, 1, 1)))
        terms += _pairs_term(1 / 6, "f2", combinations(range(1, 5), 2))
    else:
        for i in range(1, 5):
            p = [1, 0, 0, 0, 0]
            p[i] = 2
            terms.append(Term(0.5, "one", tuple(p)))
            q = [0] * 5
            q[i] = 4
            terms.append(Term(-1 / 16, "gamma", tuple(q)))
        terms += _pairs_term(-0.25, "X3", [(1, 3), (2, 4)])
        terms += _pairs_term(-0.25, "X4", [(1, 4), (2, 3)])
        terms += _pairs_term(-0.25, "X2", [(3, 4), (1, 2)])
    return tuple(terms)


# pair of tilde indices -> label of the X multiplying their squares
TILDE_PAIR_LABEL = {
    frozenset((1, 3)): 3, frozenset((2, 4)): 3,
    frozenset((1, 4)): 4, frozenset((2, 3)): 4,
    frozenset((3, 4)): 2, frozenset((1, 2)): 2,
}


def f_coeffs(t: complex, order: int = 0) -> Tuple[complex, complex, complex]:
    """(f0, f1, f2) at ``t``, or their ``order``-th derivatives."""
    x = th.X_jet(t, order)
    x2, x3, x4 = (x[p][order] for p in (2, 3, 4))
    return (
        (x3 - x4) / 8,
        -x2 / 12 - x3 / 48 - x4 / 48,
        -3 / 16 * (x3 + x4),
    )


def _tau_value(t: th.TauLike) -> complex:
    return t.tau if isinstance(t, th.ModularParameter) else complex(t)


def coefficient_jets(t: th.TauLike, order: int = JET_ORDER) -> Dict[str, List[complex]]:
    """Values and t-derivatives (up to ``order``) of every coefficient function."""
    x = th.X_jet(t, order)
    jets: Dict[str, List[complex]] = {
        "one": [1.0] + [0.0] * order,
        "t": [_tau_value(t), 1.0] + [0.0] * (order - 1),
    }
    for p in (2, 3, 4):
        jets[f"X{p}"] = list(x[p])
    jets["gamma"] = [2 / 3 * (x[2][k] + x[3][k] + x[4][k]) for k in range(order + 1)]
    jets["f0"] = [(x[3][k] - x[4][k]) / 8 for k in range(order + 1)]
    jets["f1"] = [-x[2][k] / 12 - x[3][k] / 48 - x[4][k] / 48 for k in range(order + 1)]
    jets["f2"] = [-3 / 16 * (x[3][k] + x[4][k]) for k in range(order + 1)]
    return jets


def rescaled_jets(tau: th.TauLike, order: int = JET_ORDER) -> Dict[str, List[complex]]:
    """Coefficient jets in the variable ``s = tau / (pi i)`` with ``X(s) -> pi i X(tau)``.

    d/ds = pi i d/dtau, so the k-th derivative picks up ``(pi i)^(k+1)``.
    """
    base = coefficient_jets(tau, order)
    pi_i = 1j * math.pi
    out = {name: [pi_i ** (k + 1) * v for k, v in enumerate(vals)] for name, vals in base.items()
           if name not in ("one", "t")}
    out["one"] = base["one"]
    out["t"] = [_tau_value(tau) / pi_i, 1.0] + [0.0] * (order - 1)
    return out


def _monomial_derivative(powers: Sequence[int], idx: Sequence[int]):
    p = list(powers)
    factor = 1.0
    for i in idx:
        if p[i] == 0:
            return 0.0, p
        factor *= p[i]
        p[i] -= 1
    return factor, p


def _evaluate(point: GWPoint, idx: Sequence[int], jets: Jets) -> complex:
    x = point.flat
    n_t = sum(1 for i in idx if i == 5)
    poly_idx = [i for i in idx if i != 5]
    total = 0j
    for term in potential_terms(point.frame):
        factor, p = _monomial_derivative(term.powers, poly_idx)
        if factor == 0:
            continue
        coef = jets[term.coefficient][n_t]
        if coef == 0:
            continue
        total += term.constant * factor * coef * np.prod(x**np.array(p))
    return complex(total)


def _jets_for(point: GWPoint, jets: Optional[Jets]) -> Jets:
    return coefficient_jets(point.t) if jets is None else jets


def potential(point: GWPoint, jets: Optional[Jets] = None) -> complex:
    return _evaluate(point, (), _jets_for(point, jets))


def gradient(point: GWPoint, jets: Optional[Jets] = None) -> np.ndarray:
    j = _jets_for(point, jets)
    return np.array([_evaluate(point, (i,), j) for i in range(N_COORDS)])


def third_derivative(point: GWPoint, i: int, j: int, k: int, jets: Optional[Jets] = None) -> complex:
    """d^3 F / dx_i dx_j dx_k with indices 0..4 for t0..t4 and 5 for t."""
    for a in (i, j, k):
        if not 0 <= a < N_COORDS:
            raise ValueError(f"coordinate index must be in 0..5, got {a}")
    return _evaluate(point, (i, j, k), _jets_for(point, jets))


def third_derivatives(point: GWPoint, jets: Optional[Jets] = None) -> np.ndarray:
    """Full symmetric 6x6x6 tensor of third derivatives."""
    j = _jets_for(point, jets)
    c = np.zeros((N_COORDS,) * 3, dtype=complex)
    for a, b, d in combinations_with_replacement(range(N_COORDS), 3):
        val = _evaluate(point, (a, b, d), j)
        for p in {(a, b, d), (a, d, b), (b, a, d), (b, d, a), (d, a, b), (d, b, a)}:
            c[p] = val
    return c


def constant_metric(frame: str) -> np.ndarray:
    g = np.zeros((N_COORDS, N_COORDS), dtype=complex)
    g[0, 5] = g[5, 0] = 1.0
    diag = 0.5 if frame == "original" else 1.0
    for i in range(1, 5):
        g[i, i] = diag
    return g


def inverse_metric(frame: str) -> np.ndarray:
    g = np.zeros((N_COORDS, N_COORDS), dtype=complex)
    g[0, 5] = g[5, 0] = 1.0
    diag = 2.0 if frame == "original" else 1.0
    for i in range(1, 5):
        g[i, i] = diag
    return g


def metric(point: GWPoint, jets: Optional[Jets] = None) -> np.ndarray:
    return third_derivatives(point, jets)[0]


def wdvv_residual(point: GWPoint, jets: Optional[Jets] = None, metric_tol: float = 1e-9) -> float:
    """Max over (i, j, k, l) of |c_ijp g^pq c_qkl - c_ikp g^pq c_qjl|."""
    c = third_derivatives(point, jets)
    dev = np.max(np.abs(c[0] - constant_metric(point.frame)))
    if dev > metric_tol:
        raise MetricNotConstant(f"metric deviates from its constant form by {dev:.3e}")
    ginv = inverse_metric(point.frame)
    lhs = np.einsum("ijp,pq,qkl->ijkl", c, ginv, c)
    return float(np.max(np.abs(lhs - lhs.transpose(0, 2, 1, 3))))


def euler_residual(point: GWPoint, jets: Optional[Jets] = None) -> float:
    """|E F - 2F| for E = t0 d/dt0 + (1/2) sum t_i d/dt_i."""
    j = _jets_for(point, jets)
    grad = np.array([_evaluate(point, (i,), j) for i in range(5)])
    weights = np.array([1.0, 0.5, 0.5, 0.5, 0.5])
    ef = np.sum(weights * point.flat * grad)
    return float(abs(ef - 2 * _evaluate(point, (), j)))


def halphen_residuals(tau: th.TauLike, rescaled: bool = False,
                      truncation: Optional[int] = None) -> Tuple[float, float, float]:
    """Residuals of d/dt (X_a + X_b) = 2 X_a X_b for (2,3), (3,4), (4,2).

    With ``rescaled`` the triple is ``(1/pi i) X(tau/(pi i))``; there tau
    itself need not lie in the upper half-plane, and ``truncation`` applies
    to the series at ``tau/(pi i)``.
    """
    if rescaled:
        pi_i = 1j * math.pi
        s = _tau_value(tau) / pi_i
        if not s.imag > 0:
            raise ValueError(f"tau/(pi i) = {s} is not in the upper half-plane; need Re(tau) < 0")
        if truncation is not None:
            s = th.ModularParameter(s, truncation)
        x = th.X_jet(s, 1)
        # d/dtau [X(tau/pi i)/pi i] = X'(s)/(pi i)^2
        val = {p: x[p][0] / pi_i for p in x}
        der = {p: x[p][1] / pi_i**2 for p in x}
    else:
        if truncation is not None:
            tau = th.ModularParameter(_tau_value(tau), truncation)
        x = th.X_jet(tau, 1)
        val = {p: x[p][0] for p in x}
        der = {p: x[p][1] for p in x}
    return tuple(
        float(abs(der[a] + der[b] - 2 * val[a] * val[b])) for a, b in ((2, 3), (3, 4), (4, 2))
    )


def halphen_residual(tau: th.TauLike, rescaled: bool = False, truncation: Optional[int] = None) -> float:
    return max(halphen_residuals(tau, rescaled, truncation))


def frame_relations(t: complex) -> Dict[str, float]:
    """Residuals of the four linear relations between f0, f1, f2 and X_2, X_3, X_4."""
    f0, f1, f2 = f_coeffs(t)
    x = th.X_jet(t, 0)
    x2, x3, x4 = x[2][0], x[3][0], x[4][0]
    gam = 2 / 3 * (x2 + x3 + x4)
    return {
        "f2/6 + f1/2 = -gamma/16": abs(f2 / 6 + f1 / 2 + gam / 16),
        "2f2/3 - f0 = -X3/4": abs(2 * f2 / 3 - f0 + x3 / 4),
        "2f2/3 + f0 = -X4/4": abs(2 * f2 / 3 + f0 + x4 / 4),
        "3f1 - f2/3 = -X2/4": abs(3 * f1 - f2 / 3 + x2 / 4),
    }

"""Restriction to the locus where the poles sit at the 2-torsion points.

On this locus ``v_2 = (1+tau)/2``, ``v_3 = 1/2``, ``v_4 = tau/2`` and all
``V_j = 0``.  It is an affine subspace in flat coordinates, so third
derivatives of the restricted potential are structure constants along
tangent vectors.  The coordinate tau of the locus moves ``v_2`` and ``v_4``
as well, so its tangent vector is ``d/dtau + (1/2) d/dv_2 + (1/2) d/dv_4``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Dict, List, Mapping, Tuple

import numpy as np

from . import elliptic as el
from . import gw
from . import theta as th
from .covering import Covering, FlatCoords, structure_constants
from .report import VerificationReport

TAU_TANGENT = {"tau": 1.0, "v2": 0.5, "v4": 0.5}
DIRECTIONS: Dict[str, Mapping[str, complex]] = {
    "t1": {"t1": 1.0}, "t2": {"t2": 1.0}, "t3": {"t3": 1.0}, "t4": {"t4": 1.0},
    "C1": {"C1": 1.0}, "tau": TAU_TANGENT,
}
DIRECTION_NAMES = tuple(DIRECTIONS)

SQRT2 = math.sqrt(2.0)
ROOT4_2 = 2.0 ** 0.25
PI_I = 1j * math.pi


@dataclass(frozen=True)
class PairIndex:
    """Unordered pole pair -> index of the half-period value ``e_k``.

    ``e_k`` is the value of wp at the half-period ``v_i - v_j``; through the
    theta-constant formulas ``e_1, e_2, e_3`` go with theta_2, theta_3, theta_4.
    """

    table: Tuple[Tuple[Tuple[int, int], int], ...] = (
        ((1, 3), 1), ((2, 4), 1), ((1, 2), 2), ((3, 4), 2), ((2, 3), 3), ((1, 4), 3),
    )

    def __call__(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("pair index needs two distinct poles")
        key = (min(i, j), max(i, j))
        for pair, k in self.table:
            if pair == key:
                return k
        raise ValueError(f"no pair ({i}, {j}) among poles 1..4")

    def theta_label(self, i: int, j: int) -> int:
        return self(i, j) + 1


PAIRS = PairIndex()

# GW tilde index carrying the same pair labels as each pole
GW_INDEX = {1: 1, 2: 3, 3: 2, 4: 4}


@dataclass(frozen=True)
class RescalingMap:
    """Flat coordinates of the locus -> coordinates of the GW potential."""

    def gw_point(self, point: "RestrictedPoint") -> gw.GWPoint:
        ti = [0j] * 4
        for i, t in enumerate(point.t, start=1):
            ti[GW_INDEX[i] - 1] = t / ROOT4_2
        return gw.GWPoint(point.C1 / SQRT2, tuple(ti), point.tau / PI_I, "tilde")

    def jacobian(self, direction: str) -> complex:
        """d/d(flat) = J * d/d(gw) for a direction name of the locus."""
        if direction == "C1":
            return SQRT2
        if direction == "tau":
            return PI_I
        return ROOT4_2

    def gw_index(self, direction: str) -> int:
        if direction == "C1":
            return 0
        if direction == "tau":
            return 5
        return GW_INDEX[int(direction[1])]

    def jets(self, point: "RestrictedPoint"):
        return gw.rescaled_jets(point.tau)


@dataclass(frozen=True)
class RestrictedPoint:
    tau: complex
    t: Tuple[complex, complex, complex, complex]
    C1: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "t", tuple(complex(x) for x in self.t))
        object.__setattr__(self, "C1", complex(self.C1))
        if not self.tau.imag > 0:
            raise ValueError(f"Im(tau) must be positive, got {self.tau}")
        if len(self.t) != 4:
            raise ValueError("need t1..t4")
        if any(abs(x) == 0 for x in self.t):
            raise ValueError("t_i = 0 is excluded from the restricted locus")

    def to_flat(self) -> FlatCoords:
        return restricted_point(self.tau, *self.t, C1=self.C1)

    def inputs(self) -> Dict[str, object]:
        return {"tau": self.tau, "t": list(self.t), "C1": self.C1}


def restricted_point(tau: complex, t1: complex, t2: complex, t3: complex, t4: complex,
                     C1: complex = 0j) -> FlatCoords:
    tau = complex(tau)
    if any(complex(x) == 0 for x in (t1, t2, t3, t4)):
        raise ValueError("t_i = 0 is excluded from the restricted locus")
    return FlatCoords((t1, t2, t3, t4), ((1 + tau) / 2, 0.5, tau / 2), (0, 0, 0), tau, C1)


def _direction_pairs():
    return [(i, k) for i in range(1, 5) for k in range(2, 5)]


def vanishing_suite(point: RestrictedPoint, tol: float = 1e-8) -> VerificationReport:
    """Structure constants with v-directions that must vanish on the locus."""
    triples: List[Tuple[str, str, str]] = []
    names: List[str] = []
    for i in range(2, 5):
        triples.append((f"t{i}", f"v{i}", f"v{i}"))
        names.append(f"c(t{i},v{i},v{i})")
    for i, k in _direction_pairs():
        triples.append((f"t{i}", f"t{i}", f"v{k}"))
        names.append(f"c(t{i},t{i},v{k})")
    for k in range(2, 5):
        triples.append(("C1", f"v{k}", f"v{k}"))
        names.append(f"c(C1,v{k},v{k})")
    res = structure_constants(point.to_flat(), triples)
    rep = VerificationReport()
    for name, val in zip(names, res.critical):
        rep.add(name, "vanishing on the 2-torsion locus", complex(val), 0j, tol, point.inputs())
    return rep


def closed_form_constants(point: RestrictedPoint) -> Dict[Tuple[str, str, str], complex]:
    """Theta-constant values of c among t_i, C1 and the locus tau.

    Only the triples with a closed form are returned.
    """
    x = th.X_jet(point.tau, 0)
    gam = 2 / 3 * (x[2][0] + x[3][0] + x[4][0])
    t = point.t
    out: Dict[Tuple[str, str, str], complex] = {
        ("C1", "C1", "tau"): 1 / (2 * PI_I),
        ("C1", "C1", "C1"): 0j,
    }
    for i in range(1, 5):
        ti = f"t{i}"
        out[("C1", ti, ti)] = 0.5
        out[(ti, ti, ti)] = -0.75 * PI_I * t[i - 1] * gam
        for j in range(1, 5):
            if j != i:
                out[_key(ti, ti, f"t{j}")] = -t[j - 1] * PI_I / 2 * x[PAIRS.theta_label(i, j)][0]
    return out


def _key(*names: str) -> Tuple[str, ...]:
    return tuple(sorted(names, key=DIRECTION_NAMES.index))


def restricted_constants(point: RestrictedPoint, covering: Covering = None) -> Dict[Tuple[str, ...], complex]:
    """All c among {t1..t4, C1, tau} on the locus, keyed by sorted name triples."""
    triples = list(combinations_with_replacement(DIRECTION_NAMES, 3))
    coords = point.to_flat()
    res = structure_constants(coords, [[DIRECTIONS[n] for n in tr] for tr in triples],
                              covering=covering or Covering(coords))
    return {tr: complex(v) for tr, v in zip(triples, res.critical)}


def restricted_constants_report(point: RestrictedPoint, tol: float = 1e-7,
                                values: Mapping[Tuple[str, ...], complex] = None) -> VerificationReport:
    values = values if values is not None else restricted_constants(point)
    rep = VerificationReport()
    for key, expected in closed_form_constants(point).items():
        k = _key(*key)
        rep.add(f"c{k}", "restricted structure constants via theta constants",
                values[k], expected, tol, point.inputs())
    return rep


def half_period_report(tau: complex, tol: float = 1e-9) -> VerificationReport:
    """wp(v_i - v_j) on the locus against the e-value chosen by the pair index."""
    coords = restricted_point(tau, 1, 1, 1, 1)
    poles = (0j,) + coords.v
    e = el.e_values_theta(tau)
    rep = VerificationReport()
    for i, j in combinations(range(1, 5), 2):
        val = el.wp_normalized(poles[i - 1] - poles[j - 1], tau)
        rep.add(f"wp(v{i}-v{j}) = e{PAIRS(i, j)}", "pair index of half-period values",
                val, e[PAIRS(i, j) - 1], tol, {"tau": complex(tau)})
    eo = el.eta1_normalized(tau) / 2
    for i, j in combinations(range(1, 5), 2):
        lhs = el.wp_normalized(poles[i - 1] - poles[j - 1], tau) / 4 + eo
        rhs = -th.theta_ratio(PAIRS.theta_label(i, j), tau) / 4
        rep.add(f"wp(v{i}-v{j})/4 + eta1 w1 = -theta''/(4 theta)", "half-period values via theta constants",
                lhs, rhs, tol, {"tau": complex(tau)})
    return rep


def theorem_check(point: RestrictedPoint, tol: float = 1e-6,
                  values: Mapping[Tuple[str, ...], complex] = None,
                  rescaling: RescalingMap = RescalingMap()) -> VerificationReport:
    """Compare rescaled restricted structure constants with GW third derivatives.

    Every triple over {t1..t4, C1, tau} gives one entry; the metric direction
    (C1, C1, tau) is included.
    """
    values = values if values is not None else restricted_constants(point)
    gp = rescaling.gw_point(point)
    jets = rescaling.jets(point)
    rep = VerificationReport()
    for key, val in values.items():
        scale = np.prod([rescaling.jacobian(n) for n in key])
        gw_val = gw.third_derivative(gp, *(rescaling.gw_index(n) for n in key), jets=jets)
        rep.add(f"c{key} vs GW", "restricted potential equals the GW potential",
                complex(scale * val), gw_val, tol, point.inputs())
    return rep

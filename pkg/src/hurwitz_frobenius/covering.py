"""The elliptic covering with four double poles, in raw moduli and flat coordinates.

In flat coordinates on the normalized lattice ``Z + tau Z``::

    lambda(v) = sum_{i=1..4} t_i^2/4 wp(v - v_i)
                - sum_{j=2..4} V_j [zeta(v - v_j) - zeta(v) + 2 eta1 v_j]
                + eta1 omega1 sum t_i^2 + C1

with ``v_1 = 0``.  The simple-pole coefficient at ``v_1`` is ``-(V_2+V_3+V_4)``
so that the residues sum to zero.

Residue sums over the critical points of lambda are computed two ways:
directly on small circles around the zeros of lambda' (strategy "A"), and as
minus the sum of residues at the four poles (strategy "B").  Strategy B needs
an elliptic integrand, so the tau-partial is replaced by ``-h_lambda/(2 pi i)``
which differs from it by a multiple of lambda' and so leaves the critical
residues unchanged.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

from . import elliptic as el
from .numeric import (
    ContourSpec,
    ConvergenceError,
    DEFAULT_CONFIG,
    EPS,
    NumericConfig,
    Zero,
    batched_residues,
    find_zeros,
    fundamental_region,
    laurent_coefficient,
)

FLAT_NAMES = ("t1", "t2", "t3", "t4", "v2", "v3", "v4", "V2", "V3", "V4", "tau", "C1")
ALIASES = {"B1": "tau"}
N_CRITICAL = 12
RADIUS_CAP = 0.2
DEGENERATE_T = 1e-12

Direction = Union[str, Mapping[str, complex]]


class DegenerateCoordinates(ValueError):
    """Flat coordinates outside the domain of the residue formulas."""


class DegenerateCriticalPoint(ArithmeticError):
    """lambda' has a multiple zero or the zero count is wrong."""


class StrategyMismatch(ArithmeticError):
    """Critical-point and pole residue sums disagree."""


@dataclass(frozen=True)
class FlatCoords:
    t: Tuple[complex, complex, complex, complex]
    v: Tuple[complex, complex, complex]
    V: Tuple[complex, complex, complex]
    tau: complex
    C1: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(complex(x) for x in self.t))
        object.__setattr__(self, "v", tuple(complex(x) for x in self.v))
        object.__setattr__(self, "V", tuple(complex(x) for x in self.V))
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "C1", complex(self.C1))
        if len(self.t) != 4 or len(self.v) != 3 or len(self.V) != 3:
            raise ValueError("flat coordinates need 4 t's, 3 v's and 3 V's")
        if not self.tau.imag > 0:
            raise ValueError(f"Im(tau) must be positive, got {self.tau}")

    @property
    def B1(self) -> complex:
        return self.tau

    def vector(self) -> np.ndarray:
        return np.array([*self.t, *self.v, *self.V, self.tau, self.C1])

    @classmethod
    def from_vector(cls, x: Sequence[complex]) -> "FlatCoords":
        x = list(x)
        return cls(tuple(x[0:4]), tuple(x[4:7]), tuple(x[7:10]), x[10], x[11])

    def get(self, name: str) -> complex:
        return complex(self.vector()[FLAT_NAMES.index(ALIASES.get(name, name))])

    def shifted(self, name: str, h: complex) -> "FlatCoords":
        x = self.vector()
        x[FLAT_NAMES.index(ALIASES.get(name, name))] += h
        return FlatCoords.from_vector(x)

    def scaled(self, s: float) -> "FlatCoords":
        """Apply the Euler flow: t by sqrt(s), V and C1 by s."""
        r = math.sqrt(s)
        return replace(self, t=tuple(r * x for x in self.t), V=tuple(s * x for x in self.V),
                       C1=s * self.C1)


@dataclass(frozen=True)
class RawModuli:
    """Pole positions ``a`` (a_1 = 0 implied), double-pole coefficients ``u``,
    simple-pole coefficients ``s`` (all four, summing to zero), shift ``c`` and
    half-periods."""

    a: Tuple[complex, complex, complex]
    u: Tuple[complex, complex, complex, complex]
    s: Tuple[complex, complex, complex, complex]
    c: complex
    omega1: complex
    omega2: complex

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(complex(x) for x in self.a))
        object.__setattr__(self, "u", tuple(complex(x) for x in self.u))
        object.__setattr__(self, "s", tuple(complex(x) for x in self.s))
        if len(self.a) != 3 or len(self.u) != 4 or len(self.s) != 4:
            raise ValueError("raw moduli need a2..a4, u1..u4 and s1..s4")
        scale = 1 + max(abs(x) for x in self.s)
        if abs(sum(self.s)) > 1e-12 * scale:
            raise ValueError(f"simple-pole coefficients must sum to zero, got {sum(self.s)}")
        lat = self.lattice
        pts = (0j,) + self.a
        for i in range(4):
            for j in range(i):
                d = (pts[i] - pts[j]) / (2 * lat.omega1)
                b = round(d.imag / lat.tau.imag)
                m = round((d - b * lat.tau).real)
                if abs(d - m - b * lat.tau) < 1e-9:
                    raise ValueError(f"poles a_{j + 1} and a_{i + 1} coincide modulo the lattice")

    @classmethod
    def from_free(cls, a, u, s_free, c, omega1, omega2) -> "RawModuli":
        """Build from s_2..s_4; s_1 is fixed by the residue theorem."""
        s_free = tuple(complex(x) for x in s_free)
        return cls(a, u, (-sum(s_free),) + s_free, c, omega1, omega2)

    @property
    def lattice(self) -> el.LatticeParams:
        return el.LatticeParams(complex(self.omega1), complex(self.omega2))

    @property
    def poles(self) -> Tuple[complex, ...]:
        return (0j,) + self.a


def lambda_raw(z, raw: RawModuli):
    lat = raw.lattice
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, complex(raw.c))
    for a, u, s in zip(raw.poles, raw.u, raw.s):
        out = out + u * el.wp(z - a, lat)
        if s:
            out = out - s * el.zeta_w(z - a, lat)
    return complex(out) if out.ndim == 0 else out


def raw_eta1(raw: RawModuli) -> complex:
    return el.eta1_normalized(raw.lattice.tau) / (2 * complex(raw.omega1))


def raw_to_flat(raw: RawModuli) -> FlatCoords:
    """Flat coordinates of a raw covering; principal square root for t_i."""
    if any(x == 0 for x in raw.u):
        raise DegenerateCoordinates("u_i = 0 gives a pole of lower order")
    w1 = complex(raw.omega1)
    eta1 = raw_eta1(raw)
    t = tuple(-cmath.sqrt(u) / w1 for u in raw.u)
    v = tuple(a / (2 * w1) for a in raw.a)
    V = tuple(s / (2 * w1) for s in raw.s[1:])
    C1 = raw.c - eta1 / w1 * sum(raw.u) + eta1 / w1 * sum(a * s for a, s in zip(raw.a, raw.s[1:]))
    return FlatCoords(t, v, V, raw.lattice.tau, C1)


def flat_to_raw(coords: FlatCoords, omega1: complex = 0.5) -> RawModuli:
    w1 = complex(omega1)
    two_eta = 2 * el.eta1_normalized(coords.tau)
    u = tuple((w1 * t) ** 2 for t in coords.t)
    a = tuple(2 * w1 * v for v in coords.v)
    s = tuple(2 * w1 * V for V in coords.V)
    c = (coords.C1 + two_eta / 4 * sum(t * t for t in coords.t)
         - two_eta * sum(v * V for v, V in zip(coords.v, coords.V)))
    return RawModuli.from_free(a, u, s, c, w1, w1 * coords.tau)


def _normalize_direction(d: Direction) -> Dict[str, complex]:
    if isinstance(d, str):
        d = {d: 1.0}
    out: Dict[str, complex] = {}
    for k, c in d.items():
        k = ALIASES.get(k, k)
        if k not in FLAT_NAMES:
            raise ValueError(f"unknown flat direction {k!r}; expected one of {FLAT_NAMES}")
        out[k] = out.get(k, 0) + complex(c)
    return out


class Covering:
    """lambda for fixed flat coordinates, with partials and critical points."""

    def __init__(self, coords: FlatCoords, config: NumericConfig = DEFAULT_CONFIG):
        self.coords = coords
        self.config = config
        self.tau = coords.tau
        self.poles = np.array((0j,) + coords.v)
        self.t = np.array(coords.t)
        self.t2 = self.t**2
        self.V = np.array((-sum(coords.V),) + coords.V)
        self.two_eta, self.d_two_eta = el._eta_series(self.tau)

    # -- evaluation -----------------------------------------------------
    def _bundle(self, v: np.ndarray, dtau: bool = True) -> dict:
        z = v[None, ...] - self.poles.reshape((4,) + (1,) * v.ndim)
        return el.weierstrass_bundle(z, self.tau, dtau)

    def _check(self, v: np.ndarray):
        for p in self.poles:
            el.check_poles(v - p, self.tau)

    def value(self, v):
        v = np.asarray(v, dtype=complex)
        self._check(v)
        b = self._bundle(v, dtau=False)
        out = self._value(v, b)
        return complex(out) if out.ndim == 0 else out

    def _value(self, v, b):
        out = np.tensordot(self.t2 / 4, b["wp0"], axes=1)
        K = b["zeta"][1:] - b["zeta"][0] + self.two_eta * self.poles[1:].reshape((3,) + (1,) * v.ndim)
        out = out - np.tensordot(self.V[1:], K, axes=1)
        return out + self.two_eta / 4 * self.t2.sum() + self.coords.C1

    def _derivative(self, b, order: int):
        out = np.tensordot(self.t2 / 4, b[f"wp{order}"], axes=1)
        w = b[f"wp{order - 1}"]
        return out + np.tensordot(self.V[1:], w[1:] - w[0], axes=1)

    def derivative(self, v, order: int = 1):
        """v-derivative of lambda of order 1, 2 or 3."""
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        v = np.asarray(v, dtype=complex)
        out = self._derivative(self._bundle(v, dtau=False), order)
        return complex(out) if out.ndim == 0 else out

    def _partial(self, name: str, v: np.ndarray, b: dict, elliptic_tau: bool):
        shape = (3,) + (1,) * v.ndim
        if name == "C1":
            return np.ones(v.shape, dtype=complex)
        if name[0] == "t" and name != "tau":
            i = int(name[1]) - 1
            return self.t[i] / 2 * b["wp0"][i] + self.two_eta / 2 * self.t[i]
        if name[0] == "v":
            j = int(name[1]) - 1
            return -self.t2[j] / 4 * b["wp1"][j] - self.V[j] * (b["wp0"][j] + self.two_eta)
        if name[0] == "V":
            j = int(name[1]) - 1
            return -(b["zeta"][j] - b["zeta"][0] + self.two_eta * self.poles[j])
        # tau
        K_t = b["zeta_t"][1:] - b["zeta_t"][0] + self.d_two_eta * self.poles[1:].reshape(shape)
        out = (np.tensordot(self.t2 / 4, b["wp_t"], axes=1)
               - np.tensordot(self.V[1:], K_t, axes=1)
               + self.d_two_eta / 4 * self.t2.sum())
        if elliptic_tau:
            # -h/(2 pi i): adds a multiple of lambda' that is analytic at critical points
            out = out - (b["zeta"][0] - self.two_eta * v) * self._derivative(b, 1) / (2j * np.pi)
        return out

    def partial(self, direction: Direction, v, elliptic_tau: bool = False):
        """Partial derivative of lambda along a flat direction at fixed v."""
        v = np.asarray(v, dtype=complex)
        self._check(v)
        out = self._partials([_normalize_direction(direction)], v, self._bundle(v), elliptic_tau)[0]
        return complex(out) if out.ndim == 0 else out

    def _partials(self, directions: List[Dict[str, complex]], v, b, elliptic_tau: bool):
        cache: Dict[str, np.ndarray] = {}
        out = []
        for d in directions:
            acc = np.zeros(v.shape, dtype=complex)
            for name, coef in d.items():
                if name not in cache:
                    cache[name] = self._partial(name, v, b, elliptic_tau)
                acc = acc + coef * cache[name]
            out.append(acc)
        return out

    def h(self, v):
        """Elliptic combination ``-2 pi i d_tau lambda + (zeta - 2 eta1 v) lambda'``."""
        v = np.asarray(v, dtype=complex)
        self._check(v)
        b = self._bundle(v)
        out = -2j * np.pi * self._partial("tau", v, b, False) + (b["zeta"][0] - self.two_eta * v) * self._derivative(b, 1)
        return complex(out) if out.ndim == 0 else out

    # -- critical points --------------------------------------------------
    @cached_property
    def region(self):
        return fundamental_region(self.tau, self.config.newton_grid)

    @cached_property
    def critical_points(self) -> List[Zero]:
        if np.any(np.abs(self.t) < DEGENERATE_T):
            raise DegenerateCoordinates("residue formulas need every t_i nonzero")

        def f(v):
            return self._derivative(self._bundle(v, dtau=False), 1)

        def df(v):
            return self._derivative(self._bundle(v, dtau=False), 2)

        with np.errstate(all="ignore"):
            zeros = find_zeros(f, df, self.region, tol=1e-9, config=self.config,
                               singularities=(0j,) + self.coords.v)
        total = sum(z.multiplicity for z in zeros)
        if any(z.multiplicity != 1 for z in zeros) or total != N_CRITICAL:
            mults = [z.multiplicity for z in zeros]
            raise DegenerateCriticalPoint(
                f"lambda' should have {N_CRITICAL} simple zeros, found multiplicities {mults}"
            )
        return zeros

    def _radii(self, centers: np.ndarray, others: np.ndarray) -> np.ndarray:
        pts = np.concatenate([centers, others])
        radii = []
        for i, c in enumerate(centers):
            rest = np.delete(pts, i)
            d = float(np.min(self.region.boundary_distance(c, rest)))
            radii.append(min(RADIUS_CAP, 0.5 * d))
        return np.array(radii)

    def residue_sums(self, products: Sequence[Sequence[Direction]], strategy: str = "A") -> np.ndarray:
        """Sum over critical points of res (prod of partials) / lambda' dv."""
        dirs: List[Dict[str, complex]] = []
        index: Dict[Tuple, int] = {}
        prod_idx = []
        for prod in products:
            row = []
            for d in prod:
                nd = _normalize_direction(d)
                key = tuple(sorted(nd.items(), key=lambda kv: kv[0]))
                if key not in index:
                    index[key] = len(dirs)
                    dirs.append(nd)
                row.append(index[key])
            prod_idx.append(row)
        crit = np.array([z.location for z in self.critical_points])
        if strategy == "A":
            centers, others, sign, ell = crit, self.poles, 1.0, False
        elif strategy == "B":
            centers, others, sign, ell = self.poles, crit, -1.0, True
        else:
            raise ValueError("strategy must be 'A' or 'B'")
        radii = self._radii(centers, others)

        def evaluate(points):
            b = self._bundle(points)
            parts = self._partials(dirs, points, b, ell)
            inv = 1.0 / self._derivative(b, 1)
            out = np.empty((len(prod_idx),) + points.shape, dtype=complex)
            for k, row in enumerate(prod_idx):
                acc = inv
                for j in row:
                    acc = acc * parts[j]
                out[k] = acc
            return out

        res = batched_residues(evaluate, centers, radii, self.config)
        return sign * res.sum(axis=1)


@dataclass(frozen=True)
class ResidueResult:
    products: Tuple[Tuple[Direction, ...], ...]
    critical: np.ndarray
    poles: np.ndarray

    @property
    def discrepancy(self) -> float:
        return float(np.max(np.abs(self.critical - self.poles), initial=0.0))


def residue_values(coords: FlatCoords, products: Sequence[Sequence[Direction]],
                   tol: float = 1e-8, config: NumericConfig = DEFAULT_CONFIG,
                   covering: "Covering | None" = None) -> ResidueResult:
    """Both strategies for a batch of products; raises if they disagree."""
    cov = covering or Covering(coords, config)
    a = cov.residue_sums(products, "A")
    b = cov.residue_sums(products, "B")
    out = ResidueResult(tuple(tuple(p) for p in products), a, b)
    scale = np.maximum(1.0, np.abs(a))
    bad = np.abs(a - b) > tol * scale
    if np.any(bad):
        k = int(np.argmax(np.abs(a - b) / scale))
        raise StrategyMismatch(
            f"critical-point and pole residue sums differ by {abs(a[k] - b[k]):.3e} for {products[k]}"
        )
    return out


def lambda_flat(v, coords: FlatCoords):
    return Covering(coords).value(v)


def dlambda(direction: Direction, v, coords: FlatCoords):
    return Covering(coords).partial(direction, v)


def metric(coords: FlatCoords, x: Direction, y: Direction, tol: float = 1e-8) -> complex:
    return complex(residue_values(coords, [(x, y)], tol).critical[0])


def metric_matrix(coords: FlatCoords, tol: float = 1e-8,
                  covering: "Covering | None" = None) -> Tuple[np.ndarray, float]:
    """12x12 metric in the order of ``FLAT_NAMES`` and the strategy discrepancy."""
    pairs = [(FLAT_NAMES[i], FLAT_NAMES[j]) for i in range(12) for j in range(i, 12)]
    res = residue_values(coords, pairs, tol, covering=covering)
    g = np.zeros((12, 12), dtype=complex)
    for (x, y), val in zip(pairs, res.critical):
        i, j = FLAT_NAMES.index(x), FLAT_NAMES.index(y)
        g[i, j] = g[j, i] = val
    return g, res.discrepancy


def flat_metric_constants() -> np.ndarray:
    """Constant metric in flat coordinates (order of ``FLAT_NAMES``)."""
    g = np.zeros((12, 12), dtype=complex)
    for i in range(4):
        g[i, i] = 0.5
    for k in range(3):
        g[4 + k, 7 + k] = g[7 + k, 4 + k] = -1.0
    g[10, 11] = g[11, 10] = 1 / (2j * np.pi)
    return g


def structure_constant(coords: FlatCoords, x: Direction, y: Direction, z: Direction,
                       tol: float = 1e-8) -> complex:
    return complex(residue_values(coords, [(x, y, z)], tol).critical[0])


def structure_constants(coords: FlatCoords, triples: Sequence[Sequence[Direction]],
                        tol: float = 1e-8, covering: "Covering | None" = None) -> ResidueResult:
    return residue_values(coords, triples, tol, covering=covering)


# -- recovery of flat coordinates from lambda ---------------------------------


def _lattice_reduce_near(z: complex, target: complex, tau: complex) -> complex:
    d = z - target
    b = round(d.imag / tau.imag)
    a = round((d - b * tau).real)
    best = z - a - b * tau
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            cand = z - (a + i) - (b + j) * tau
            if abs(cand - target) < abs(best - target):
                best = cand
    return best


def _find_poles(cov: Covering, config: NumericConfig) -> np.ndarray:
    """Double poles of lambda by Newton on 1/lambda with the multiplicity-2 step.

    The step ``z + 2 lambda/lambda'`` converges quadratically to a double
    pole; seeds that end elsewhere are discarded.
    """
    region = fundamental_region(cov.tau, 24)
    m = region.density
    a = (np.arange(m) + 0.5) / m
    A, B = np.meshgrid(a, a, indexing="ij")
    z = (A + B * cov.tau).ravel()
    cap = 4 * min(1.0, abs(cov.tau)) / m
    with np.errstate(all="ignore"):
        for _ in range(config.newton_maxiter):
            b = cov._bundle(z, dtau=False)
            step = 2 * cov._value(z, b) / cov._derivative(b, 1)
            step = np.where(np.isfinite(step), step, 0)
            big = np.abs(step) > cap
            step[big] *= cap / np.abs(step[big])
            z = z + step
            if np.all(np.abs(step) < 1e-15):
                break
        b = cov._bundle(z, dtau=False)
        dist = np.abs(cov._value(z, b) / cov._derivative(b, 1))
    ok = np.isfinite(z) & ~(dist > 1e-10)
    found: List[complex] = []
    for zi in region.reduce(z[ok]):
        if found and np.min(region.boundary_distance(zi, np.array(found))) < config.merge_radius:
            continue
        found.append(complex(zi))
    if len(found) != 4:
        raise ConvergenceError(f"expected 4 double poles of lambda, located {len(found)}")
    return np.array(found)


def _periodic_line_integral(f, y: float, config: NumericConfig) -> complex:
    """Integral of a 1-periodic function along ``x + i y``, x in [0, 1]."""
    n = config.min_samples
    total = np.sum(f((np.arange(n) / n) + 1j * y))
    prev = total / n
    while n < config.max_samples:
        x = (np.arange(n) + 0.5) / n
        new = f(x + 1j * y)
        total = total + np.sum(new)
        n *= 2
        est = total / n
        if abs(est - prev) <= config.contour_rtol * abs(est) + 64 * EPS * np.mean(np.abs(new)):
            return complex(est)
        prev = est
    raise ConvergenceError("line integral for C1 did not converge")


def _k_period(v_j: complex, y: float, tau: complex) -> complex:
    """Integral over [iy, 1+iy] of zeta(v - v_j) - zeta(v) + 2 eta1 v_j.

    Each row of the cotangent series contributes -pi i sign(Im) on a
    horizontal unit segment, so the value is a multiple of 2 pi i fixed by
    the rows separating the line from the lifts of the two poles.
    """
    h = tau.imag
    top = int(abs(v_j.imag) / h) + abs(y) / h + 3
    n = np.arange(-int(top), int(top) + 1)
    s = np.sign(y - v_j.imag + n * h) - np.sign(y + n * h)
    return complex(-1j * np.pi * np.sum(s))


def recompute_flat(coords: FlatCoords, config: NumericConfig = DEFAULT_CONFIG) -> FlatCoords:
    """Rebuild flat coordinates from lambda by residues and a period integral.

    Poles are located as double zeros of 1/lambda.  The pole nearest the
    origin is v_1; the others are matched to the labels of ``coords`` and
    lifted to the representatives nearest the given v_j, which fixes the
    homotopy class of the path from v_1.  t_i is read from the order -2
    Laurent coefficient with the sign of the input, V_j from the residue,
    and C1 from the a-period of lambda dv along a horizontal line.
    """
    cov = Covering(coords, config)
    tau = coords.tau
    region = fundamental_region(tau)
    found = _find_poles(cov, config)
    d0 = region.boundary_distance(0j, found)
    base = found[int(np.argmin(d0))]
    base = _lattice_reduce_near(complex(base), 0j, tau)
    rest = [complex(p) for p in found if region.boundary_distance(base, np.array([p]))[0] > 1e-6]
    lifts = [0j]
    for target in coords.v:
        dists = [float(region.boundary_distance(target + base, np.array([p]))[0]) for p in rest]
        k = int(np.argmin(dists))
        p = rest.pop(k)
        lifts.append(_lattice_reduce_near(p - base, target, tau))
    lifts_arr = np.array(lifts)

    def lam(v):
        return cov.value(np.asarray(v) + base)

    t_new, V_new = [], []
    for i, p in enumerate(lifts):
        others = np.delete(lifts_arr, i)
        r = min(RADIUS_CAP, 0.5 * float(np.min(region.boundary_distance(p, others))))
        contour = ContourSpec(p, r)
        a2 = laurent_coefficient(lam, p, -2, contour, config)
        a1 = laurent_coefficient(lam, p, -1, contour, config)
        root = cmath.sqrt(4 * a2)
        if abs(root) < 1e-8:
            raise DegenerateCoordinates(f"t_{i + 1} is too close to 0 to fix its sign")
        ref = coords.t[i]
        t_new.append(root if abs(root - ref) <= abs(root + ref) else -root)
        if i:
            V_new.append(-a1)

    ims = np.sort(lifts_arr.imag)
    gaps = np.diff(np.concatenate([ims, [ims[0] + tau.imag]]))
    k = int(np.argmax(gaps))
    y = float(ims[k] + gaps[k] / 2)
    integral = _periodic_line_integral(lam, y, config)
    C1 = integral + sum(Vj * _k_period(vj, y, tau) for Vj, vj in zip(V_new, lifts[1:]))
    return FlatCoords(tuple(t_new), tuple(lifts[1:]), tuple(V_new), tau, C1)

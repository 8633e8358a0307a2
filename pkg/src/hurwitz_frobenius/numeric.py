"""Complex-analytic numerical primitives.

Contour integrals on circles (trapezoidal rule with sample doubling), Laurent
coefficient extraction, Newton-based zero finding on a parallelogram and
Richardson-extrapolated central differences.  Every function is pure; the
integrands passed in are expected to accept numpy arrays of complex points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

ComplexFn = Callable[[np.ndarray], np.ndarray]

EPS = np.finfo(float).eps


class ConvergenceError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class PoleError(ValueError):
    """An evaluation point is too close to a pole."""


@dataclass(frozen=True)
class NumericConfig:
    contour_rtol: float = 1e-12
    min_samples: int = 16
    max_samples: int = 2**20
    newton_grid: int = 32
    newton_maxiter: int = 60
    merge_radius: float = 1e-6
    diff_step: float = 1e-5
    diff_rtol: float = 1e-6


DEFAULT_CONFIG = NumericConfig()


@dataclass(frozen=True)
class ContourSpec:
    center: complex
    radius: float
    samples: int = 16

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"contour radius must be positive, got {self.radius}")
        n = int(self.samples)
        if n < 16 or n & (n - 1):
            raise ValueError(f"samples must be a power of two >= 16, got {self.samples}")
        if not np.isfinite(complex(self.center)):
            raise ValueError("contour center must be finite")


@dataclass(frozen=True)
class Region:
    """Parallelogram ``corner + a*span1 + b*span2`` with ``a, b`` in ``[0, 1)``.

    With ``periodic=True`` the spans are treated as lattice periods: zeros are
    reduced modulo the lattice and deduplicated across the boundary.
    """

    corner: complex
    span1: complex
    span2: complex
    density: int = 32
    periodic: bool = False

    def __post_init__(self):
        if abs((np.conj(self.span1) * self.span2).imag) < 1e-14 * abs(self.span1) * abs(self.span2):
            raise ValueError("region spans are linearly dependent over the reals")

    def coords(self, z):
        """Real coordinates (a, b) of ``z`` in the span basis."""
        w = np.asarray(z, dtype=complex) - self.corner
        det = (np.conj(self.span1) * self.span2).imag
        a = (np.conj(w) * self.span2).imag / det
        b = (np.conj(self.span1) * w).imag / det
        return a, b

    def reduce(self, z):
        a, b = self.coords(z)
        return z - np.floor(a) * self.span1 - np.floor(b) * self.span2

    def contains(self, z):
        a, b = self.coords(z)
        return (a >= 0) & (a < 1) & (b >= 0) & (b < 1)

    def boundary_distance(self, z, other):
        """Distance from ``z`` to ``other`` (modulo the lattice if periodic)."""
        d = np.asarray(other, dtype=complex) - z
        if not self.periodic:
            return np.abs(d)
        a, b = self.coords(self.corner + d)
        d = d - np.round(a) * self.span1 - np.round(b) * self.span2
        # rounding in a skew basis is not always the shortest vector
        best = np.abs(d)
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                best = np.minimum(best, np.abs(d + i * self.span1 + j * self.span2))
        return best


def fundamental_region(tau: complex, density: int = 32, corner: complex = 0j) -> Region:
    return Region(corner=corner, span1=1.0 + 0j, span2=complex(tau), density=density, periodic=True)


@dataclass(frozen=True)
class Zero:
    location: complex
    multiplicity: int
    residual: float


def _trapezoid_mean(f: ComplexFn, center: complex, radius: float, n: int, offset: int, step: int):
    k = np.arange(offset, n, step)
    u = radius * np.exp(2j * np.pi * k / n)
    g = np.asarray(f(center + u), dtype=complex) * u
    return g


def contour_integral(f: ComplexFn, contour: ContourSpec, config: NumericConfig = DEFAULT_CONFIG) -> complex:
    """(1/2 pi i) times the integral of ``f`` over the circle ``contour``.

    Samples are doubled (reusing the previous nodes) until two successive
    estimates agree to ``config.contour_rtol`` relative to the estimate, or to
    a floor set by the roundoff level of the sampled integrand.
    """
    c = complex(contour.center)
    r = float(contour.radius)
    n = int(contour.samples)
    g = _trapezoid_mean(f, c, r, n, 0, 1)
    if not np.all(np.isfinite(g)):
        raise ConvergenceError(f"non-finite integrand on contour |z-{c}|={r}")
    total = g.sum()
    prev = total / n
    while n < config.max_samples:
        g_new = _trapezoid_mean(f, c, r, 2 * n, 1, 2)
        if not np.all(np.isfinite(g_new)):
            raise ConvergenceError(f"non-finite integrand on contour |z-{c}|={r}")
        total = total + g_new.sum()
        n *= 2
        est = total / n
        floor = 64 * EPS * float(np.mean(np.abs(g_new)))
        if abs(est - prev) <= config.contour_rtol * abs(est) + floor:
            return complex(est)
        prev = est
    raise ConvergenceError(
        f"contour integral did not converge with {n} samples (center {c}, radius {r}); "
        "a pole is likely on or near the contour"
    )


def laurent_coefficient(
    f: ComplexFn,
    center: complex,
    k: int,
    contour: Optional[ContourSpec] = None,
    config: NumericConfig = DEFAULT_CONFIG,
) -> complex:
    """Coefficient of ``(z - center)**k`` in the Laurent expansion of ``f``."""
    if contour is None:
        contour = ContourSpec(center, 0.1)
    if abs(complex(contour.center) - complex(center)) > 0:
        raise ValueError("contour must be centred at the expansion point")
    c = complex(center)
    return contour_integral(lambda z: f(z) * (z - c) ** (-k - 1), contour, config)


def winding_number(f: ComplexFn, df: ComplexFn, center: complex, radius: float,
                   config: NumericConfig = DEFAULT_CONFIG) -> float:
    """Zeros minus poles of ``f`` inside the circle (argument principle)."""
    val = contour_integral(lambda z: df(z) / f(z), ContourSpec(center, radius), config)
    return val.real


def _newton(f: ComplexFn, df: ComplexFn, z: np.ndarray, maxiter: int, max_step: float):
    z = z.copy()
    active = np.ones(z.shape, dtype=bool)
    for _ in range(maxiter):
        if not active.any():
            break
        za = z[active]
        with np.errstate(all="ignore"):
            step = f(za) / df(za)
        bad = ~np.isfinite(step)
        step[bad] = 0
        big = np.abs(step) > max_step
        step[big] *= max_step / np.abs(step[big])
        za = za - step
        z[active] = za
        done = (np.abs(step) <= 1e-15 * (1 + np.abs(za))) | bad
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return z


def find_zeros(
    f: ComplexFn,
    df: ComplexFn,
    region: Region,
    tol: float = 1e-9,
    config: NumericConfig = DEFAULT_CONFIG,
    singularities: Sequence[complex] = (),
) -> List[Zero]:
    """Zeros of ``f`` in ``region`` by Newton iteration from a seed grid.

    Returns deduplicated zeros (reduced into the region when it is periodic)
    with ``|f| < tol`` and their multiplicities from the local winding number.
    Known poles of ``f`` go in ``singularities`` so that the winding circles
    exclude them.
    """
    m = region.density
    a = (np.arange(m) + 0.5) / m
    A, B = np.meshgrid(a, a, indexing="ij")
    seeds = (region.corner + A * region.span1 + B * region.span2).ravel()
    cell = min(abs(region.span1), abs(region.span2)) / m
    z = _newton(f, df, seeds, config.newton_maxiter, max_step=4 * cell)
    with np.errstate(all="ignore"):
        res = np.abs(f(z))
    ok = np.isfinite(z) & np.isfinite(res) & (res < tol)
    if region.periodic:
        z = region.reduce(z)
    else:
        ok &= region.contains(z)
    found: List[complex] = []
    residuals: List[float] = []
    for zi, ri in sorted(zip(z[ok], res[ok]), key=lambda p: p[1]):
        if found and np.min(region.boundary_distance(zi, np.array(found))) < config.merge_radius:
            continue
        found.append(complex(zi))
        residuals.append(float(ri))
    if not found:
        with np.errstate(all="ignore"):
            seed_vals = np.abs(f(seeds))
        worst = int(np.nanargmin(seed_vals))
        raise ConvergenceError(
            f"Newton iteration failed from every seed; smallest |f| at cell {divmod(worst, m)} "
            f"(z = {seeds[worst]})"
        )
    arr = np.array(found)
    poles = np.asarray(singularities, dtype=complex)
    zeros = []
    span_scale = min(abs(region.span1), abs(region.span2))
    for i, zi in enumerate(found):
        others = np.concatenate([np.delete(arr, i), poles])
        d = np.min(region.boundary_distance(zi, others)) if others.size else span_scale
        radius = min(0.5 * d, 0.1 * span_scale)
        mult = winding_number(f, df, zi, radius, config)
        zeros.append(Zero(zi, int(round(mult)), residuals[i]))
    return zeros


def numeric_derivative(
    f: Callable[[complex], complex],
    at: complex,
    step: Optional[float] = None,
    config: NumericConfig = DEFAULT_CONFIG,
) -> complex:
    """Central difference with one Richardson step (h and h/2)."""
    at = complex(at)
    h = (config.diff_step if step is None else step) * (abs(at) + 1)

    def central(hh):
        return (complex(f(at + hh)) - complex(f(at - hh))) / (2 * hh)

    d1 = central(h)
    d2 = central(h / 2)
    rich = (4 * d2 - d1) / 3
    if abs(rich - d2) > config.diff_rtol * max(1.0, abs(rich)):
        raise ConvergenceError(
            f"Richardson levels disagree at {at}: {d2} vs {rich}; function not smooth at this scale"
        )
    return rich


def argument_principle_count(
    f: ComplexFn,
    df: ComplexFn,
    region: Region,
    nodes: int = 4096,
) -> float:
    """Zeros minus poles of ``f`` inside the parallelogram ``region``.

    Integrates ``df/f`` along the boundary with Gauss-Legendre panels.  For an
    elliptic ``f`` on its period parallelogram the result is zero.
    """
    x, w = np.polynomial.legendre.leggauss(32)
    panels = max(1, nodes // 32)
    edges = [
        (region.corner, region.span1),
        (region.corner + region.span1, region.span2),
        (region.corner + region.span1 + region.span2, -region.span1),
        (region.corner + region.span2, -region.span2),
    ]
    total = 0j
    for start, d in edges:
        for p in range(panels):
            s = (p + (x + 1) / 2) / panels
            z = start + s * d
            total += np.sum(w / 2 / panels * df(z) / f(z)) * d
    return (total / (2j * np.pi)).real


def batched_residues(
    evaluate: Callable[[np.ndarray], np.ndarray],
    centers: Sequence[complex],
    radii: Sequence[float],
    config: NumericConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Contour integrals of several integrands around several circles at once.

    ``evaluate(points)`` receives an array of shape ``(K, n)`` and returns the
    integrand values with shape ``(F, K, n)``.  The result has shape
    ``(F, K)``.  All circles share the sample count, doubled until every
    entry has converged in the sense of :func:`contour_integral`.
    """
    c = np.asarray(centers, dtype=complex)[:, None]
    r = np.asarray(radii, dtype=float)[:, None]

    def sample(n, offset, step):
        k = np.arange(offset, n, step)
        u = r * np.exp(2j * np.pi * k / n)
        g = np.asarray(evaluate(c + u)) * u
        if not np.all(np.isfinite(g)):
            raise ConvergenceError("non-finite integrand on a residue contour")
        return g

    n = config.min_samples
    g = sample(n, 0, 1)
    total = g.sum(axis=-1)
    prev = total / n
    while n < config.max_samples:
        g_new = sample(2 * n, 1, 2)
        total = total + g_new.sum(axis=-1)
        n *= 2
        est = total / n
        floor = 64 * EPS * np.mean(np.abs(g_new), axis=-1)
        if np.all(np.abs(est - prev) <= config.contour_rtol * np.abs(est) + floor):
            return est
        prev = est
    raise ConvergenceError(f"batched residues did not converge with {n} samples per contour")

"""Random sample points for the verification suites and tests."""
from __future__ import annotations

import numpy as np

from .covering import FlatCoords
from .gw import GWPoint
from .numeric import fundamental_region
from .restriction import RestrictedPoint

MIN_POLE_SEPARATION = 0.15


def _complex(rng: np.random.Generator, lo: float, hi: float) -> complex:
    return complex(rng.uniform(lo, hi), rng.uniform(lo, hi))


def _modulus(rng: np.random.Generator, lo: float, hi: float) -> complex:
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(lo, hi))


def sample_tau(rng: np.random.Generator, im_lo: float = 0.5, im_hi: float = 3.0,
               re_max: float = 1.0) -> complex:
    return complex(rng.uniform(-re_max, re_max), rng.uniform(im_lo, im_hi))


def sample_theta_args(rng: np.random.Generator):
    """(z, tau) with Im tau in [0.5, 3], |Re tau| <= 1, |z| <= 1."""
    tau = sample_tau(rng)
    r, phi = rng.uniform(0, 1), rng.uniform(0, 2 * np.pi)
    return complex(r * np.exp(1j * phi)), tau


def _nonzero(rng: np.random.Generator, lo: float, hi: float) -> complex:
    return complex(rng.uniform(lo, hi) * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def sample_flat(rng: np.random.Generator, V_scale: float = 0.3, zero_V: bool = False) -> FlatCoords:
    """Generic flat coordinates with well separated poles and |t_i| in [0.3, 1]."""
    tau = _modulus(rng, 0.8, 1.6)
    region = fundamental_region(tau)
    while True:
        ab = rng.uniform(0.05, 0.95, (3, 2))
        v = tuple(complex(a + b * tau) for a, b in ab)
        pts = np.array((0j,) + v)
        if all(region.boundary_distance(pts[i], pts[:i]).min() > MIN_POLE_SEPARATION
               for i in range(1, 4)):
            break
    t = tuple(_nonzero(rng, 0.3, 1.0) for _ in range(4))
    V = (0j, 0j, 0j) if zero_V else tuple(_complex(rng, -V_scale, V_scale) for _ in range(3))
    return FlatCoords(t, v, V, tau, _complex(rng, -1, 1))


def sample_restricted(rng: np.random.Generator) -> RestrictedPoint:
    """Im tau in [0.8, 2], |t_i| in [0.3, 1], |C1| <= 1."""
    tau = _modulus(rng, 0.8, 2.0)
    t = tuple(_nonzero(rng, 0.3, 1.0) for _ in range(4))
    C1 = _nonzero(rng, 0.0, 1.0)
    return RestrictedPoint(tau, t, C1)


def sample_gw(rng: np.random.Generator, frame: str = "tilde") -> GWPoint:
    """|t_i| <= 1 and Im t in [0.8, 2]."""
    t = _modulus(rng, 0.8, 2.0)
    ti = tuple(_nonzero(rng, 0.0, 1.0) for _ in range(4))
    return GWPoint(_nonzero(rng, 0.0, 1.0), ti, t, frame)

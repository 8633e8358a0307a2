"""Verification suites run by the command-line tool."""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from . import covering as cv
from . import elliptic as el
from . import gw
from . import restriction as rs
from . import theta as th
from .numeric import argument_principle_count, fundamental_region, numeric_derivative
from .report import VerificationReport
from .sampling import sample_flat, sample_gw, sample_restricted, sample_tau, sample_theta_args

DEFAULT_TOLERANCES: Dict[str, float] = {
    "heat": 1e-10,
    "theta_periodic": 1e-12,
    "legendre": 1e-10,
    "e_values": 1e-8,
    "invariants": 1e-8,
    "theta_identity": 1e-8,
    "scaling": 1e-10,
    "zeta_derivative": 1e-6,
    "fs_periodic": 1e-9,
    "halphen": 1e-8,
    "wdvv": 1e-7,
    "euler": 1e-9,
    "metric_constant": 1e-9,
    "frame": 1e-10,
    "hurwitz_metric": 1e-8,
    "strategy": 1e-8,
    "critical_count": 1e-6,
    "round_trip": 1e-8,
    "raw_flat": 1e-9,
    "structure": 1e-7,
    "grading": 1e-9,
    "vanishing": 1e-8,
    "pair_index": 1e-9,
    "theorem": 1e-6,
}

SUITES = ("special-functions", "gw", "hurwitz-metric", "structure-constants", "restriction", "theorem")


class ConfigError(ValueError):
    """Invalid suite configuration."""


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = "all"
    samples: int = 10
    seed: int = 42
    tolerances: Mapping[str, float] = field(default_factory=dict)
    truncation: Optional[int] = None
    out: Optional[str] = None
    fmt: str = "text"
    parallel: bool = False

    def __post_init__(self):
        if self.suite != "all" and self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES + ('all',))}")
        if self.samples < 1:
            raise ConfigError("sample count must be at least 1")
        for name, value in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}; known: {', '.join(DEFAULT_TOLERANCES)}")
            if not value > 0:
                raise ConfigError(f"tolerance {name} must be positive, got {value}")
        if self.truncation is not None and not 1 <= self.truncation <= th.MAX_TERMS:
            raise ConfigError(f"truncation must be between 1 and {th.MAX_TERMS}")
        if self.fmt not in ("json", "text"):
            raise ConfigError(f"unknown format {self.fmt!r}")

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def tau(self, tau: complex):
        """tau carrying the truncation override, if any."""
        if self.truncation is None:
            return complex(tau)
        return th.ModularParameter(complex(tau), self.truncation)

    def to_dict(self) -> Dict[str, object]:
        d = asdict(self)
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        d.pop("out")
        d.pop("parallel")
        return d


# -- special functions ---------------------------------------------------------


def special_functions_suite(cfg: SuiteConfig, rng: np.random.Generator) -> VerificationReport:
    rep = VerificationReport()
    tol = cfg.tol("heat")
    worst, where = 0.0, {}
    for _ in range(10 * cfg.samples):
        z, tau = sample_theta_args(rng)
        tp = cfg.tau(tau)
        for j in (1, 2, 3, 4):
            r = abs(th.theta_dz(j, 2, z, tp) - 4j * math.pi * th.theta_dtau(j, z, tp))
            if r >= worst:
                worst, where = r, {"j": j, "z": z, "tau": tau}
    rep.add("heat equation", "theta heat equation", worst, 0.0, tol, where, residual=worst)

    z, tau = sample_theta_args(rng)
    val = abs(th.theta(3, z + 1, cfg.tau(tau)) - th.theta(3, z, cfg.tau(tau)))
    rep.add("theta_3 period 1", "theta quasi-periodicity", val, 0.0, cfg.tol("theta_periodic"),
            {"z": z, "tau": tau}, residual=val)

    for _ in range(cfg.samples):
        tau = sample_tau(rng)
        w1 = complex(rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
        c = el.constants(el.LatticeParams(w1, w1 * tau), legendre_tol=1.0)
        inputs = {"omega1": w1, "omega2": w1 * tau}
        rep.add("Legendre identity", "quasi-periods and periods", c.eta1 * c.omega2 - c.eta2 * c.omega1,
                0.5j * math.pi, cfg.tol("legendre"), inputs)
        rep.add("e1 + e2 + e3 = 0", "half-period values", c.e_sum, 0j, cfg.tol("e_values"), inputs)
        g2 = -4 * (c.e1 * c.e2 + c.e2 * c.e3 + c.e3 * c.e1)
        rep.add("g2 from Laurent = -4 sum e_i e_j", "modular invariants", c.g2, g2,
                cfg.tol("invariants") * max(1.0, abs(g2)), inputs)
        g3 = 4 * c.e1 * c.e2 * c.e3
        rep.add("g3 from Laurent = 4 e1 e2 e3", "modular invariants", c.g3, g3,
                cfg.tol("invariants") * max(1.0, abs(g3)), inputs)

    for _ in range(cfg.samples):
        tau = sample_tau(rng)
        tp = cfg.tau(tau)
        inputs = {"tau": tau}
        half = (0.5, -0.5 - tau / 2, tau / 2)
        e_theta = el.e_values_theta(tp)
        for k in range(3):
            rep.add(f"e{k + 1}: wp(half period) = theta-constant form", "half-period values via theta constants",
                    el.wp_normalized(half[k], tau), e_theta[k], cfg.tol("e_values"), inputs)
        lhs = th.theta1_ratio(tp)
        rhs = sum(th.theta_ratio(p, tp) for p in (2, 3, 4))
        rep.add("theta_1'''/theta_1' = sum theta_p''/theta_p", "theta-constant identity", lhs, rhs,
                cfg.tol("theta_identity") * max(1.0, abs(lhs)), inputs)
        eo = el.eta1_normalized(tau) / 2
        rep.add("eta1 w1 = -theta_1'''/(12 theta_1')", "quasi-period via theta constants",
                eo, el.eta1_omega1_theta(tp), cfg.tol("theta_identity"), inputs)
        rep.add("eta1 w1 = -(pi i/4) gamma", "quasi-period via gamma", eo,
                -0.25j * math.pi * th.gamma(tp), cfg.tol("theta_identity"), inputs)

    for _ in range(cfg.samples):
        tau = sample_tau(rng, 0.8, 2.0)
        z = complex(rng.uniform(0.1, 0.4), rng.uniform(0.1, 0.4))
        w1 = 1.3
        lhs = (2 * w1) ** 2 * el.wp(z, el.LatticeParams(w1, w1 * tau))
        rhs = el.wp_normalized(z / (2 * w1), tau)
        rep.add("(2w1)^2 wp(z; 2w1, 2w2) = wp(z/2w1; tau)", "lattice scaling", lhs, rhs,
                cfg.tol("scaling") * max(1.0, abs(rhs)), {"z": z, "tau": tau})
        dz = numeric_derivative(lambda x: el.zeta_normalized(x, tau), z)
        rep.add("-zeta' = wp", "zeta derivative", -dz, el.wp_normalized(z, tau),
                cfg.tol("zeta_derivative") * max(1.0, abs(dz)), {"z": z, "tau": tau})
        h = lambda v: el.fs_ellipticize(lambda x: el.wp_dtau_normalized(x, tau),
                                        lambda x: el.wp_normalized(x, tau, 1), v, tau)
        base = h(z)
        shift = max(abs(h(z + 1) - base), abs(h(z + tau) - base))
        rep.add("h_wp periodic", "elliptization of the tau-derivative", shift, 0.0,
                cfg.tol("fs_periodic") * max(1.0, abs(base)), {"z": z, "tau": tau}, residual=shift)
    return rep


# -- GW potential -------------------------------------------------------------------


def gw_suite(cfg: SuiteConfig, rng: np.random.Generator) -> VerificationReport:
    rep = VerificationReport()
    for _ in range(cfg.samples):
        tau = sample_tau(rng)
        r = gw.halphen_residual(cfg.tau(tau))
        rep.add("Halphen system", "Halphen system", r, 0.0, cfg.tol("halphen"), {"tau": tau}, residual=r)
    for _ in range(cfg.samples):
        s = sample_tau(rng)
        tau = 1j * math.pi * s
        r = gw.halphen_residual(tau, rescaled=True, truncation=cfg.truncation)
        rep.add("Halphen system, rescaled triple", "Halphen system under tau -> tau/(pi i)", r, 0.0,
                cfg.tol("halphen"), {"tau": tau}, residual=r)
    metrics = []
    for _ in range(2 * cfg.samples):
        p = sample_gw(rng)
        jets = gw.coefficient_jets(cfg.tau(p.t))
        inputs = {"t0": p.t0, "t": list(p.ti), "tt": p.t}
        r = gw.wdvv_residual(p, jets)
        rep.add("WDVV", "associativity", r, 0.0, cfg.tol("wdvv"), inputs, residual=r)
        e = gw.euler_residual(p, jets)
        rep.add("Euler quasi-homogeneity", "Euler field", e, 0.0, cfg.tol("euler"), inputs, residual=e)
        q = p.to_original()
        d = abs(gw.potential(p, jets) - gw.potential(q, jets))
        rep.add("original vs tilde potential", "linear change of frame", d, 0.0, cfg.tol("frame"), inputs, residual=d)
        metrics.append(gw.metric(p, jets))
    m = np.array(metrics)
    dev = float(np.max(np.abs(m - m.mean(axis=0))))
    rep.add("GW metric constant", "metric from third derivatives", dev, 0.0, cfg.tol("metric_constant"),
            {"points": len(metrics)}, residual=dev)
    for _ in range(cfg.samples):
        t = sample_tau(rng)
        rel = gw.frame_relations(cfg.tau(t))
        for name, r in rel.items():
            rep.add(name, "linear relations of the coefficient functions", r, 0.0, cfg.tol("frame"), {"t": t}, residual=r)
    return rep


# -- Hurwitz covering -----------------------------------------------------------------


def tabulated_metric() -> np.ndarray:
    """Constant metric as tabulated with weight 1/k_i = 1/2 on the v-V block."""
    g = cv.flat_metric_constants()
    for k in range(3):
        g[4 + k, 7 + k] = g[7 + k, 4 + k] = 0.5
    return g


def hurwitz_metric_suite(cfg: SuiteConfig, rng: np.random.Generator) -> VerificationReport:
    rep = VerificationReport()
    table = tabulated_metric()
    residue_table = cv.flat_metric_constants()
    mats = []
    for _ in range(cfg.samples):
        coords = sample_flat(rng)
        inputs = {"flat": coords.vector()}
        cov = cv.Covering(coords)
        g, disc = cv.metric_matrix(coords, tol=np.inf, covering=cov)
        mats.append(g)
        rep.add("metric vs tabulated constants", "flat metric table", g, table,
                cfg.tol("hurwitz_metric"), inputs)
        v_block = float(np.max(np.abs(g - residue_table)))
        rep.add("metric vs residue-derived constants", "flat metric, v-V entries -1",
                v_block, 0.0, cfg.tol("hurwitz_metric"), inputs, residual=v_block)
        rep.add("metric: critical vs pole residues", "sum of residues of an elliptic function",
                disc, 0.0, cfg.tol("strategy"), inputs, residual=disc)
        count = sum(z.multiplicity for z in cov.critical_points)
        region = fundamental_region(coords.tau, corner=-0.013 - 0.011j)
        wind = argument_principle_count(lambda v: cov.derivative(v, 1), lambda v: cov.derivative(v, 2), region)
        # zeros minus poles vanishes; the four poles of lambda' are triple
        rep.add("zeros of lambda'", "simple ramification points", float(count), float(wind + 12),
                cfg.tol("critical_count"), inputs)
        back = cv.recompute_flat(coords)
        r = float(np.max(np.abs(back.vector() - coords.vector())))
        rep.add("flat coordinates from lambda", "flat coordinates by residues and periods", r, 0.0,
                cfg.tol("round_trip"), inputs, residual=r)
        raw = cv.flat_to_raw(coords, omega1=complex(rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5)))
        z = 2 * raw.omega1 * complex(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9) * coords.tau.imag)
        try:
            lam_raw = cv.lambda_raw(z, raw)
            lam_flat = cv.lambda_flat(z / (2 * raw.omega1), cv.raw_to_flat(raw))
            r = abs(lam_raw - lam_flat) / max(1.0, abs(lam_raw))
        except el.PoleError:
            r = 0.0
        rep.add("raw and flat forms agree", "lambda in flat coordinates", r, 0.0, cfg.tol("raw_flat"),
                inputs, residual=r)
    m = np.array(mats)
    dev = float(np.max(np.abs(m - m.mean(axis=0))))
    rep.add("metric constant across points", "flatness", dev, 0.0, cfg.tol("hurwitz_metric"),
            {"points": len(mats)}, residual=dev)
    return rep


def structure_constant_closed_forms(coords: cv.FlatCoords) -> Dict[tuple, complex]:
    """Closed forms for c among t_i, C1, tau at points with V = 0."""
    tau = coords.tau
    eo = el.eta1_normalized(tau) / 2
    poles = (0j,) + coords.v
    t = coords.t
    out = {("tau", "C1", "C1"): 1 / (2j * math.pi)}
    for i in range(4):
        ti = f"t{i + 1}"
        out[(ti, ti, "C1")] = 0.5
        out[(ti, ti, ti)] = 3 * t[i] * eo
        for j in range(4):
            if j != i:
                out[(ti, ti, f"t{j + 1}")] = t[j] * (el.wp_normalized(poles[i] - poles[j], tau) / 4 + eo)
    return out


def structure_constants_suite(cfg: SuiteConfig, rng: np.random.Generator) -> VerificationReport:
    rep = VerificationReport()
    for _ in range(cfg.samples):
        coords = sample_flat(rng, zero_V=True)
        inputs = {"flat": coords.vector()}
        forms = structure_constant_closed_forms(coords)
        keys = list(forms)
        res = cv.structure_constants(coords, keys, tol=cfg.tol("strategy"))
        for k, val in zip(keys, res.critical):
            rep.add(f"c{k}", "structure constants among t, C1, tau", complex(val), forms[k],
                    cfg.tol("structure"), inputs)
        rep.add("structure constants: critical vs pole residues", "sum of residues of an elliptic function",
                res.discrepancy, 0.0, cfg.tol("strategy"), inputs, residual=res.discrepancy)
    for _ in range(cfg.samples):
        coords = sample_flat(rng)
        inputs = {"flat": coords.vector()}
        s = 1.3
        trip = [("t1", "t1", "t2"), ("t3", "t3", "C1")] + [(f"t{i}",) * 3 for i in range(1, 5)]
        a = cv.structure_constants(coords, trip).critical
        eo = el.eta1_normalized(coords.tau) / 2
        V = (-sum(coords.V),) + coords.V
        for i in range(4):
            expected = 3 * coords.t[i] * eo + V[i] ** 2 / coords.t[i] ** 3
            rep.add(f"c(t{i + 1},t{i + 1},t{i + 1}) with V != 0", "structure constants among t, C1, tau",
                    complex(a[2 + i]), expected, cfg.tol("structure") * max(1.0, abs(expected)), inputs)
        b = cv.structure_constants(coords.scaled(s), trip[:2]).critical
        rep.add("grading of c(t1,t1,t2)", "Euler field degrees", b[0], math.sqrt(s) * a[0],
                cfg.tol("grading") * max(1.0, abs(a[0])), inputs)
        rep.add("grading of c(t3,t3,C1)", "Euler field degrees", b[1], a[1], cfg.tol("grading"), inputs)
    return rep


# -- restriction and theorem -------------------------------------------------------


def restriction_suite(cfg: SuiteConfig, rng: np.random.Generator) -> VerificationReport:
    rep = VerificationReport()
    for _ in range(cfg.samples):
        point = sample_restricted(rng)
        rep.extend(rs.vanishing_suite(point, cfg.tol("vanishing")))
        rep.extend(rs.restricted_constants_report(point, cfg.tol("structure")))
        rep.extend(rs.half_period_report(point.tau, cfg.tol("pair_index")))
    return rep


def theorem_suite(cfg: SuiteConfig, rng: np.random.Generator) -> VerificationReport:
    rep = VerificationReport()
    for _ in range(cfg.samples):
        point = sample_restricted(rng)
        sub = rs.theorem_check(point, cfg.tol("theorem"))
        worst = max(sub.entries, key=lambda e: e.residual)
        rep.add("restricted potential = GW potential (max over triples)",
                "restricted potential equals the GW potential",
                worst.computed, worst.expected, cfg.tol("theorem"),
                {**point.inputs(), "worst_triple": worst.name, "triples": sub.total},
                residual=sub.max_residual)
    return rep


RUNNERS: Dict[str, Callable[[SuiteConfig, np.random.Generator], VerificationReport]] = {
    "special-functions": special_functions_suite,
    "gw": gw_suite,
    "hurwitz-metric": hurwitz_metric_suite,
    "structure-constants": structure_constants_suite,
    "restriction": restriction_suite,
    "theorem": theorem_suite,
}


def _run_one(name: str, cfg: SuiteConfig) -> VerificationReport:
    # each suite has its own stream so "all" is the concatenation of single runs
    rng = np.random.default_rng([cfg.seed, SUITES.index(name)])
    return RUNNERS[name](cfg, rng)


def run_suite(cfg: SuiteConfig) -> VerificationReport:
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    start = time.perf_counter()
    if cfg.parallel and len(names) > 1:
        with ProcessPoolExecutor(max_workers=len(names)) as pool:
            parts = list(pool.map(_run_one, names, [cfg] * len(names)))
    else:
        parts = [_run_one(n, cfg) for n in names]
    report = VerificationReport(config=cfg.to_dict())
    for p in parts:
        report.extend(p)
    report.wall_time = time.perf_counter() - start
    return report

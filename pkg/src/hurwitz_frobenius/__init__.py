"""Numerical verification of a Hurwitz-Frobenius potential against the
genus-zero GW potential of the (2,2,2,2) orbifold line."""
from .covering import Covering, FlatCoords, RawModuli, metric_matrix, recompute_flat, structure_constants
from .elliptic import LatticeParams, constants, wp, wp_normalized, zeta_normalized
from .gw import GWPoint, potential, third_derivative, wdvv_residual
from .numeric import ConvergenceError, PoleError
from .report import VerificationReport, emit_report, parse_report
from .restriction import RestrictedPoint, restricted_constants, theorem_check
from .suites import SuiteConfig, run_suite
from .theta import ModularParameter, X, gamma

__version__ = "0.1.0"

__all__ = [
    "Covering", "FlatCoords", "RawModuli", "metric_matrix", "recompute_flat", "structure_constants",
    "LatticeParams", "constants", "wp", "wp_normalized", "zeta_normalized",
    "GWPoint", "potential", "third_derivative", "wdvv_residual",
    "ConvergenceError", "PoleError", "VerificationReport", "emit_report", "parse_report",
    "RestrictedPoint", "restricted_constants", "theorem_check", "SuiteConfig", "run_suite",
    "ModularParameter", "X", "gamma",
]

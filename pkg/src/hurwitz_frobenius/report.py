"""Verification reports and their JSON / text serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

REPORT_VERSION = "1.0"


def encode_value(x: Any) -> Any:
    """JSON-safe form: complex numbers become ``{"re": .., "im": ..}``."""
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [encode_value(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [encode_value(v) for v in x]
    if isinstance(x, dict):
        return {str(k): encode_value(v) for k, v in x.items()}
    return x


def decode_value(x: Any) -> Any:
    if isinstance(x, dict):
        if set(x) == {"re", "im"}:
            return complex(x["re"], x["im"])
        return {k: decode_value(v) for k, v in x.items()}
    if isinstance(x, list):
        return [decode_value(v) for v in x]
    return x


@dataclass
class Entry:
    name: str
    anchor: str
    inputs: Dict[str, Any]
    computed: Any
    expected: Any
    residual: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        if not self.anchor:
            raise ValueError(f"entry {self.name!r} needs a nonempty anchor")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        self.residual = float(self.residual)
        # NaN residuals fail
        self.passed = bool(self.residual <= self.tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "inputs": encode_value(self.inputs),
            "computed": encode_value(self.computed),
            "expected": encode_value(self.expected),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "Entry":
        e = cls(d["name"], d["anchor"], decode_value(d["inputs"]), decode_value(d["computed"]),
                decode_value(d["expected"]), d["residual"], d["tolerance"])
        if e.passed != d["pass"]:
            raise ValueError(f"entry {e.name!r}: pass flag inconsistent with residual")
        return e


@dataclass
class VerificationReport:
    entries: List[Entry] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)
    wall_time: Optional[float] = None

    def add(self, name: str, anchor: str, computed: Any, expected: Any, tolerance: float,
            inputs: Optional[Dict[str, Any]] = None, residual: Optional[float] = None) -> Entry:
        if residual is None:
            residual = float(np.max(np.abs(np.asarray(computed) - np.asarray(expected)), initial=0.0))
        entry = Entry(name, anchor, dict(inputs or {}), computed, expected, residual, tolerance)
        self.entries.append(entry)
        return entry

    def extend(self, other: "VerificationReport"):
        self.entries.extend(other.entries)

    @property
    def total(self) -> int:
        return len(self.entries)

    @property
    def passed(self) -> int:
        return sum(e.passed for e in self.entries)

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def max_residual(self) -> float:
        return max((e.residual for e in self.entries), default=0.0)

    def failures(self) -> List[Entry]:
        return [e for e in self.entries if not e.passed]

    def summary(self, include_timing: bool = False) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "total": self.total,
            "passed": self.passed,
            "failed": self.total - self.passed,
            "max_residual": self.max_residual,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "config": encode_value(self.config),
            "entries": [e.to_dict() for e in self.entries],
            "summary": self.summary(include_timing),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "VerificationReport":
        if d.get("version") != REPORT_VERSION:
            raise ValueError(f"unsupported report version {d.get('version')!r}")
        rep = cls([Entry.from_dict(e) for e in d["entries"]], decode_value(d.get("config", {})))
        rep.wall_time = d["summary"].get("wall_time")
        return rep

    def __eq__(self, other):
        if not isinstance(other, VerificationReport):
            return NotImplemented
        return self.to_dict(True) == other.to_dict(True)


def _fmt(x: Any) -> str:
    if isinstance(x, complex):
        return f"{x.real:.6g}{x.imag:+.6g}j"
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x[:4]) + (", ..." if len(x) > 4 else "") + "]"
    return str(x)


def emit_report(report: VerificationReport, fmt: str = "json", include_timing: bool = False) -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(include_timing), indent=2, sort_keys=False) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    rows = [("status", "identity", "residual", "tolerance", "anchor")]
    for e in report.entries:
        rows.append(("PASS" if e.passed else "FAIL", e.name, f"{e.residual:.3e}", f"{e.tolerance:.1e}", e.anchor))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    s = report.summary(include_timing)
    tail = f"{s['passed']}/{s['total']} passed, max residual {s['max_residual']:.3e}"
    if include_timing and report.wall_time is not None:
        tail += f", {report.wall_time:.2f} s"
    lines.append(tail)
    return ("\n".join(lines) + "\n").encode()


def parse_report(data: bytes) -> VerificationReport:
    return VerificationReport.from_dict(json.loads(data.decode()))

"""Command-line entry point: ``hurwitz-verify``."""
from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional

from .report import emit_report
from .suites import SUITES, ConfigError, SuiteConfig, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parse_tol(items: List[str]) -> Dict[str, float]:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {name}: {value!r} is not a number") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hurwitz-verify",
                                description="Run numerical verification suites and report residuals.")
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override a residual tolerance; repeatable")
    p.add_argument("--truncation", type=int, default=None, metavar="N",
                   help="minimum number of theta series terms")
    p.add_argument("--out", default=None, help="write the report here instead of standard output")
    p.add_argument("--format", dest="fmt", default="text", choices=("json", "text"))
    p.add_argument("--parallel", action="store_true", help="run suites in separate processes")
    p.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = SuiteConfig(args.suite, args.samples, args.seed, _parse_tol(args.tol),
                          args.truncation, args.out, args.fmt, args.parallel)
    except ConfigError as exc:
        print(f"hurwitz-verify: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out is not None:
        try:
            open(cfg.out, "ab").close()
        except OSError as exc:
            print(f"hurwitz-verify: cannot write {cfg.out}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    report = run_suite(cfg)
    data = emit_report(report, cfg.fmt, include_timing=args.timing)
    if cfg.out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(cfg.out, "wb") as fh:
            fh.write(data)
    return EXIT_PASS if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

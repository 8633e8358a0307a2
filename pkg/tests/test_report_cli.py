import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from hurwitz_frobenius import cli
from hurwitz_frobenius.report import Entry, VerificationReport, decode_value, emit_report, encode_value, parse_report
from hurwitz_frobenius.suites import SUITES, ConfigError, SuiteConfig, run_suite

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
cplx = st.builds(complex, finite, finite)


def test_empty_report():
    d = json.loads(emit_report(VerificationReport()))
    assert d["entries"] == [] and d["summary"]["total"] == 0 and "version" in d
    assert "wall_time" not in d["summary"]


def test_pass_flag_follows_residual():
    r = VerificationReport()
    assert r.add("a", "x", 1.0, 1.0 + 1e-9, 1e-8).passed
    assert not r.add("b", "x", 1.0, 1.1, 1e-8).passed
    assert not r.add("c", "x", float("nan"), 0.0, 1e-8).passed
    assert r.total == 3 and r.passed == 1 and not r.ok


def test_anchor_required():
    with pytest.raises(ValueError):
        Entry("a", "", {}, 0, 0, 0, 1e-8)


@settings(max_examples=50)
@given(cplx, st.lists(cplx, max_size=4))
def test_complex_encoding_round_trip(z, zs):
    assert decode_value(encode_value(z)) == z
    assert decode_value(encode_value(zs)) == zs


def test_emit_parse_round_trip():
    r = VerificationReport(config={"seed": 3})
    r.add("x", "identity", 1 + 2j, 1 + 2j, 1e-8, {"tau": 0.5j, "t": [1, 2j]})
    r.add("y", "identity", [1j, 2], [1j, 2.5], 1e-8)
    r.wall_time = 0.25
    assert parse_report(emit_report(r, include_timing=True)) == r
    text = emit_report(r, "text").decode()
    assert "PASS" in text and "FAIL" in text and "1/2 passed" in text


def test_config_validation():
    with pytest.raises(ConfigError):
        SuiteConfig(suite="nope")
    with pytest.raises(ConfigError):
        SuiteConfig(samples=0)
    with pytest.raises(ConfigError):
        SuiteConfig(tolerances={"heat": -1})
    with pytest.raises(ConfigError):
        SuiteConfig(tolerances={"unknown": 1})


def test_special_functions_suite_passes():
    rep = run_suite(SuiteConfig("special-functions", samples=2))
    names = {e.name for e in rep.entries}
    assert "heat equation" in names and "Legendre identity" in names
    assert rep.ok
    assert all(e.anchor for e in rep.entries)


def test_truncation_override_still_passes():
    assert run_suite(SuiteConfig("gw", samples=1, truncation=40)).ok


def test_theorem_suite_deterministic():
    cfg = SuiteConfig("theorem", samples=2, seed=7)
    a, b = emit_report(run_suite(cfg), "json"), emit_report(run_suite(cfg), "json")
    assert a == b


def test_all_is_sum_of_suites():
    totals = [run_suite(SuiteConfig(s, samples=1)).total for s in ("special-functions", "gw")]
    # "all" uses the same per-suite random streams as the single runs
    parts = [run_suite(SuiteConfig(s, samples=1)) for s in SUITES]
    whole = run_suite(SuiteConfig("all", samples=1))
    assert whole.total == sum(p.total for p in parts)
    assert totals == [parts[0].total, parts[1].total]
    assert [e.to_dict() for e in whole.entries] == [e.to_dict() for p in parts for e in p.entries]


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["--suite", "gw", "--samples", "1", "--format", "json", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["summary"]["failed"] == 0 and d["config"]["suite"] == "gw"
    assert cli.main(["--suite", "gw", "--samples", "1", "--tol", "wdvv=1e-30"]) == 1
    assert "FAIL" in capsys.readouterr().out
    assert cli.main(["--suite", "bogus"]) == 2
    assert cli.main(["--tol", "wdvv"]) == 2
    assert cli.main(["--samples", "0"]) == 2
    assert cli.main(["--out", str(tmp_path / "missing" / "r.json")]) == 2


def test_cli_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hurwitz_frobenius", "--suite", "special-functions",
                           "--samples", "1", "--format", "json"], capture_output=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["total"] > 0

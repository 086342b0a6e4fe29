"""Expansion cache round-trips and CLI behaviour (exit codes, formats)."""

from __future__ import annotations

import json

import pytest

from qlimits.cache import ExpansionCache
from qlimits.cli import main
from qlimits.hecke import CASES
from qlimits.series import QSeries


# ----------------------------------------------------------------------
# cache
# ----------------------------------------------------------------------


def test_cache_roundtrip_exact(tmp_path):
    cache = ExpansionCache(tmp_path)
    series = QSeries(-3, (1, 0, -(10**50), 0, 7, 123456789, 0, -1))
    cache.store("form:test", series)
    loaded = cache.load("form:test")
    assert loaded is not None
    assert loaded.valuation == series.valuation
    assert loaded.precision == series.precision
    assert loaded.coeffs == series.coeffs


def test_cache_miss_returns_none(tmp_path):
    assert ExpansionCache(tmp_path).load("nothing") is None


def test_cache_roundtrip_deep_master(tmp_path):
    cache = ExpansionCache(tmp_path)
    deep = CASES["eo"].master_series(10_000)
    cache.store("form:F", deep)
    loaded = cache.load("form:F")
    assert loaded is not None and loaded.coeffs == deep.coeffs


def test_cache_serves_truncation_from_deeper_entry(tmp_path):
    cache = ExpansionCache(tmp_path)
    deep = CASES["eo"].master_series(50)
    cache.store("form:F", deep)
    got = cache.load("form:F", min_precision=12)
    assert got is not None and got.precision == 12
    assert got == deep.truncate(12)


def test_cache_short_entry_misses(tmp_path):
    cache = ExpansionCache(tmp_path)
    cache.store("form:F", CASES["eo"].master_series(10))
    assert cache.load("form:F", min_precision=20) is None


def test_cache_detects_corruption(tmp_path):
    cache = ExpansionCache(tmp_path)
    series = QSeries(0, (1, 2, 3))
    path = cache.store("k", series)
    text = path.read_text().replace(" 2\n", " 5\n")
    path.write_text(text)
    with pytest.warns(UserWarning, match="corrupted"):
        assert cache.load("k") is None
    assert not path.exists()  # dropped so callers recompute


def test_cache_rejects_rational_series(tmp_path):
    from fractions import Fraction

    with pytest.raises(ValueError):
        ExpansionCache(tmp_path).store("k", QSeries(0, (Fraction(1, 2),)))


def test_cache_file_is_human_readable(tmp_path):
    cache = ExpansionCache(tmp_path)
    path = cache.store("form:g", CASES["eo"].cusp_series(10))
    lines = path.read_text().splitlines()
    assert lines[0] == "qexp 1"
    assert lines[1] == "key form:g"
    assert any(line == "1 1" for line in lines)  # q^1 coefficient 1


# ----------------------------------------------------------------------
# CLI
# ----------------------------------------------------------------------


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_expand_form_json(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys, "expand", "--form", "F", "--precision", "12",
        "--format", "json", "--cache-dir", str(tmp_path),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["form"] == "F"
    assert payload["valuation"] == -1
    assert payload["precision"] == 12
    assert payload["coeffs"] == [[-1, "-1"], [3, "2"], [7, "1"], [11, "-2"]]


def test_cli_expand_uses_cache(capsys, tmp_path):
    args = ("expand", "--form", "H", "--precision", "12", "--format", "json",
            "--cache-dir", str(tmp_path))
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0 and out1 == out2
    assert list(tmp_path.glob("*.qexp"))


def test_cli_expand_raw_eta(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys, "expand", "--eta", "4:2,8:2", "--precision", "6",
        "--format", "json", "--cache-dir", str(tmp_path),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["coeffs"] == [[1, "1"], [5, "-2"]]


def test_cli_expand_bad_eta_is_usage_error(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "expand", "--eta", "1:2", "--cache-dir", str(tmp_path)
    )
    assert code == 2 and "usage error" in err


def test_cli_expand_needs_exactly_one_source(capsys, tmp_path):
    code, _, err = run_cli(capsys, "expand", "--cache-dir", str(tmp_path))
    assert code == 2


def test_cli_basis(capsys):
    code, out, _ = run_cli(
        capsys, "basis", "--case", "gko", "--m", "-1",
        "--precision", "12", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["coeffs"][0] == [1, "1"]
    assert payload["recipe"] == [[0, "1"]]


def test_cli_basis_bad_index(capsys):
    code, _, err = run_cli(capsys, "basis", "--case", "gko", "--m", "6")
    assert code == 2 and "index set" in err


def test_cli_hecke_u(capsys):
    code, out, _ = run_cli(
        capsys, "hecke", "--form", "F", "--op", "U", "--prime", "3",
        "--precision", "4", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert [1, "2"] in payload["coeffs"]  # C(3) = 2


def test_cli_hecke_T_displayed(capsys):
    code, out, _ = run_cli(
        capsys, "hecke", "--form", "F", "--op", "T", "--prime", "3",
        "--precision", "3", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["coeffs"] == [[-3, "-3"], [1, "2"]]


def test_cli_hecke_T_needs_master(capsys):
    code, _, err = run_cli(
        capsys, "hecke", "--form", "g", "--op", "T", "--prime", "3"
    )
    assert code == 2 and "master" in err


def test_cli_verify_residue_filter_usage_error(capsys):
    code, _, err = run_cli(capsys, "verify", "--case", "bg", "--prime", "5")
    assert code == 2
    assert "3 (mod 4)" in err


def test_cli_verify_single_cell(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--case", "gko", "--prime", "2", "--mmax", "0",
        "--ncheck", "10", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    (report,) = payload
    assert report["all_passed"]
    val_entries = [
        e for e in report["entries"] if e["check"] == "valuation_law"
    ]
    assert val_entries and val_entries[0]["actual"] == "1"  # v_2(C(2)) = 1


def test_cli_verify_budget_violation_exit_code(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--case", "eo", "--prime", "11", "--mmax", "2",
        "--budget", "1000", "--format", "json",
    )
    assert code == 2  # budget error


def test_cli_sweep(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--case", "eo", "--primes-below", "120"
    )
    assert code == 0
    assert "nondivisibility_sweep" in out


def test_cli_verify_table_output(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--case", "bg", "--prime", "3", "--mmax", "0",
        "--ncheck", "10",
    )
    assert code == 0
    assert "case bg: PASS" in out

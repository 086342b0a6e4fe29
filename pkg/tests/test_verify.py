"""Verification engines: chains, laws, identities, reports, determinism."""

from __future__ import annotations

import pytest

import oracle
from qlimits.hecke import CASES
from qlimits.ntheory import vp
from qlimits.series import InsufficientPrecision
from qlimits.verify import (
    GridSpec,
    coefficient_chain,
    nondivisibility_sweep,
    run_case_verification,
    verify_congruence_lemma,
    verify_convergence_law,
    verify_hecke_decomposition,
    verify_operator_identities,
    verify_valuation_law,
    verify_vanishing_even_hecke,
)

# Values derived once through the naive oracle pipeline (tests/oracle.py)
# and re-derived below where cheap.
EO_CHAIN_P3 = [2, 12, -3114]            # C(3), C(27), C(243)
GKO_CHAIN_P2 = [2, 48, -151936]         # C(2), C(8), C(32)
BG_CHAIN_P3 = [-2, 468]                 # C(3), C(27)
EO_SMALL = {3: 2, 7: 1, 11: -2, 19: -14, 23: -4}
GKO_SMALL = {2: 2, 5: -49, 11: 771, 17: 1251}
BG_SMALL = {3: -2, 7: -13, 11: 26}


def case(cid):
    return CASES[cid]


# ----------------------------------------------------------------------
# coefficient chains
# ----------------------------------------------------------------------


def test_eo_chain_frozen_and_rederived():
    assert coefficient_chain(case("eo"), 3, 2, 2) == EO_CHAIN_P3
    # independent re-derivation of C(3) and C(27) via the naive pipeline
    g = oracle.eta_quotient({4: 2, 8: 2}, 30)
    ell2z = oracle.eta_quotient({8: 6, 4: -2, 16: -4}, 29, scale=2)
    F, _ = oracle.mul(g, ell2z, 30, 29)
    F = {e: -c for e, c in F.items()}
    assert F[3] == EO_CHAIN_P3[0]
    assert F[27] == EO_CHAIN_P3[1]


def test_gko_chain_frozen_and_rederived():
    assert coefficient_chain(case("gko"), 2, 2, 2) == GKO_CHAIN_P2
    g1 = oracle.eta_quotient({3: 8}, 35)
    L1 = oracle.eta_quotient({1: 3, 9: -3}, 34, shift=3)
    L1sq, _ = oracle.mul(L1, L1, 34, 34)
    G, _ = oracle.mul(g1, L1sq, 35, 33)
    assert [G[2], G[8], G[32]] == GKO_CHAIN_P2


def test_bg_chain_frozen_and_rederived():
    assert coefficient_chain(case("bg"), 3, 1, 2) == BG_CHAIN_P3
    g2 = oracle.eta_quotient({4: 6}, 30)
    L2 = oracle.eta_quotient({8: 6, 4: -2, 16: -4}, 29)
    L2sq, _ = oracle.mul(L2, L2, 29, 29)
    H, _ = oracle.mul(g2, L2sq, 30, 28)
    assert [H[3], H[27]] == BG_CHAIN_P3


def test_small_prime_coefficients():
    for cid, table in (("eo", EO_SMALL), ("gko", GKO_SMALL), ("bg", BG_SMALL)):
        c = case(cid)
        for p, value in table.items():
            assert c.master_coefficient(p) == value, (cid, p)


def test_chain_budget_guard():
    with pytest.raises(InsufficientPrecision):
        coefficient_chain(case("eo"), 11, 2, 40, budget=250_000)


# ----------------------------------------------------------------------
# theorem laws on small grids
# ----------------------------------------------------------------------


def small_grid(cid):
    cells = {"eo": ((3, 1), (7, 0)), "gko": ((2, 1), (5, 0)), "bg": ((3, 1),)}[cid]
    return GridSpec(cid, cells, n_check=20)


def test_valuation_law_small_grids():
    for cid in CASES:
        report = verify_valuation_law(case(cid), small_grid(cid))
        assert report.all_passed
        assert len(report.entries) == sum(m + 1 for _, m in small_grid(cid).cells)


def test_valuation_law_values_match_laws():
    assert [vp(c, 3) for c in EO_CHAIN_P3] == [0, 1, 2]
    assert [vp(c, 2) for c in GKO_CHAIN_P2] == [1, 4, 7]  # 3m+1 at p=2
    assert [vp(c, 3) for c in BG_CHAIN_P3] == [0, 2]      # 2m


def test_congruence_lemma_small_grids():
    for cid in CASES:
        report = verify_congruence_lemma(case(cid), small_grid(cid))
        assert report.all_passed


def test_congruence_explicit_instances():
    # C(27) = -3*C(3) mod 9 and C(8) = -8*C(2) mod 64
    assert (EO_CHAIN_P3[1] - (-3) * EO_CHAIN_P3[0]) % 9 == 0
    assert (GKO_CHAIN_P2[1] - (-8) * GKO_CHAIN_P2[0]) % 64 == 0
    assert (GKO_CHAIN_P2[2] - 64 * GKO_CHAIN_P2[0]) % 512 == 0
    assert (BG_CHAIN_P3[1] - 9 * BG_CHAIN_P3[0]) % 81 == 0


def test_convergence_law_small_grids():
    for cid in CASES:
        report = verify_convergence_law(case(cid), small_grid(cid))
        assert report.all_passed
        for entry in report.entries:
            assert entry.precision == small_grid(cid).n_check


def test_convergence_trivial_subcase_q1():
    # coefficient of q^1 of (F|U(3) - C(3) g) is exactly 0 by construction
    eo = case("eo")
    diff = eo.master_series(60).u(3).truncate(20) - eo.cusp_series(20).scale(2)
    assert diff.coeff(1) == 0


def test_consistency_triangle():
    # the congruence at (p, m) together with the m = 0 valuation forces the
    # valuation law at (p, m): modulus exponent exceeds slope*m + v_p(C(p))
    for cid, p, chain in (
        ("eo", 3, EO_CHAIN_P3),
        ("gko", 2, GKO_CHAIN_P2),
        ("bg", 3, BG_CHAIN_P3),
    ):
        c = case(cid)
        base = vp(chain[0], p)
        for m, value in enumerate(chain):
            target = c.congruence_sign(m) * p ** (c.law_slope * m) * chain[0]
            modulus = p ** c.congruence_modulus_exponent(m)
            assert (value - target) % modulus == 0
            assert c.law_slope * m + base < c.congruence_modulus_exponent(m) + base
            assert vp(value, p) == c.law_slope * m + base == c.valuation_law(m, p)


# ----------------------------------------------------------------------
# identities
# ----------------------------------------------------------------------


def test_operator_identities_small():
    for cid, p, mmax in (("eo", 3, 1), ("gko", 2, 2), ("bg", 3, 1)):
        report = verify_operator_identities(case(cid), p, mmax, 16)
        assert report.all_passed, [e for e in report.entries if not e.passed]


def test_vanishing_even_hecke():
    assert verify_vanishing_even_hecke(case("eo"), 3, 1, 20)
    assert verify_vanishing_even_hecke(case("gko"), 2, 1, 20)
    assert verify_vanishing_even_hecke(case("bg"), 3, 1, 20)
    # m = 0 reduces to master = basis(1) consistency
    assert verify_vanishing_even_hecke(case("eo"), 3, 0, 20)


def test_hecke_decomposition_entries():
    for cid, p in (("eo", 3), ("gko", 5), ("bg", 7)):
        for n in (0, 1, 2):
            entry = verify_hecke_decomposition(case(cid), p, n, 15)
            assert entry.passed, (cid, p, n, entry)


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------


def test_report_determinism():
    grid = small_grid("gko")
    a = run_case_verification(case("gko"), grid)
    b = run_case_verification(case("gko"), grid)
    assert a.to_json() == b.to_json()


def test_budget_violation_entries():
    grid = GridSpec("eo", ((11, 2),), n_check=40, series_budget=250_000)
    report = verify_valuation_law(case("eo"), grid)
    assert not report.all_passed
    assert report.budget_violations == 3
    assert all(e.status == "insufficient-precision" for e in report.entries)
    merged = run_case_verification(case("eo"), grid)
    assert merged.budget_violations > 0


def test_gridspec_rejects_inadmissible_prime():
    with pytest.raises(ValueError):
        GridSpec("bg", ((5, 0),))
    with pytest.raises(ValueError):
        GridSpec("eo", ((2, 0),))


def test_default_grids_shape():
    assert GridSpec.default("eo").cells == ((3, 2), (7, 1), (11, 1), (19, 0), (23, 0))
    assert GridSpec.default("gko").cells == ((2, 2), (5, 1), (11, 0), (17, 0))
    assert GridSpec.default("bg").cells == ((3, 2), (7, 1), (11, 0))
    for cid in CASES:
        grid = GridSpec.default(cid)
        for p, mmax in grid.cells:
            assert grid.in_budget(p, mmax)


def test_report_entry_shape():
    report = verify_valuation_law(case("bg"), small_grid("bg"))
    payload = report.to_dict()
    assert payload["case"] == "bg"
    assert all(
        set(e) == {"check", "p", "m", "status", "expected", "actual", "precision", "note"}
        for e in payload["entries"]
    )


# ----------------------------------------------------------------------
# sweep
# ----------------------------------------------------------------------


def test_sweep_small_bound():
    for cid in CASES:
        report = nondivisibility_sweep(case(cid), 300)
        assert report.all_passed
        assert report.entries[0].check == "nondivisibility_sweep"


def test_sweep_excludes_two_for_gko():
    report = nondivisibility_sweep(case("gko"), 300)
    # v_2(C(2)) = 1, so 2 must not be in the sweep population
    assert "p=2 " not in report.entries[0].expected
    assert report.all_passed

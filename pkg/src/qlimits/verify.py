"""Grid verification engines producing deterministic certified reports.

Each engine walks a grid of (prime p, exponent index m) cells for one case
study and certifies, to an explicitly stated precision, the valuation law
v_p(C(p^(2m+1))), the congruence law for C(p^(2m+1)) against C(p), the
convergence lower bound for master|U(p^(2m+1)) towards the cusp form, the
operator identities tying the master form to the companion phi_p, and the
Hecke decomposition into basis family members.  Cells whose required series
length exceeds the grid budget are reported as explicit
insufficient-precision entries, never silently skipped.

The convergence bound is checked in integer-cleared form,
v_p(master|U(p^(2m+1)) - C(p^(2m+1)) * cusp) >= law + v_p(C(p^(2m+1))),
which is equivalent to the normalised statement but stays in exact integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from hashlib import sha256

from .hecke import CASES, CaseStudy, build_basis_form, build_phi
from .ntheory import primes_below, vp
from .series import InsufficientPrecision, QSeries

_PRINT_LIMIT = 10**40  # larger integers are reported as valuation + digest


@dataclass(frozen=True)
class GridSpec:
    """One verification grid: which (p, m_max) cells, at which precision."""

    case_id: str
    cells: tuple[tuple[int, int], ...]
    n_check: int = 40
    series_budget: int = 250_000

    def __post_init__(self) -> None:
        case = CASES[self.case_id]
        for p, m_max in self.cells:
            if not case.admissible_prime(p):
                raise ValueError(
                    f"prime {p} is not admissible for case {self.case_id} "
                    f"(needs p = {case.prime_residue[0]} mod {case.prime_residue[1]})"
                )
            if m_max < 0:
                raise ValueError("m_max must be >= 0")
        if self.n_check < 2:
            raise ValueError("n_check must be at least 2")

    @classmethod
    def default(cls, case_id: str) -> "GridSpec":
        cells = {
            "eo": ((3, 2), (7, 1), (11, 1), (19, 0), (23, 0)),
            "gko": ((2, 2), (5, 1), (11, 0), (17, 0)),
            "bg": ((3, 2), (7, 1), (11, 0)),
        }[case_id]
        return cls(case_id=case_id, cells=cells)

    def required_precision(self, p: int, m_max: int) -> int:
        return p ** (2 * m_max + 1) * self.n_check

    def in_budget(self, p: int, m_max: int) -> bool:
        return self.required_precision(p, m_max) <= self.series_budget


@dataclass(frozen=True)
class CheckEntry:
    """One certified claim: what was checked, at which cell, with what scope."""

    check: str
    p: int
    m: int | None
    status: str  # "pass" | "fail" | "insufficient-precision"
    expected: str
    actual: str
    precision: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class ValuationReport:
    """Deterministic, serialisable result of one or more verification runs."""

    case_id: str
    n_check: int
    entries: tuple[CheckEntry, ...] = field(default=())

    @property
    def all_passed(self) -> bool:
        return all(e.status == "pass" for e in self.entries)

    @property
    def budget_violations(self) -> int:
        return sum(1 for e in self.entries if e.status == "insufficient-precision")

    @property
    def failures(self) -> int:
        return sum(1 for e in self.entries if e.status == "fail")

    def merged_with(self, *others: "ValuationReport") -> "ValuationReport":
        entries = list(self.entries)
        for o in others:
            if o.case_id != self.case_id:
                raise ValueError("cannot merge reports across cases")
            entries.extend(o.entries)
        return ValuationReport(self.case_id, self.n_check, tuple(entries))

    def to_dict(self) -> dict:
        return {
            "case": self.case_id,
            "n_check": self.n_check,
            "all_passed": self.all_passed,
            "entries": [
                {
                    "check": e.check,
                    "p": e.p,
                    "m": e.m,
                    "status": e.status,
                    "expected": e.expected,
                    "actual": e.actual,
                    "precision": e.precision,
                    "note": e.note,
                }
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def lines(self) -> list[str]:
        out = []
        for e in self.entries:
            cell = f"p={e.p}" + (f" m={e.m}" if e.m is not None else "")
            out.append(
                f"[{e.status:>4}] {self.case_id} {e.check:<24} {cell:<12} "
                f"expected {e.expected}  actual {e.actual}  (prec {e.precision})"
                + (f"  # {e.note}" if e.note else "")
            )
        return out


def _fmt_int(n: int) -> str:
    if abs(n) < _PRINT_LIMIT:
        return str(n)
    digits = len(str(abs(n)))
    digest = sha256(str(n).encode()).hexdigest()[:12]
    return f"<{digits}-digit integer, sha256:{digest}>"


def _budget_entry(check: str, p: int, m: int | None, grid: GridSpec, m_max: int) -> CheckEntry:
    return CheckEntry(
        check=check,
        p=p,
        m=m,
        status="insufficient-precision",
        expected="-",
        actual="-",
        precision=0,
        note=(
            f"required series length {grid.required_precision(p, m_max)} exceeds "
            f"budget {grid.series_budget}"
        ),
    )


# ----------------------------------------------------------------------
# coefficient chains and the three theorem laws
# ----------------------------------------------------------------------


def coefficient_chain(
    case: CaseStudy, p: int, m_max: int, n_check: int, budget: int | None = None
) -> list[int]:
    """Exact integers C(p^(2m+1)) for m = 0..m_max from one master expansion."""
    needed = p ** (2 * m_max + 1) * n_check
    if budget is not None and needed > budget:
        raise InsufficientPrecision(
            f"chain for p={p}, m_max={m_max} needs length {needed} > budget {budget}"
        )
    master = case.master_series(max(needed, p ** (2 * m_max + 1) + 1))
    return [int(master.coeff(p ** (2 * m + 1))) for m in range(m_max + 1)]


def verify_valuation_law(case: CaseStudy, grid: GridSpec) -> ValuationReport:
    """v_p(C(p^(2m+1))) equals the case law exactly, per grid cell."""
    entries = []
    for p, m_max in grid.cells:
        if not grid.in_budget(p, m_max):
            entries.extend(
                _budget_entry("valuation_law", p, m, grid, m_max)
                for m in range(m_max + 1)
            )
            continue
        chain = coefficient_chain(case, p, m_max, grid.n_check)
        for m, c in enumerate(chain):
            law = case.valuation_law(m, p)
            actual = vp(c, p) if c != 0 else None
            ok = actual == law
            note = f"C(p^{2 * m + 1}) = {_fmt_int(c)}"
            if m == 0 and ok and p != 2:
                note += "; p does not divide C(p)"
            entries.append(
                CheckEntry(
                    check="valuation_law",
                    p=p,
                    m=m,
                    status="pass" if ok else "fail",
                    expected=str(law),
                    actual=str(actual),
                    precision=p ** (2 * m + 1) + 1,
                    note=note,
                )
            )
    return ValuationReport(case.id, grid.n_check, tuple(entries))


def verify_congruence_lemma(case: CaseStudy, grid: GridSpec) -> ValuationReport:
    """C(p^(2m+1)) = sign * p^(slope*m) * C(p) modulo p^(slope*m + add)."""
    entries = []
    for p, m_max in grid.cells:
        if not grid.in_budget(p, m_max):
            entries.extend(
                _budget_entry("congruence_lemma", p, m, grid, m_max)
                for m in range(m_max + 1)
            )
            continue
        chain = coefficient_chain(case, p, m_max, grid.n_check)
        c_p = chain[0]
        for m, c in enumerate(chain):
            modulus = p ** case.congruence_modulus_exponent(m)
            target = case.congruence_sign(m) * p ** (case.law_slope * m) * c_p
            ok = (c - target) % modulus == 0
            entries.append(
                CheckEntry(
                    check="congruence_lemma",
                    p=p,
                    m=m,
                    status="pass" if ok else "fail",
                    expected=f"{_fmt_int(target % modulus)} mod {_fmt_int(modulus)}",
                    actual=f"{_fmt_int(c % modulus)} mod {_fmt_int(modulus)}",
                    precision=p ** (2 * m + 1) + 1,
                )
            )
    return ValuationReport(case.id, grid.n_check, tuple(entries))


def verify_convergence_law(case: CaseStudy, grid: GridSpec) -> ValuationReport:
    """Integer-cleared convergence bound on the first n_check coefficients."""
    entries = []
    for p, m_max in grid.cells:
        if not grid.in_budget(p, m_max):
            entries.extend(
                _budget_entry("convergence_law", p, m, grid, m_max)
                for m in range(m_max + 1)
            )
            continue
        master = case.master_series(grid.required_precision(p, m_max))
        cusp = case.cusp_series(grid.n_check)
        chain = coefficient_chain(case, p, m_max, grid.n_check)
        for m, c in enumerate(chain):
            if c == 0:
                entries.append(
                    CheckEntry(
                        check="convergence_law",
                        p=p,
                        m=m,
                        status="fail",
                        expected="nonzero C(p^(2m+1))",
                        actual="0",
                        precision=grid.n_check,
                        note="normalising coefficient vanished",
                    )
                )
                continue
            diff = master.u(p ** (2 * m + 1)).truncate(grid.n_check) - cusp.scale(c)
            cert = diff.vp_certificate(p)
            floor = case.convergence_law(m, p) + vp(c, p)
            ok = cert.at_least(floor)
            entries.append(
                CheckEntry(
                    check="convergence_law",
                    p=p,
                    m=m,
                    status="pass" if ok else "fail",
                    expected=f">= {floor}",
                    actual="infinity" if cert.exact else str(cert.bound),
                    precision=cert.precision,
                    note=f"v_p(master|U(p^{2 * m + 1}) - C(p^{2 * m + 1})*cusp)",
                )
            )
    return ValuationReport(case.id, grid.n_check, tuple(entries))


# ----------------------------------------------------------------------
# operator identities
# ----------------------------------------------------------------------


def verify_operator_identities(
    case: CaseStudy, p: int, m_max: int, precision: int
) -> ValuationReport:
    """The exact identity suite tying the master form to phi_p.

    Checks, each as exact series equality or exact congruence to
    O(q^precision): the Hecke image master|T(p) against the (weight-1)-fold
    theta derivative of phi_p; the single-step U relation; the iterated
    U(p^(2m+1)) expansion for every m <= m_max; and the congruence reducing
    the iteration modulo p^(slope*m + add).
    """
    k = case.weight
    chi_p = case.character(p)
    c_v = -chi_p * p ** (k - 1)
    master = case.master_series(p ** (2 * m_max + 1) * precision)
    phi = build_phi(case, p, p ** (2 * m_max) * precision)
    theta_phi = phi.theta(k - 1)
    entries = []

    image = case.hecke(master, p, 1, precision)
    lhs = theta_phi.truncate(precision)
    rhs = image.scale(case.phi_sign)
    entries.append(
        _identity_entry("theta_phi_vs_hecke", p, None, lhs, rhs, precision,
                        note=f"Theta^{k-1}(phi_p) = {case.phi_sign:+d} * master|T(p)")
    )

    lhs = master.u(p).truncate(precision)
    rhs = (
        theta_phi.truncate(precision).scale(case.phi_sign)
        + master.v(p).truncate(precision).scale(c_v)
    )
    entries.append(
        _identity_entry("u_single_step", p, None, lhs, rhs, precision,
                        note="master|U(p) via phi_p and master|V(p)")
    )

    v_part = master.v(p).truncate(precision)
    for m in range(m_max + 1):
        lhs = master.u(p ** (2 * m + 1)).truncate(precision)
        rhs = v_part.scale(c_v ** (m + 1))
        for l in range(m + 1):
            term = theta_phi.u(p ** (2 * l)).truncate(precision)
            rhs = rhs + term.scale(case.phi_sign * c_v ** (m - l))
        entries.append(
            _identity_entry("u_iteration", p, m, lhs, rhs, precision,
                            note=f"master|U(p^{2 * m + 1}) unrolled over phi_p")
        )

        modulus = p ** case.congruence_modulus_exponent(m)
        approx = theta_phi.truncate(precision).scale(case.phi_sign * c_v**m)
        ok = lhs.congruent_to(approx, modulus, precision)
        entries.append(
            CheckEntry(
                check="u_congruence",
                p=p,
                m=m,
                status="pass" if ok else "fail",
                expected=f"congruent mod p^{case.congruence_modulus_exponent(m)}",
                actual="congruent" if ok else "mismatch",
                precision=precision,
                note=f"master|U(p^{2 * m + 1}) vs leading phi_p term",
            )
        )

    entries.append(
        CheckEntry(
            check="phi_crosscheck",
            p=p,
            m=None,
            status="pass",
            expected="elimination route = Hecke antiderivative route",
            actual="equal",
            precision=phi.precision,
            note="asserted during construction",
        )
    )
    entries.sort(key=lambda e: (e.check, e.m if e.m is not None else -1))
    return ValuationReport(case.id, precision, tuple(entries))


def _identity_entry(
    name: str, p: int, m: int | None, lhs: QSeries, rhs: QSeries,
    precision: int, note: str = ""
) -> CheckEntry:
    ok = lhs.agrees_with(rhs, precision)
    return CheckEntry(
        check=name,
        p=p,
        m=m,
        status="pass" if ok else "fail",
        expected="exact equality",
        actual="equal" if ok else "mismatch",
        precision=precision,
        note=note,
    )


def verify_vanishing_even_hecke(
    case: CaseStudy, p: int, m: int, precision: int
) -> bool:
    """master|T(p^(2m)) = p^((k-1)2m) * basis(p^(2m)) exactly, no cusp part."""
    n = 2 * m
    master = case.master_series(p**n * precision)
    image = case.hecke(master, p, n, precision)
    basis = build_basis_form(case, p**n, precision)
    scaled = basis.series.truncate(precision).scale(p ** ((case.weight - 1) * n))
    return image.agrees_with(scaled, precision)


def verify_hecke_decomposition(
    case: CaseStudy, p: int, n: int, precision: int
) -> CheckEntry:
    """master|T(p^n) = chi(p^n) p^((k-1)n) basis(p^n) + C(p^n) cusp, exactly."""
    master = case.master_series(max(p**n * precision, p**n + 1))
    image = case.hecke(master, p, n, precision)
    c_pn = master.coeff(p**n) if p**n < master.precision else 0
    basis = build_basis_form(case, p**n, precision)
    rhs = basis.series.truncate(precision).scale(
        case.character(p**n) * p ** ((case.weight - 1) * n)
    ) + case.cusp_series(precision).scale(c_pn)
    ok = image.agrees_with(rhs, precision)
    return CheckEntry(
        check="hecke_decomposition",
        p=p,
        m=n,
        status="pass" if ok else "fail",
        expected="exact equality",
        actual="equal" if ok else "mismatch",
        precision=precision,
        note=f"n={n}, C(p^n)={_fmt_int(int(c_pn))}",
    )


def verify_identity_suite(case: CaseStudy, grid: GridSpec) -> ValuationReport:
    """Operator identities, Hecke decompositions, and even-power vanishing
    across the whole grid."""
    reports = []
    entries = []
    for p, m_max in grid.cells:
        if not grid.in_budget(p, m_max):
            entries.append(_budget_entry("identity_suite", p, None, grid, m_max))
            continue
        reports.append(verify_operator_identities(case, p, m_max, grid.n_check))
        for n in range(0, 2 * m_max + 2):
            entries.append(verify_hecke_decomposition(case, p, n, grid.n_check))
        for m in range(0, m_max + 1):
            ok = verify_vanishing_even_hecke(case, p, m, grid.n_check)
            entries.append(
                CheckEntry(
                    check="even_hecke_vanishing",
                    p=p,
                    m=m,
                    status="pass" if ok else "fail",
                    expected="master|T(p^2m) = p^((k-1)2m) basis(p^2m)",
                    actual="equal" if ok else "mismatch",
                    precision=grid.n_check,
                )
            )
    report = ValuationReport(case.id, grid.n_check, tuple(entries))
    return report.merged_with(*reports) if reports else report


# ----------------------------------------------------------------------
# nondivisibility sweep and full runs
# ----------------------------------------------------------------------


def nondivisibility_sweep(case: CaseStudy, bound: int = 2000) -> ValuationReport:
    """p does not divide C(p), for every admissible odd prime p < bound."""
    master = case.master_series(bound + 1)
    primes = [p for p in primes_below(bound) if p != 2 and case.admissible_prime(p)]
    failures = []
    for p in primes:
        c = master.coeff(p)
        if c == 0 or int(c) % p == 0:
            failures.append(p)
    entries = [
        CheckEntry(
            check="nondivisibility_sweep",
            p=bound,
            m=None,
            status="pass" if not failures else "fail",
            expected=f"p never divides C(p) for {len(primes)} admissible primes < {bound}",
            actual="no failures" if not failures else f"failures at {failures}",
            precision=bound + 1,
            note=f"largest prime checked: {primes[-1] if primes else None}",
        )
    ]
    entries.extend(
        CheckEntry(
            check="nondivisibility_sweep_failure",
            p=p,
            m=None,
            status="fail",
            expected="C(p) nonzero mod p",
            actual="divisible",
            precision=bound + 1,
        )
        for p in failures
    )
    return ValuationReport(case.id, bound + 1, tuple(entries))


def run_case_verification(
    case: CaseStudy, grid: GridSpec | None = None, sweep_bound: int | None = None
) -> ValuationReport:
    """All engines over one grid, merged into a single deterministic report."""
    grid = grid or GridSpec.default(case.id)
    report = verify_valuation_law(case, grid).merged_with(
        verify_congruence_lemma(case, grid),
        verify_convergence_law(case, grid),
        verify_identity_suite(case, grid),
    )
    if sweep_bound:
        report = report.merged_with(nondivisibility_sweep(case, sweep_bound))
    return report

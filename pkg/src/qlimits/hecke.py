"""Hecke operators, the three case-study registries, and basis construction.

Each case study bundles one seed cusp form, one weight-zero (or negative
weight) multiplier, and the master form built from them, together with the
constants of its valuation, convergence and congruence laws.  The weakly
holomorphic basis members with prescribed principal part q^-m are built by
greedy pole-order elimination over the E_r = (sign) * cusp * multiplier^r
family, and the companion forms phi_p are built the same way over a
seed-times-multiplier-power family, then cross-checked against the theta
antiderivative of the Hecke image of the master form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .eta import EtaQuotient
from .ntheory import chi4, is_prime
from .series import Coeff, InsufficientPrecision, QSeries, power_truncated


class GapViolation(ArithmeticError):
    """Pole elimination cannot clear a required exponent with this family."""


class NonIntegralCombination(ArithmeticError):
    """An elimination or antiderivative produced a non-integer coefficient."""


class CrossCheckMismatch(ArithmeticError):
    """The two independent phi constructions disagree."""


@dataclass(frozen=True)
class Character:
    """Dirichlet character: trivial, or the nontrivial character mod 4."""

    kind: str  # "trivial" | "chi4"

    def __call__(self, n: int) -> int:
        if self.kind == "trivial":
            return 1
        return chi4(n)

    @property
    def is_trivial(self) -> bool:
        return self.kind == "trivial"


TRIVIAL = Character("trivial")
CHI4 = Character("chi4")


def hecke_Tpn(
    f: QSeries, k: int, chi: Character, p: int, n: int, precision: int
) -> QSeries:
    """f | T_{k,chi}(p^n) = sum_{j=0..n} chi(p^j) p^((k-1)j) f|U(p^(n-j))|V(p^j),
    exact to O(q^precision)."""
    if n < 0:
        raise ValueError("Hecke operator needs n >= 0")
    if p < 2 or not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2 and not chi.is_trivial:
        raise ValueError("the character mod 4 vanishes on even arguments")
    needed = p**n * precision
    if f.precision < needed:
        raise InsufficientPrecision(
            f"T(p^n) to O(q^{precision}) needs input precision {needed}, "
            f"have {f.precision}"
        )
    total = QSeries.zero(precision)
    for j in range(n + 1):
        term = f.u(p ** (n - j)).v(p**j)
        factor = chi(p**j) * p ** ((k - 1) * j)
        total = total + term.truncate(precision).scale(factor)
    return total


# ----------------------------------------------------------------------
# case studies
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CaseStudy:
    """Registry of one setting: forms, index sets, and law constants."""

    id: str
    level: int
    weight: int
    character: Character
    cusp_eta: EtaQuotient
    cusp_name: str
    mult_eta: EtaQuotient
    mult_scale: int
    mult_shift: int
    mult_name: str
    er_sign: int          # E_r = er_sign * cusp * multiplier^r
    er_pole_slope: int    # E_r has leading exponent 1 - er_pole_slope*r
    er_family_step: int   # r-step inside one elimination family
    master_r: int         # the master form is E_{master_r}
    master_name: str
    support: tuple[int, int]      # master coefficients vanish off n = a mod s
    basis_sign: int                # basis form = basis_sign*q^-m + O(q^gap)
    basis_gap: int
    basis_index_mod: int
    basis_index_residues: tuple[int, ...]
    prime_residue: tuple[int, int]
    allow_p2: bool
    law_slope: int        # v_p(C(p^(2m+1))) = law_slope*m (+1 at p=2 if allowed)
    conv_add: int         # convergence exponent = law_slope*m + conv_add
    cong_alternating: bool
    phi_sign: int         # Theta^(weight-1)(phi_p) = phi_sign * master|T(p)
    phi_seed_eta: EtaQuotient | None   # None: seed derived from Theta(mult)/cusp
    phi_mult_start: int
    phi_mult_step: int

    # -- index sets and laws -------------------------------------------

    def is_basis_index(self, m: int) -> bool:
        return m >= -1 and m % self.basis_index_mod in self.basis_index_residues

    def admissible_prime(self, p: int) -> bool:
        res, mod = self.prime_residue
        if not is_prime(p) or math.gcd(p, self.level) != 1:
            return False
        if p == 2:
            return self.allow_p2
        return p % mod == res

    def valuation_law(self, m: int, p: int) -> int:
        return self.law_slope * m + (1 if p == 2 else 0)

    def convergence_law(self, m: int, p: int) -> int:
        return self.law_slope * m + self.conv_add - (1 if p == 2 else 0)

    def congruence_sign(self, m: int) -> int:
        return (-1) ** m if self.cong_alternating else 1

    def congruence_modulus_exponent(self, m: int) -> int:
        return self.law_slope * m + self.conv_add

    def hecke(self, f: QSeries, p: int, n: int, precision: int) -> QSeries:
        if not self.admissible_prime(p):
            raise ValueError(
                f"prime {p} is not admissible for case {self.id} "
                f"(needs p = {self.prime_residue[0]} mod {self.prime_residue[1]}, "
                f"coprime to level {self.level})"
            )
        return hecke_Tpn(f, self.weight, self.character, p, n, precision)

    # -- cached expansions ---------------------------------------------

    def cusp_series(self, precision: int) -> QSeries:
        return _cached(self.id, "cusp", precision, lambda N: self.cusp_eta.expand(N))

    def multiplier_series(self, precision: int) -> QSeries:
        return _cached(
            self.id,
            "mult",
            precision,
            lambda N: self.mult_eta.expand_scaled(
                N, scale=self.mult_scale, shift=self.mult_shift
            ),
        )

    def master_series(self, precision: int) -> QSeries:
        return _cached(self.id, "master", precision,
                       lambda N: build_Er(self, self.master_r, N))

    def phi_seed_series(self, precision: int) -> QSeries:
        return _cached(self.id, "phiseed", precision, lambda N: _phi_seed(self, N))

    def er_eta(self, r: int) -> EtaQuotient | None:
        """E_r as a single eta quotient, when the multiplier has no shift."""
        if self.mult_shift != 0:
            return None
        merged = self.cusp_eta.merged_with(
            self.mult_eta, other_scale=self.mult_scale, other_power=r
        )
        return EtaQuotient.make(dict(merged.factors), self.level)

    def master_coefficient(self, n: int) -> Coeff:
        """C(n): the coefficient of q^n in the master form."""
        return self.master_series(n + 1).coeff(n)


_series_cache: dict[tuple[str, str], QSeries] = {}


def _cached(case_id: str, role: str, precision: int, builder) -> QSeries:
    key = (case_id, role)
    cur = _series_cache.get(key)
    if cur is None or cur.precision < precision:
        cur = builder(precision)
        _series_cache[key] = cur
    return cur.truncate(precision)


def clear_series_cache() -> None:
    _series_cache.clear()


EO = CaseStudy(
    id="eo",
    level=32,
    weight=2,
    character=TRIVIAL,
    cusp_eta=EtaQuotient.make({4: 2, 8: 2}, level=32),
    cusp_name="g",
    mult_eta=EtaQuotient.make({8: 6, 4: -2, 16: -4}, level=32),
    mult_scale=2,
    mult_shift=0,
    mult_name="L(2z)",
    er_sign=-1,
    er_pole_slope=2,
    er_family_step=2,
    master_r=1,
    master_name="F",
    support=(3, 4),
    basis_sign=-1,
    basis_gap=3,
    basis_index_mod=2,
    basis_index_residues=(1,),
    prime_residue=(3, 4),
    allow_p2=False,
    law_slope=1,
    conv_add=1,
    cong_alternating=True,
    phi_sign=1,
    phi_seed_eta=None,
    phi_mult_start=0,
    phi_mult_step=2,
)

GKO = CaseStudy(
    id="gko",
    level=9,
    weight=4,
    character=TRIVIAL,
    cusp_eta=EtaQuotient.make({3: 8}, level=9),
    cusp_name="g1",
    mult_eta=EtaQuotient.make({1: 3, 9: -3}, level=9),
    mult_scale=1,
    mult_shift=3,
    mult_name="L1",
    er_sign=1,
    er_pole_slope=1,
    er_family_step=3,
    master_r=2,
    master_name="G",
    support=(2, 3),
    basis_sign=1,
    basis_gap=2,
    basis_index_mod=3,
    basis_index_residues=(1, 2),
    prime_residue=(2, 3),
    allow_p2=True,
    law_slope=3,
    conv_add=3,
    cong_alternating=True,
    phi_sign=-1,
    phi_seed_eta=EtaQuotient.make({3: 2, 9: -6}, level=9),
    phi_mult_start=0,
    phi_mult_step=3,
)

BG = CaseStudy(
    id="bg",
    level=16,
    weight=3,
    character=CHI4,
    cusp_eta=EtaQuotient.make({4: 6}, level=16),
    cusp_name="g2",
    mult_eta=EtaQuotient.make({8: 6, 4: -2, 16: -4}, level=16),
    mult_scale=1,
    mult_shift=0,
    mult_name="L2",
    er_sign=1,
    er_pole_slope=1,
    er_family_step=4,
    master_r=2,
    master_name="H",
    support=(3, 4),
    basis_sign=1,
    basis_gap=3,
    basis_index_mod=2,
    basis_index_residues=(1,),
    prime_residue=(3, 4),
    allow_p2=False,
    law_slope=2,
    conv_add=2,
    cong_alternating=False,
    phi_sign=-1,
    phi_seed_eta=EtaQuotient.make({8: 2, 16: -4}, level=16),
    phi_mult_start=1,
    phi_mult_step=4,
)

CASES: dict[str, CaseStudy] = {c.id: c for c in (EO, GKO, BG)}


# ----------------------------------------------------------------------
# E_r family and basis construction
# ----------------------------------------------------------------------


def build_Er(case: CaseStudy, r: int, precision: int) -> QSeries:
    """E_r = er_sign * cusp * multiplier^r, exact to O(q^precision)."""
    if r < 0:
        raise ValueError("E_r needs r >= 0")
    pole_rate = case.er_pole_slope
    margin = r * pole_rate + pole_rate + 2
    mult = case.multiplier_series(precision + margin)
    mpow = power_truncated(mult, r, precision + pole_rate + 1)
    cusp = case.cusp_series(precision + r * pole_rate + 1)
    out = cusp * mpow
    if case.er_sign != 1:
        out = out.scale(case.er_sign)
    return out.truncate(precision)


@dataclass(frozen=True)
class BasisForm:
    """A constructed basis member plus the elimination recipe behind it."""

    case_id: str
    m: int
    series: QSeries
    recipe: tuple[tuple[int, int], ...]      # (r, integer coefficient) pairs
    eliminated: tuple[int, ...]              # gap exponents cleared by elimination
    forced_zero: tuple[int, ...]             # gap exponents zero without elimination


def _family_members(
    case: CaseStudy, r_top: int, step: int, precision: int
) -> dict[int, tuple[int, QSeries]]:
    """E_r for r = r_top, r_top-step, ..., keyed by leading exponent.

    Members are produced incrementally, multiplying up by multiplier^step.
    Precisions are budgeted so every member still knows at least
    ``precision`` coefficients: each multiplication by a series of valuation
    -rate*step costs that much precision, and the fixed mstep precision
    work + rate*(r_min+1) keeps the other operand from ever being the
    bottleneck.
    """
    r_min = r_top % step if r_top >= step else r_top
    rate = case.er_pole_slope
    spread = (r_top - r_min) * rate
    work = precision + spread + 2
    mstep_prec = work + rate * (r_min + 1) + 2
    mult = case.multiplier_series(mstep_prec + step * rate + 2)
    mstep = power_truncated(mult, step, mstep_prec)
    members: dict[int, tuple[int, QSeries]] = {}
    series = build_Er(case, r_min, work)
    r = r_min
    while True:
        members[1 - rate * r] = (r, series)
        if r == r_top:
            break
        r += step
        series = series * mstep
    if members[1 - rate * r_top][1].precision < precision:
        raise InsufficientPrecision("family member lost too much precision")
    return members


def _greedy_eliminate(
    start: QSeries,
    members: dict[int, tuple[int, QSeries]],
    clear_below: int,
    context: str,
) -> tuple[QSeries, dict[int, Coeff], list[int], list[int]]:
    """Clear every coefficient above the leading exponent and below
    ``clear_below`` by subtracting family members with matching leading
    exponents.  Returns (series, used multiples by member tag, eliminated
    exponents, exponents that were already zero)."""
    result = start
    lead_exp = start.trim().valuation
    used: dict[int, Coeff] = {}
    eliminated: list[int] = []
    forced: list[int] = []
    for e in range(lead_exp + 1, clear_below):
        c = result.coeff(e)
        if c == 0:
            forced.append(e)
            continue
        entry = members.get(e)
        if entry is None:
            raise GapViolation(
                f"{context}: coefficient {c} at q^{e} has no family member to cancel it"
            )
        tag, member = entry
        lead = member.coeff(e)
        ratio = Fraction(c, lead)
        if ratio.denominator != 1:
            raise NonIntegralCombination(
                f"{context}: elimination at q^{e} needs non-integer multiple {ratio}"
            )
        ratio = int(ratio)
        result = result - member.scale(ratio)
        used[tag] = used.get(tag, 0) - ratio
        eliminated.append(e)
    return result, used, eliminated, forced


def build_basis_form(case: CaseStudy, m: int, precision: int) -> BasisForm:
    """The unique form basis_sign*q^-m + O(q^gap) in the case's family."""
    if not case.is_basis_index(m):
        raise ValueError(f"m={m} is not in the basis index set of case {case.id}")
    if precision < case.basis_gap:
        raise InsufficientPrecision(
            f"basis construction needs precision >= {case.basis_gap}"
        )
    pole_rate = case.er_pole_slope
    if (m + 1) % pole_rate != 0:
        raise ValueError(f"m={m} does not match the family's pole arithmetic")
    r_top = (m + 1) // pole_rate
    members = _family_members(case, r_top, case.er_family_step, precision)
    _, top = members[-m]
    series, used, eliminated, forced = _greedy_eliminate(
        top, members, case.basis_gap, f"basis {case.id} m={m}"
    )
    recipe = {r_top: 1}
    for r, mult in used.items():
        recipe[r] = recipe.get(r, 0) + mult
    series = series.truncate(precision)
    for e in range(-m + 1, case.basis_gap):
        if series.coeff(e) != 0:
            raise GapViolation(f"basis {case.id} m={m}: residual term at q^{e}")
    series = series.to_integral()
    return BasisForm(
        case_id=case.id,
        m=m,
        series=series,
        recipe=tuple(sorted(recipe.items(), reverse=True)),
        eliminated=tuple(eliminated),
        forced_zero=tuple(forced),
    )


def basis_by_linear_solve(case: CaseStudy, m: int, precision: int) -> QSeries:
    """The same basis form by a second, independent route: every family
    member is expanded from scratch (no incremental products) and the
    combination coefficients are solved as an exact rational triangular
    system, summed only at the end.  Exists to certify that the greedy
    construction does not depend on elimination order or member pipeline;
    intended for test-sized m."""
    if not case.is_basis_index(m):
        raise ValueError(f"m={m} is not in the basis index set of case {case.id}")
    rate = case.er_pole_slope
    step = case.er_family_step
    r_top = (m + 1) // rate
    r_min = r_top % step if r_top >= step else r_top
    work = precision + 2
    members = {
        1 - rate * r: (r, build_Er(case, r, work))
        for r in range(r_min, r_top + 1, step)
    }
    solve_exponents = sorted(e for e in members if e < case.basis_gap)
    coeffs: dict[int, Fraction] = {-m: Fraction(1)}
    for e in solve_exponents:
        if e == -m:
            continue
        acc = Fraction(0)
        for lead in solve_exponents:
            c = coeffs.get(lead)
            if c and lead < e:
                acc += c * members[lead][1].coeff(e)
        coeffs[e] = -acc / members[e][1].coeff(e)
    total = QSeries.zero(precision)
    for lead, c in sorted(coeffs.items(), reverse=True):
        if c:
            total = total + members[lead][1].truncate(precision).scale(c)
    return total.to_integral()


# ----------------------------------------------------------------------
# companion forms phi_p
# ----------------------------------------------------------------------


def _phi_seed(case: CaseStudy, precision: int) -> QSeries:
    """Seed of the phi family.

    For the cases whose seed is displayed as an eta quotient, expand it.
    For the level-32 case the seed is the weight-zero function
    -Theta(multiplier) / (2 * cusp): the multiplier is a degree-two function
    on the genus-one curve, so its logarithmic derivative against the cusp
    form supplies the missing odd pole order.  Integrality is asserted.
    """
    if case.phi_seed_eta is not None:
        return case.phi_seed_eta.expand(precision)
    mult = case.multiplier_series(precision + 4)
    cusp_inv = case.cusp_series(precision + 6).invert(precision + 4)
    seed = (-mult.theta()) * cusp_inv
    seed = seed.scale(Fraction(1, 2))
    try:
        seed = seed.to_integral()
    except ValueError as exc:
        raise NonIntegralCombination(f"phi seed for case {case.id}: {exc}") from None
    return seed.truncate(precision)


def phi_family_members(
    case: CaseStudy, p: int, precision: int
) -> dict[int, tuple[int, QSeries]]:
    """Seed * multiplier^a for a = start, start+step, ..., up to pole order p,
    keyed by leading exponent; the tag is the multiplier exponent a."""
    seed0 = case.phi_seed_series(8)
    seed_pole = -seed0.trim().valuation
    vmult = -case.multiplier_series(8).trim().valuation
    step = case.phi_mult_step
    start = case.phi_mult_start
    if (p - seed_pole - start * vmult) % (step * vmult) != 0:
        raise ValueError(
            f"pole order {p} is not reachable by the phi family of case {case.id}"
        )
    top_a = (p - seed_pole - start * vmult) // (step * vmult) * step + start
    spread = (top_a - start) * vmult
    work = precision + spread + 2
    first_pole = seed_pole + start * vmult
    seed = case.phi_seed_series(work + start * vmult + 2)
    base_pow_prec = work + first_pole + 2
    base = seed * power_truncated(
        case.multiplier_series(base_pow_prec + start * vmult + 2),
        start,
        base_pow_prec,
    )
    mstep_prec = work + first_pole + 2
    mstep = power_truncated(
        case.multiplier_series(mstep_prec + step * vmult + 2), step, mstep_prec
    )
    members: dict[int, tuple[int, QSeries]] = {}
    a = start
    series = base
    while True:
        members[-(seed_pole + a * vmult)] = (a, series)
        if a == top_a:
            break
        a += step
        series = series * mstep
    if members[-p][1].precision < precision:
        raise InsufficientPrecision("phi family member lost too much precision")
    return members


def build_phi(case: CaseStudy, p: int, precision: int) -> QSeries:
    """phi_p = q^-p + O(q), built by pole elimination over the phi family
    and cross-checked against the theta antiderivative of master|T(p)."""
    if not case.admissible_prime(p):
        raise ValueError(f"prime {p} is not admissible for case {case.id}")
    members = phi_family_members(case, p, precision)
    _, top = members[-p]
    series, _, _, _ = _greedy_eliminate(top, members, 1, f"phi {case.id} p={p}")
    series = series.truncate(precision)
    try:
        series = series.to_integral()
    except ValueError as exc:
        raise NonIntegralCombination(f"phi {case.id} p={p}: {exc}") from None

    master = case.master_series(p * precision)
    image = case.hecke(master, p, 1, precision)
    if case.phi_sign != 1:
        image = image.scale(case.phi_sign)
    alt, integral = image.theta_inverse(case.weight - 1)
    if not integral:
        raise NonIntegralCombination(
            f"phi {case.id} p={p}: Hecke-route antiderivative is not integral"
        )
    upto = min(series.precision, alt.precision)
    if not series.agrees_with(alt, upto):
        raise CrossCheckMismatch(
            f"phi {case.id} p={p}: elimination and Hecke routes disagree"
        )
    return series

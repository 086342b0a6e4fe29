"""Dedekind eta quotients expanded as exact q-series.

An :class:`EtaQuotient` is a formal product of eta factors eta(delta*z)^r.
Each eta(delta*z) contributes a prefactor q^(delta/24) and the Euler product
over (1 - q^(delta*n)); the pentagonal number theorem keeps every Euler
factor O(sqrt(N))-sparse.  Only quotients with integral weight and integral
q-prefactor are supported, which covers every form this package builds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .ntheory import divisors
from .series import QSeries, power_truncated


class NonIntegralPrefactor(ValueError):
    """The quotient's q-prefactor sum(delta*r)/24 is not an integer."""


@dataclass(frozen=True)
class EtaQuotient:
    """Formal product of eta(delta*z)^r factors, attached to a level."""

    factors: tuple[tuple[int, int], ...]
    level: int

    def __post_init__(self) -> None:
        merged: dict[int, int] = {}
        for delta, r in self.factors:
            if delta < 1:
                raise ValueError(f"eta argument scale {delta} must be positive")
            merged[delta] = merged.get(delta, 0) + r
        canon = tuple(sorted((d, r) for d, r in merged.items() if r != 0))
        object.__setattr__(self, "factors", canon)
        for delta, _ in canon:
            if self.level % delta != 0:
                raise ValueError(f"scale {delta} does not divide level {self.level}")
        if sum(r for _, r in canon) % 2 != 0:
            raise ValueError("half-integral weight eta quotients are not supported")
        if sum(d * r for d, r in canon) % 24 != 0:
            raise NonIntegralPrefactor(
                "sum(delta * r) must be divisible by 24 for an integral q-prefactor"
            )

    @classmethod
    def make(cls, factors: Mapping[int, int], level: int | None = None) -> "EtaQuotient":
        if level is None:
            level = math.lcm(*factors.keys()) if factors else 1
        return cls(tuple(factors.items()), level)

    @classmethod
    def parse(cls, text: str, level: int | None = None) -> "EtaQuotient":
        """Parse a quotient descriptor like ``"4:2,8:2"``."""
        factors: dict[int, int] = {}
        for part in text.split(","):
            delta, _, r = part.partition(":")
            factors[int(delta)] = factors.get(int(delta), 0) + int(r)
        return cls.make(factors, level)

    @property
    def weight(self) -> int:
        return sum(r for _, r in self.factors) // 2

    @property
    def prefactor(self) -> int:
        """Leading q-exponent of the expansion, sum(delta*r)/24."""
        return sum(d * r for d, r in self.factors) // 24

    def merged_with(self, other: "EtaQuotient", self_scale: int = 1, other_scale: int = 1,
                    other_power: int = 1) -> "EtaQuotient":
        """Combine factor maps (scaling arguments), e.g. to form products."""
        factors: dict[int, int] = {}
        for d, r in self.factors:
            factors[d * self_scale] = factors.get(d * self_scale, 0) + r
        for d, r in other.factors:
            key = d * other_scale
            factors[key] = factors.get(key, 0) + r * other_power
        level = math.lcm(self.level * self_scale, other.level * other_scale)
        return EtaQuotient.make(factors, level)

    # ------------------------------------------------------------------
    # expansion
    # ------------------------------------------------------------------

    def expand(self, precision: int) -> QSeries:
        """Exact q-expansion to O(q^precision)."""
        pref = self.prefactor
        length = precision - pref
        if length <= 0:
            return QSeries.zero(precision)
        num = QSeries.one(length)
        den = QSeries.one(length)
        has_den = False
        for delta, r in self.factors:
            base = euler_power(abs(r), -(-length // delta))
            factor = base.v(delta).truncate(length)
            if r > 0:
                num = num * factor
            else:
                den = den * factor
                has_den = True
        unit = num * den.invert(length) if has_den else num
        return unit.shift(pref)

    def expand_scaled(self, precision: int, *, scale: int = 1, shift: int = 0) -> QSeries:
        """Expansion of the quotient at q -> q^scale, plus a constant shift."""
        if scale < 1:
            raise ValueError("scale must be >= 1")
        series = self.expand(-(-precision // scale)).v(scale).truncate(precision)
        if shift:
            series = series + QSeries.from_terms({0: shift}, precision)
        return series

    # ------------------------------------------------------------------
    # cusp diagnostics
    # ------------------------------------------------------------------

    def cusp_orders(self) -> tuple[tuple[int, Fraction], ...]:
        """Vanishing order at one representative cusp per divisor class d | N.

        Orders are reported in local q-units; the entry at d = N is the cusp
        at infinity and equals the q-prefactor.  This is a diagnostic: a
        quotient is holomorphic away from infinity iff every order at
        d != N is >= 0.
        """
        N = self.level
        out = []
        for d in divisors(N):
            total = Fraction(0)
            for delta, r in self.factors:
                g = math.gcd(d, delta)
                total += Fraction(g * g * r, math.gcd(d, N // d) * d * delta)
            out.append((d, Fraction(N, 24) * total))
        return tuple(out)

    def is_holomorphic_except_infinity(self) -> bool:
        return all(order >= 0 for d, order in self.cusp_orders() if d != self.level)

    def __str__(self) -> str:
        return " * ".join(f"eta({d}z)^{r}" for d, r in self.factors) or "1"


# ----------------------------------------------------------------------
# Euler products
# ----------------------------------------------------------------------

_euler_cache: dict[int, QSeries] = {}


def euler_expansion(precision: int) -> QSeries:
    """prod_{n>=1} (1 - q^n) + O(q^precision) via the pentagonal numbers."""
    if precision <= 0:
        return QSeries.zero(precision)
    terms = {0: 1}
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= precision and g2 >= precision:
            break
        sign = 1 if k % 2 == 0 else -1
        if g1 < precision:
            terms[g1] = sign
        if g2 < precision:
            terms[g2] = sign
        k += 1
    return QSeries.from_terms(terms, precision)


def euler_power(exponent: int, precision: int) -> QSeries:
    """euler_expansion(precision) ** exponent, memoised across calls."""
    if exponent < 0:
        raise ValueError("negative Euler powers go through invert()")
    if precision <= 0:
        return QSeries.zero(precision)
    if exponent == 0:
        return QSeries.one(precision)
    cached = _euler_cache.get(exponent)
    if cached is None or cached.precision < precision:
        cached = power_truncated(euler_expansion(precision), exponent, precision)
        _euler_cache[exponent] = cached
    return cached.truncate(precision)

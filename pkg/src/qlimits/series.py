"""Exact truncated Laurent series in q.

A :class:`QSeries` stores the coefficients of ``q^valuation`` through
``q^(precision-1)``.  Exponents below the valuation are exactly zero and
exponents at or above the precision are unknown, so every operation
propagates exactly how far its result is known.  Coefficients are arbitrary
precision integers; a parallel rational flavour (``fractions.Fraction``
coefficients) exists for the antiderivative of the theta operator and for
normalisation steps, with an explicit integrality conversion back.

Two series compare equal when they agree coefficient-wise on the range both
of them know.

Multiplication dispatches between a schoolbook convolution that skips zero
coefficients (fast when one operand is sparse, e.g. a pentagonal-number
series) and Kronecker substitution: both operands are packed into single
huge integers, multiplied once through GMP, and unpacked with balanced
digits.  The packed slot width is chosen from the operands' coefficient
sizes so the convolution never overflows a slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

import gmpy2

from .ntheory import vp as _int_vp

Coeff = Union[int, Fraction]

# Below this much schoolbook work (nonzeros of the sparser operand times the
# length of the other), packing overhead is not worth paying.
_KRONECKER_CUTOFF = 1 << 18


class NotAUnit(ArithmeticError):
    """Leading coefficient does not allow inversion in the coefficient ring."""


class ConstantTermNonzero(ValueError):
    """The theta antiderivative needs a zero constant term."""


class InsufficientPrecision(ValueError):
    """A coefficient or comparison was requested beyond the known range."""


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _norm(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


@dataclass(frozen=True, eq=False)
class QSeries:
    """Truncated Laurent series: coefficients of q^valuation .. q^(precision-1).

    >>> f = QSeries(-1, (1, 0, 0, 0, 2))       # 1/q + 2*q^3 + O(q^4)
    >>> f.precision
    4
    >>> (f * f).pretty()
    'q^-2 + 4*q^2 + O(q^3)'
    >>> f.u(3).pretty()
    '2*q + O(q^2)'
    """

    valuation: int
    coeffs: tuple[Coeff, ...] = field(default=())

    def __post_init__(self) -> None:
        if not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(self.coeffs))

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, precision: int) -> "QSeries":
        """The zero series, known up to (but excluding) ``precision``."""
        return cls(precision, ())

    @classmethod
    def one(cls, precision: int) -> "QSeries":
        return cls.from_terms({0: 1}, precision)

    @classmethod
    def from_terms(cls, terms: Mapping[int, Coeff], precision: int) -> "QSeries":
        """Build from an exponent -> coefficient mapping; zeros are dropped."""
        clean = {e: _norm(c) for e, c in terms.items() if c != 0}
        if any(e >= precision for e in clean):
            raise ValueError("term exponent at or beyond the stated precision")
        if not clean:
            return cls(precision, ())
        v = min(clean)
        return cls(v, tuple(clean.get(n, 0) for n in range(v, precision)))

    # ------------------------------------------------------------------
    # basic queries
    # ------------------------------------------------------------------

    @property
    def precision(self) -> int:
        return self.valuation + len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_rational(self) -> bool:
        """True when any coefficient is stored as a non-integer Fraction."""
        return any(isinstance(c, Fraction) and c.denominator != 1 for c in self.coeffs)

    def coeff(self, n: int) -> Coeff:
        """Coefficient of q^n; exact zero below the valuation, error beyond."""
        if n >= self.precision:
            raise InsufficientPrecision(
                f"coefficient of q^{n} unknown (precision {self.precision})"
            )
        if n < self.valuation:
            return 0
        return self.coeffs[n - self.valuation]

    def items(self) -> Iterator[tuple[int, Coeff]]:
        """Nonzero (exponent, coefficient) pairs in increasing exponent order."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                yield self.valuation + i, c

    def order(self) -> int | None:
        """Exponent of the first nonzero known coefficient, or None."""
        for e, _ in self.items():
            return e
        return None

    # ------------------------------------------------------------------
    # shaping
    # ------------------------------------------------------------------

    def truncate(self, precision: int) -> "QSeries":
        """Forget coefficients at exponents >= precision (shrink only)."""
        if precision > self.precision:
            raise InsufficientPrecision(
                f"cannot extend precision {self.precision} to {precision}"
            )
        if precision == self.precision:
            return self
        if precision <= self.valuation:
            return QSeries(precision, ())
        return QSeries(self.valuation, self.coeffs[: precision - self.valuation])

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k."""
        return QSeries(self.valuation + k, self.coeffs)

    def trim(self) -> "QSeries":
        """Drop stored leading zeros (raises the valuation; same series)."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return QSeries(self.valuation + i, self.coeffs[i:])
        return QSeries(self.precision, ())

    def as_rational(self) -> "QSeries":
        return QSeries(self.valuation, tuple(Fraction(c) for c in self.coeffs))

    def to_integral(self) -> "QSeries":
        """Convert rational coefficients back to int; error if any is not."""
        out = []
        for c in self.coeffs:
            c = _norm(c)
            if isinstance(c, Fraction):
                raise ValueError(f"non-integral coefficient {c}")
            out.append(c)
        return QSeries(self.valuation, tuple(out))

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------

    def __add__(self, other: "QSeries") -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        prec = min(self.precision, other.precision)
        val = min(self.valuation, other.valuation)
        if val >= prec:
            return QSeries(prec, ())
        out = [0] * (prec - val)
        for s in (self, other):
            base = s.valuation - val
            for i, c in enumerate(s.coeffs):
                if base + i >= len(out):
                    break
                if c != 0:
                    out[base + i] += c
        return QSeries(val, tuple(out))

    def __neg__(self) -> "QSeries":
        return QSeries(self.valuation, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + (-other)

    def scale(self, c: Coeff) -> "QSeries":
        """Multiply every coefficient by the scalar c."""
        if c == 0:
            return QSeries(self.precision, ())
        return QSeries(self.valuation, tuple(_norm(x * c) for x in self.coeffs))

    def __mul__(self, other: "QSeries") -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        val = self.valuation + other.valuation
        prec = min(
            self.precision + other.valuation, other.precision + self.valuation
        )
        out_len = prec - val
        if out_len <= 0:
            return QSeries(prec, ())
        cs = _mul_lists(self.coeffs, other.coeffs, out_len)
        return QSeries(val, tuple(cs))

    def invert(self, target_precision: int) -> "QSeries":
        """Multiplicative inverse b with self * b = 1 + O(q^M).

        M is the largest exponent bound permitted by this series' own
        precision and by ``target_precision``.  The leading coefficient must
        be +-1 for integer series (any nonzero rational otherwise).
        """
        t = self.trim()
        if not t.coeffs:
            raise NotAUnit("cannot invert a series that is zero on its known range")
        v = t.valuation
        lead = t.coeffs[0]
        rational = self.is_rational
        if not rational and lead not in (1, -1):
            raise NotAUnit(
                f"leading coefficient {lead} is not a unit in the integer variant"
            )
        length = min(t.precision - v, target_precision + v)
        if length < 1:
            raise InsufficientPrecision(
                "no coefficients of the inverse are determined at this precision"
            )
        inv = _invert_unit(t.coeffs, length)
        return QSeries(-v, tuple(inv))

    # ------------------------------------------------------------------
    # q-expansion operators
    # ------------------------------------------------------------------

    def u(self, m: int) -> "QSeries":
        """U(m): keep every m-th coefficient, a(n) -> a(m*n)."""
        if m < 1:
            raise ValueError("U(m) needs m >= 1")
        if m == 1:
            return self
        val = _ceil_div(self.valuation, m)
        prec = _ceil_div(self.precision, m)
        base = self.valuation
        out = tuple(self.coeffs[m * n - base] for n in range(val, prec))
        return QSeries(val, out)

    def v(self, m: int) -> "QSeries":
        """V(m): dilate exponents, a(n) q^n -> a(n) q^(m*n)."""
        if m < 1:
            raise ValueError("V(m) needs m >= 1")
        if m == 1:
            return self
        out = [0] * (m * len(self.coeffs))
        out[::m] = self.coeffs
        return QSeries(m * self.valuation, tuple(out))

    def theta(self, power: int = 1) -> "QSeries":
        """(q d/dq)^power: multiplies the coefficient of q^n by n^power."""
        if power < 1:
            raise ValueError("theta power must be >= 1")
        v = self.valuation
        return QSeries(
            v, tuple(c * (v + i) ** power for i, c in enumerate(self.coeffs))
        )

    def theta_inverse(self, power: int = 1) -> tuple["QSeries", bool]:
        """Divide the coefficient of q^n by n^power (constant term must be 0).

        Returns the rational-variant series together with an integrality
        flag that is True iff every resulting coefficient is an integer.
        """
        if power < 1:
            raise ValueError("theta power must be >= 1")
        if self.valuation <= 0 < self.precision and self.coeff(0) != 0:
            raise ConstantTermNonzero("series has a nonzero constant term")
        out: list[Coeff] = []
        integral = True
        for i, c in enumerate(self.coeffs):
            n = self.valuation + i
            if n == 0 or c == 0:
                out.append(0)
                continue
            f = _norm(Fraction(c) / n**power)
            if isinstance(f, Fraction):
                integral = False
            out.append(f)
        return QSeries(self.valuation, tuple(out)), integral

    # ------------------------------------------------------------------
    # certificates and comparison
    # ------------------------------------------------------------------

    def vp_certificate(self, p: int) -> "ValCertificate":
        """Certified minimum p-adic valuation over the known coefficients."""
        best: int | None = None
        where: int | None = None
        rational = self.is_rational
        for e, c in self.items():
            v = _int_vp(c, p)
            if best is None or v < best:
                best, where = v, e
                if best == 0 and not rational:
                    break
        return ValCertificate(
            bound=best, attained_at=where, precision=self.precision, exact=best is None
        )

    def agrees_with(self, other: "QSeries", upto: int) -> bool:
        """Exact coefficient agreement on all exponents < upto."""
        if self.precision < upto or other.precision < upto:
            raise InsufficientPrecision(
                f"agreement up to q^{upto} needs both precisions at least {upto}"
            )
        lo = min(self.valuation, other.valuation)
        return all(self.coeff(n) == other.coeff(n) for n in range(lo, upto))

    def congruent_to(self, other: "QSeries", modulus: int, upto: int) -> bool:
        """Coefficient-wise congruence mod ``modulus`` on exponents < upto."""
        if self.precision < upto or other.precision < upto:
            raise InsufficientPrecision(
                f"congruence up to q^{upto} needs both precisions at least {upto}"
            )
        lo = min(self.valuation, other.valuation)
        return all(
            (self.coeff(n) - other.coeff(n)) % modulus == 0 for n in range(lo, upto)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        upto = min(self.precision, other.precision)
        lo = min(self.valuation, other.valuation)
        if lo >= upto:
            return True
        return all(self.coeff(n) == other.coeff(n) for n in range(lo, upto))

    # ------------------------------------------------------------------
    # display
    # ------------------------------------------------------------------

    def pretty(self, max_terms: int = 8) -> str:
        parts = []
        for e, c in self.items():
            if len(parts) == max_terms:
                parts.append("...")
                break
            if c == 1 and e != 0:
                t = ""
            elif c == -1 and e != 0:
                t = "-"
            else:
                t = f"{c}*" if e != 0 else f"{c}"
            if e != 0:
                t += f"q^{e}" if e != 1 else "q"
            parts.append(t)
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return f"{body} + O(q^{self.precision})"

    def __repr__(self) -> str:
        return f"QSeries({self.pretty()})"


@dataclass(frozen=True)
class ValCertificate:
    """Certified claim about min_n v_p(a(n)) over the known range.

    ``bound`` is None exactly when the series is identically zero below the
    stated precision (the +infinity sentinel), mirrored by ``exact``.
    The certificate always carries the precision so consumers know the
    scope of the claim.
    """

    bound: int | None
    attained_at: int | None
    precision: int
    exact: bool

    def at_least(self, floor: int) -> bool:
        """True when the certified minimum valuation is >= floor."""
        return self.bound is None or self.bound >= floor


# ----------------------------------------------------------------------
# multiplication kernel
# ----------------------------------------------------------------------


def _mul_lists(
    a: Sequence[Coeff], b: Sequence[Coeff], out_len: int
) -> list[Coeff]:
    """Convolution of coefficient lists, truncated to out_len entries."""
    out_len = min(out_len, len(a) + len(b) - 1)
    nz_a = sum(1 for c in a if c != 0)
    nz_b = sum(1 for c in b if c != 0)
    if nz_a == 0 or nz_b == 0:
        return [0] * out_len
    rational = any(isinstance(c, Fraction) for c in a) or any(
        isinstance(c, Fraction) for c in b
    )
    work = min(nz_a, nz_b) * max(len(a), len(b))
    if rational or work <= _KRONECKER_CUTOFF:
        return _schoolbook_mul(a, b, out_len)
    return _kronecker_mul(a, b, out_len)


def _schoolbook_mul(
    a: Sequence[Coeff], b: Sequence[Coeff], out_len: int
) -> list[Coeff]:
    if sum(1 for c in a if c != 0) > sum(1 for c in b if c != 0):
        a, b = b, a
    out: list[Coeff] = [0] * out_len
    for i, ca in enumerate(a):
        if ca == 0 or i >= out_len:
            continue
        top = min(len(b), out_len - i)
        for j in range(top):
            cb = b[j]
            if cb != 0:
                out[i + j] += ca * cb
    return out


def _kronecker_mul(a: Sequence[int], b: Sequence[int], out_len: int) -> list[int]:
    bits_a = max(abs(c).bit_length() for c in a)
    bits_b = max(abs(c).bit_length() for c in b)
    slot = bits_a + bits_b + min(len(a), len(b)).bit_length() + 2
    prod = _pack_signed(a, slot) * _pack_signed(b, slot)
    return _unpack_signed(prod, slot, out_len)


def _pack_signed(xs: Sequence[int], slot: int) -> "gmpy2.mpz":
    pos = [c if c > 0 else 0 for c in xs]
    neg = [-c if c < 0 else 0 for c in xs]
    packed = gmpy2.pack(pos, slot)
    if any(neg):
        packed -= gmpy2.pack(neg, slot)
    return packed


def _unpack_signed(z: "gmpy2.mpz", slot: int, out_len: int) -> list[int]:
    if z == 0:
        return [0] * out_len
    sign = 1
    if z < 0:
        sign, z = -1, -z
    fields = gmpy2.unpack(z, slot)
    half = 1 << (slot - 1)
    full = 1 << slot
    out = [0] * out_len
    carry = 0
    for i in range(min(out_len, len(fields) + 1)):
        f = (fields[i] if i < len(fields) else 0) + carry
        carry = 0
        if f >= half:
            f -= full
            carry = 1
        out[i] = int(f) if sign > 0 else -int(f)
    return out


def _invert_unit(u: Sequence[Coeff], length: int) -> list[Coeff]:
    """Inverse of a unit coefficient list by Newton iteration, to ``length``."""
    lead = u[0]
    x: list[Coeff] = [lead if lead in (1, -1) else _norm(Fraction(1, lead))]
    known = 1
    while known < length:
        known = min(2 * known, length)
        ax = _mul_lists(u[:known], x, known)
        two_minus = [2 - ax[0]] + [-c for c in ax[1:]]
        x = _mul_lists(x, two_minus, known)
    return x


def power_truncated(x: QSeries, n: int, precision: int) -> QSeries:
    """x**n truncated to ``precision`` (binary powering; n >= 0).

    Intermediate products keep at least ``precision`` known coefficients as
    long as x was expanded far enough; a final truncation enforces the
    requested bound.
    """
    if n < 0:
        raise ValueError("negative powers go through invert()")
    result = QSeries.one(max(precision, x.precision - x.valuation))
    base = x
    e = n
    while e:
        if e & 1:
            result = result * base
        e >>= 1
        if e:
            base = base * base
    if result.precision < precision:
        raise InsufficientPrecision(
            f"power lost too much precision ({result.precision} < {precision}); "
            "expand the base further"
        )
    return result.truncate(precision)

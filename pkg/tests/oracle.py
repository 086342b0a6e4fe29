"""Naive reference implementations used as independent oracles.

Everything here is deliberately slow and structure-free: series are dicts,
the Euler product is multiplied out factor by factor (no pentagonal
shortcut), products are plain double loops, and inverses come from
back-substitution.  Tests compare the package's fast paths against these.
"""

from __future__ import annotations

from fractions import Fraction


def mul(
    a: dict,
    b: dict,
    prec_a: int,
    prec_b: int,
    val_a: int | None = None,
    val_b: int | None = None,
) -> tuple[dict, int]:
    va = val_a if val_a is not None else (min(a) if a else prec_a)
    vb = val_b if val_b is not None else (min(b) if b else prec_b)
    prec = min(prec_a + vb, prec_b + va)
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            if e1 + e2 < prec:
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}, prec


def add(a: dict, b: dict, prec_a: int, prec_b: int) -> tuple[dict, int]:
    prec = min(prec_a, prec_b)
    out = {e: c for e, c in a.items() if e < prec}
    for e, c in b.items():
        if e < prec:
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}, prec


def invert(a: dict, length: int) -> dict:
    """Inverse of a unit series (dict), by back-substitution, to `length`
    coefficients starting at the negated valuation."""
    v = min(a)
    lead = a[v]
    shifted = {e - v: c for e, c in a.items()}
    inv = {0: Fraction(1, lead)}
    for n in range(1, length):
        acc = Fraction(0)
        for k in range(1, n + 1):
            if k in shifted and (n - k) in inv:
                acc += shifted[k] * inv[n - k]
        inv[n] = -acc / lead
    out = {}
    for e, c in inv.items():
        if c:
            out[e - v] = int(c) if c.denominator == 1 else c
    return out


def euler(precision: int, scale: int = 1) -> dict:
    """prod_{n>=1} (1 - q^(scale*n)) to O(q^precision), factor by factor."""
    series = {0: 1}
    n = scale
    while n < precision:
        series, _ = mul(series, {0: 1, n: -1}, precision, precision)
        n += scale
    return series


def eta_quotient(factors: dict[int, int], precision: int, *,
                 scale: int = 1, shift: int = 0) -> dict:
    """Exact eta-quotient expansion through the naive pipeline."""
    pref = sum(d * r for d, r in factors.items())
    assert pref % 24 == 0
    pref = pref // 24 * scale
    length = precision - pref
    num = {0: 1}
    for delta, r in sorted(factors.items()):
        base = euler(length, delta * scale)
        for _ in range(abs(r)):
            if r > 0:
                num, _ = mul(num, base, length, length)
            else:
                num, _ = mul(num, invert(base, length), length, length)
    out = {e + pref: c for e, c in num.items() if e + pref < precision}
    if shift:
        out[0] = out.get(0, 0) + shift
    return {e: c for e, c in out.items() if c != 0}


def u_op(a: dict, m: int) -> dict:
    return {e // m: c for e, c in a.items() if e % m == 0}


def v_op(a: dict, m: int) -> dict:
    return {e * m: c for e, c in a.items()}


def theta(a: dict, power: int = 1) -> dict:
    return {e: c * e**power for e, c in a.items() if e != 0 and c}


def series_dict(qs) -> dict:
    """Dict view of a QSeries' nonzero known coefficients."""
    return dict(qs.items())

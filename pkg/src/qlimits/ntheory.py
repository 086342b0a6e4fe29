"""Small exact number-theory helpers shared across the package."""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2


def is_prime(n: int) -> bool:
    """Deterministic primality check (trial division; inputs here are small)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_below(bound: int) -> list[int]:
    """All primes p < bound, by sieve of Eratosthenes."""
    if bound <= 2:
        return []
    sieve = bytearray([1]) * bound
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(bound - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, bound, p)))
    return [p for p in range(bound) if sieve[p]]


def vp(x: int | Fraction, p: int) -> int:
    """p-adic valuation of a nonzero integer or rational."""
    if x == 0:
        raise ValueError("v_p(0) is undefined (+infinity)")
    if isinstance(x, Fraction):
        return vp(x.numerator, p) - vp(x.denominator, p)
    _, e = gmpy2.remove(x, p)
    return int(e)


def chi4(n: int) -> int:
    """The nontrivial Dirichlet character modulo 4."""
    r = n % 4
    if r == 1:
        return 1
    if r == 3:
        return -1
    return 0


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of n >= 1."""
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]

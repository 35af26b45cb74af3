"""Elementary integer arithmetic shared by the other modules.

Everything here works on exact Python integers or numpy integer arrays.
Trial division is bounded: desk-scale inputs never need more than primes
below 10**6.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

TRIAL_LIMIT = 10**6


class FactorizationError(ValueError):
    """Raised when an integer cannot be factored within the trial bound."""


def primes_upto(n: int) -> np.ndarray:
    """All primes ``p <= n`` as an int64 array (sieve of Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


@lru_cache(maxsize=4)
def _trial_primes(limit: int) -> tuple[int, ...]:
    return tuple(int(p) for p in primes_upto(limit))


def spf_table(n: int) -> np.ndarray:
    """Smallest-prime-factor table ``spf[k]`` for ``0 <= k <= n`` (spf[0]=spf[1]=0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_upto(math.isqrt(n))[::-1]:
        spf[p * p :: p] = p
    rest = spf == 0
    rest[:2] = False
    spf[rest] = np.flatnonzero(rest)
    return spf


def multiplicative_table(n: int, local) -> np.ndarray:
    """f(k) for 0 <= k <= n (f(0) = 0, f(1) = 1) of a multiplicative f.

    ``local(p, e)`` receives equal-length arrays of primes and exponents and
    returns f(p^e) for each pair.
    """
    spf = spf_table(n)
    out = np.ones(n + 1)
    out[0] = 0.0
    cur = np.arange(n + 1)
    live = np.flatnonzero(cur > 1)
    while len(live):
        c = cur[live]
        p = spf[c]
        e = np.zeros_like(c)
        while True:
            div = (c % p == 0) & (c > 1)
            if not np.any(div):
                break
            c = np.where(div, c // p, c)
            e += div
        out[live] *= local(p, e)
        cur[live] = c
        live = live[c > 1]
    return out


def factorize(n: int, limit: int = TRIAL_LIMIT) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` by trial division.

    Primes up to ``limit`` are divided out; a cofactor below ``limit**2`` is prime.
    A cofactor in ``[limit**2, limit**3)`` is either prime squared or a product of
    two distinct large primes, and the latter cannot be split here.
    """
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    out: dict[int, int] = {}
    m = n
    for p in _trial_primes(limit):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        if m < limit * limit:
            out[m] = out.get(m, 0) + 1
        else:
            r = math.isqrt(m)
            if r * r == m and m < limit**3:
                out[r] = out.get(r, 0) + 2
            else:
                raise FactorizationError(
                    f"cofactor {m} of {n} has no prime factor below {limit}"
                )
    return out


def squarefree_part(n: int, limit: int = TRIAL_LIMIT) -> int:
    """The squarefree ``n0`` with ``n = n0 * m**2``.

    Unlike :func:`factorize` this accepts a cofactor that is a product of two
    distinct large primes, because only square factors matter.  Cofactors of
    ``limit**3`` or more may hide a square and are rejected.
    """
    if n < 1:
        raise ValueError(f"squarefree_part expects a positive integer, got {n}")
    n0 = 1
    m = n
    for p in _trial_primes(limit):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e & 1:
                n0 *= p
    if m > 1:
        if m >= limit**3:
            raise FactorizationError(
                f"cofactor {m} of {n} is too large to rule out square factors"
            )
        r = math.isqrt(m)
        if r * r != m:
            n0 *= m
    return n0


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def euler_phi(factors: dict[int, int]) -> int:
    out = 1
    for p, e in factors.items():
        out *= (p - 1) * p ** (e - 1)
    return out


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a positive integer."""
    a = 0
    while n % p == 0:
        n //= p
        a += 1
    return a


def csum(values) -> complex:
    """Correctly rounded sum of complex (or real) values via ``math.fsum``."""
    vals = np.asarray(values)
    if np.iscomplexobj(vals):
        return complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))
    return complex(math.fsum(vals.tolist()))


def two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def tree_reduce(partials: list[tuple[float, float]]) -> float:
    """Combine ``(hi, lo)`` partial sums along a fixed pairwise tree.

    The pairing depends only on the number of partials, never on who computed
    them, so the result is bit-stable across worker counts.
    """
    level = list(partials)
    if not level:
        return 0.0
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            (h1, l1), (h2, l2) = level[i], level[i + 1]
            s, e = two_sum(h1, h2)
            nxt.append(two_sum(s, e + l1 + l2))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    hi, lo = level[0]
    return hi + lo

"""Quadratic Gauss sums.

``tau(chi, q) = sum_{j mod n} chi(j) e(jq/n)`` is evaluated by brute force; the
normalized sum ``G(chi_n, q)`` also has an exact closed form, multiplicative in
n, whose prime-power factors are integers or integers times sqrt(p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import csum, euler_phi, factorize, valuation
from .characters import QuadraticCharacterHandle, chi_bottom, jacobi_symbol, value_table


@lru_cache(maxsize=1024)
def _table(chi: QuadraticCharacterHandle) -> np.ndarray:
    return np.array(value_table(chi), dtype=np.float64)


@lru_cache(maxsize=1024)
def _roots(n: int) -> np.ndarray:
    r = 2.0 * math.pi * np.arange(n) / n
    return np.cos(r) + 1j * np.sin(r)


def tau_direct(chi: QuadraticCharacterHandle, q: int) -> complex:
    n = chi.modulus
    j = np.arange(n)
    terms = _table(chi) * _roots(n)[(j * q) % n]
    return csum(terms)


def tau_direct_many(chi: QuadraticCharacterHandle, qs) -> np.ndarray:
    """tau(chi, q) for every q in ``qs`` (vectorized; pairwise summation)."""
    n = chi.modulus
    qs = np.asarray(qs, dtype=np.int64)
    idx = (np.arange(n)[:, None] * qs[None, :]) % n
    return np.sum(_table(chi)[:, None] * _roots(n)[idx], axis=0)


def _check_odd(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"expected an odd positive integer, got {n}")


def _normalize(n: int, tau):
    # (1-i)/2 + (-1/n)(1+i)/2 is 1 for n = 1 mod 4 and -i for n = 3 mod 4
    return tau if n % 4 == 1 else -1j * tau


def g_direct(n: int, q: int) -> complex:
    _check_odd(n)
    return _normalize(n, tau_direct(chi_bottom(n), q))


def g_direct_many(n: int, qs) -> np.ndarray:
    _check_odd(n)
    return _normalize(n, tau_direct_many(chi_bottom(n), qs))


def _g_prime_power_exact(p: int, k: int, q: int) -> tuple[int, int]:
    """G(chi_{p^k}, q) as ``(c, r)`` meaning ``c * sqrt(r)``."""
    if k < 0:
        raise ValueError(f"exponent must be nonnegative, got {k}")
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    a = valuation(q, p)
    if k <= a:
        return (euler_phi({p: k}) if k else 1, 1) if k % 2 == 0 else (0, 1)
    if k == a + 1:
        if k % 2 == 0:
            return -(p**a), 1
        return jacobi_symbol(q // p**a, p) * p**a, p
    return 0, 1


def g_prime_power(p: int, k: int, q: int) -> float:
    if p < 3 or factorize(p) != {p: 1}:
        raise ValueError(f"expected an odd prime, got {p}")
    c, r = _g_prime_power_exact(p, k, q)
    return c * math.sqrt(r)


def g_closed_exact(n: int, q: int) -> tuple[int, int]:
    """G(chi_n, q) = c * sqrt(r) with r squarefree, via multiplicativity in n."""
    _check_odd(n)
    c, r = 1, 1
    for p, k in factorize(n).items():
        cp, rp = _g_prime_power_exact(p, k, q)
        if cp == 0:
            return 0, 1
        c *= cp
        r *= rp
    return c, r


def g_closed(n: int, q: int) -> float:
    c, r = g_closed_exact(n, q)
    return c * math.sqrt(r)


def tau_4l_transform(l: int, q: int) -> complex:
    """tau((4l/.), q) predicted from tau(chi_l, q) for odd l."""
    _check_odd(l)
    if l % 4 == 1:
        if q % 2:
            return 0j
        factor = -2 if q % 4 == 2 else 2
    else:
        if q % 2 == 0:
            return 0j
        factor = -2j if q % 4 == 1 else 2j
    return factor * tau_direct(chi_bottom(l), q)


@dataclass(frozen=True)
class GaussSumRecord:
    """One brute-force vs closed-form comparison; ``direct`` is the raw tau."""

    n: int
    q: int
    direct: complex
    closed: float
    abs_err: float

    def row(self) -> list:
        return [self.n, self.q, self.direct.real, self.direct.imag, self.closed, self.abs_err]


GAUSS_CSV_HEADER = ["n", "q", "re_direct", "im_direct", "closed", "abs_err"]


def gauss_records(nmax: int, qmax: int):
    """Yield a GaussSumRecord for every odd n <= nmax and 1 <= q <= qmax."""
    qs = np.arange(1, qmax + 1)
    for n in range(1, nmax + 1, 2):
        taus = tau_direct_many(chi_bottom(n), qs)
        gs = _normalize(n, taus)
        for q, tau, g in zip(qs.tolist(), taus.tolist(), gs.tolist()):
            closed = g_closed(n, q)
            yield GaussSumRecord(n, q, complex(tau), closed, abs(complex(g) - closed))

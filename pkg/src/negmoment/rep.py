"""Representation data and the Dirichlet coefficients of 1/L(s, pi x chi).

A representation is stored through its Satake parameters at each prime.
Expanding ``prod_j (1 - alpha_j x)`` gives the inverse-series coefficients
a(p^k) = (-1)^k e_k(alpha), which vanish for k > M; the forward Hecke
coefficients are the complete homogeneous polynomials h_k(alpha).

Two built-in instances:

* ``delta``: the weight-12 cusp form Delta, lambda(p) = tau(p) / p^(11/2);
* ``unitary2``: synthetic GL2 data alpha(p) = exp(i theta_p), theta_p = 2 pi frac(p phi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import gmpy2
import numpy as np

from .arith import factorize, multiplicative_table, primes_upto

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
TAU_DEFAULT_BOUND = 10**5
REP_LABELS = ("delta", "unitary2")


class NonUnitaryError(ValueError):
    """Satake parameters off the unit circle (Ramanujan-Petersson violated)."""


class MissingPrimeData(KeyError):
    pass


# --- Ramanujan tau -----------------------------------------------------------


def _encode(coeffs: list[int], nbytes: int) -> int:
    half = 1 << (8 * nbytes - 1)
    raw = b"".join((c + half).to_bytes(nbytes, "little") for c in coeffs)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * len(coeffs), "little")
    return int.from_bytes(raw, "little") - offset


def _square_truncated(coeffs: list[int], nbytes: int) -> list[int]:
    """Exact square of a polynomial, truncated to len(coeffs) terms.

    Kronecker substitution: pack coefficients into one integer with a signed
    slot of 8*nbytes bits each, square with GMP, add a per-slot offset so no
    slot borrows, and unpack.
    """
    n = len(coeffs)
    half = 1 << (8 * nbytes - 1)
    sq = gmpy2.mpz(_encode(coeffs, nbytes)) ** 2
    offset = gmpy2.mpz(int.from_bytes(half.to_bytes(nbytes, "little") * n, "little"))
    low = gmpy2.f_mod_2exp(sq + offset, 8 * nbytes * n)
    raw = int(low).to_bytes(nbytes * n, "little")
    return [
        int.from_bytes(raw[i : i + nbytes], "little") - half
        for i in range(0, nbytes * n, nbytes)
    ]


@lru_cache(maxsize=4)
def _tau_table(bound: int) -> tuple[int, ...]:
    # eta^3 / q^(1/8) = sum_k (-1)^k (2k+1) q^(k(k+1)/2) (Jacobi); Delta = q (that)^8
    n = bound
    s = [0] * n
    k = 0
    while k * (k + 1) // 2 < n:
        s[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    # |tau(m)| <= d(m) m^(11/2) < 2 m^6 bounds every intermediate coefficient too
    nbytes = ((2 * (n + 1) ** 6).bit_length() + 2 + 7) // 8
    for _ in range(3):
        s = _square_truncated(s, nbytes)
    return (0, *s)


def ramanujan_tau_table(bound: int = TAU_DEFAULT_BOUND) -> tuple[int, ...]:
    """Exact tau(0..bound) (tau(0) = 0) from the q-expansion of Delta."""
    if bound < 1:
        raise ValueError("bound must be positive")
    return _tau_table(bound)


def ramanujan_tau(n: int, bound: int = TAU_DEFAULT_BOUND) -> int:
    if not 1 <= n <= bound:
        raise ValueError(f"tau({n}) is outside the precomputed range [1, {bound}]")
    return _tau_table(max(bound, n))[n]


# --- Satake systems ----------------------------------------------------------


def satake_from_hecke_eigenvalue(lam: float) -> tuple[complex, complex]:
    """Roots of x^2 - lam x + 1 for |lam| <= 2; both on the unit circle."""
    if abs(lam) > 2.0:
        raise NonUnitaryError(f"|lambda| = {abs(lam)} > 2 gives non-unitary parameters")
    im = math.sqrt(max(0.0, 4.0 - lam * lam)) / 2.0
    return complex(lam / 2.0, im), complex(lam / 2.0, -im)


def _expand_product(params: np.ndarray) -> np.ndarray:
    """Coefficients of prod_j (1 - alpha_j x) for each row of ``params``."""
    n_p, m = params.shape
    c = np.zeros((n_p, m + 1), dtype=np.complex128)
    c[:, 0] = 1.0
    for j in range(m):
        c[:, 1:] = c[:, 1:] - params[:, j : j + 1] * c[:, :-1]
    return c


@dataclass(frozen=True, eq=False)
class SatakeSystem:
    """Satake parameters alpha_pi(p, j), j < M, at every odd and even prime <= bound.

    ``prime_coeffs[i, k]`` caches a(p_i^k) for k <= M; it is built once on
    construction and read-only afterwards.
    """

    M: int
    primes: np.ndarray
    params: np.ndarray
    label: str
    delta_sign: int = -1
    prime_coeffs: np.ndarray = field(init=False, repr=False)
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("degree M must be at least 2")
        if self.params.shape != (len(self.primes), self.M):
            raise ValueError("params must have shape (len(primes), M)")
        if np.any(np.abs(self.params) > 1.0 + 1e-12):
            raise NonUnitaryError("Satake parameter outside the unit disc")
        srt = np.sort(self.params, axis=1)
        if not np.allclose(srt, np.sort(self.params.conj(), axis=1), atol=1e-12, rtol=0):
            raise ValueError("Satake multiset is not closed under conjugation")
        object.__setattr__(self, "prime_coeffs", _expand_product(self.params))
        object.__setattr__(self, "_index", {int(p): i for i, p in enumerate(self.primes)})
        self.params.setflags(write=False)
        self.prime_coeffs.setflags(write=False)

    @property
    def prime_bound(self) -> int:
        return int(self.primes[-1]) if len(self.primes) else 1

    def index(self, p: int) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise MissingPrimeData(f"no Satake data for p={p} in {self.label!r}") from None

    def satake(self, p: int) -> list[complex]:
        return [complex(a) for a in self.params[self.index(p)]]


def delta_system(prime_bound: int) -> SatakeSystem:
    return _delta_system(_round_bound(prime_bound))


def unitary2_system(prime_bound: int) -> SatakeSystem:
    return _unitary2_system(_round_bound(prime_bound))


def _round_bound(b: int) -> int:
    # coarse buckets keep the caches small; values never depend on the bucket
    step = 1 << 16
    return max(step, -(-b // step) * step)


@lru_cache(maxsize=4)
def _delta_system(prime_bound: int) -> SatakeSystem:
    tau = ramanujan_tau_table(prime_bound)
    ps = primes_upto(prime_bound)
    lam = np.array([tau[p] / float(p) ** 5.5 for p in ps.tolist()])
    if np.any(np.abs(lam) > 2.0):
        raise NonUnitaryError("Deligne bound violated by the tau table")
    im = np.sqrt(np.maximum(0.0, 4.0 - lam * lam)) / 2.0
    params = np.stack([lam / 2 + 1j * im, lam / 2 - 1j * im], axis=1)
    return SatakeSystem(2, ps, params, "delta", -1)


@lru_cache(maxsize=4)
def _unitary2_system(prime_bound: int) -> SatakeSystem:
    ps = primes_upto(prime_bound)
    theta = 2.0 * math.pi * np.mod(ps * GOLDEN, 1.0)
    a = np.exp(1j * theta)
    return SatakeSystem(2, ps, np.stack([a, a.conj()], axis=1), "unitary2", -1)


def get_rep(label: str, prime_bound: int = TAU_DEFAULT_BOUND) -> SatakeSystem:
    if label == "delta":
        return delta_system(prime_bound)
    if label == "unitary2":
        return unitary2_system(prime_bound)
    raise ValueError(f"unknown representation {label!r}; choose from {REP_LABELS}")


# --- coefficients ------------------------------------------------------------


def coeff_prime_power(rep: SatakeSystem, p: int, k: int) -> complex:
    """a_pi(p^k) = (-1)^k e_k(alpha_pi(p, .)); zero for k > M."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    i = rep.index(p)
    if k > rep.M:
        return 0j
    return complex(rep.prime_coeffs[i, k])


def hecke_coeff_prime_power(rep: SatakeSystem, p: int, k: int) -> float:
    """lambda_pi(p^k) = h_k(alpha), from the product of geometric series."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    h = np.zeros(k + 1, dtype=np.complex128)
    h[0] = 1.0
    for a in rep.params[rep.index(p)]:
        geo = a ** np.arange(k + 1)
        h = np.convolve(h, geo)[: k + 1]
    return float(h[k].real)


def coeff(rep: SatakeSystem, n: int) -> float:
    if n < 1:
        raise ValueError("n must be positive")
    out = 1.0 + 0j
    for p, k in factorize(n).items():
        out *= coeff_prime_power(rep, p, k)
        if out == 0:
            return 0.0
    return float(out.real)


def coeff_table(rep: SatakeSystem, n: int) -> np.ndarray:
    """a_pi(k) for 0 <= k <= n as a float array (a[0] = 0)."""
    if n > rep.prime_bound:
        raise MissingPrimeData(f"{rep.label!r} has Satake data only up to {rep.prime_bound}")
    pidx = np.zeros(n + 1, dtype=np.int64)
    ps = rep.primes[rep.primes <= n]
    pidx[ps] = np.arange(len(ps))
    local = rep.prime_coeffs.real

    def f(p, e):
        return np.where(e > rep.M, 0.0, local[pidx[p], np.minimum(e, rep.M)])

    return multiplicative_table(n, f)

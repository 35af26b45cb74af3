"""Dirichlet L-functions, their functional equations, and reciprocal twisted L-series.

Continuation to the whole plane goes through the Hurwitz zeta function,
evaluated by Euler-Maclaurin summation after shifting the argument by N.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import bernoulli, loggamma

from . import _twist
from .arith import csum, is_square, primes_upto, spf_table
from .characters import QuadraticCharacterHandle, FundamentalDiscriminant, chi_bottom, value_table
from .gauss import tau_direct_many
from .rep import SatakeSystem, MissingPrimeData, coeff_table

EM_SHIFT = 30
EM_TERMS = 15  # Bernoulli numbers B_2 .. B_30
POLE_TOL = 1e-6
MIN_TRUNCATION = 16
SMOOTH_SPAN = 6
WORKERS_ENV = "NEGMOMENT_WORKERS"


class PoleError(ValueError):
    pass


_B = bernoulli(2 * EM_TERMS)
# B_2j / (2j)!
_EM_COEF = np.array([_B[2 * j] / math.factorial(2 * j) for j in range(1, EM_TERMS + 1)])


def _check_x(x) -> np.ndarray:
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(xa <= 0) or np.any(xa > 1):
        raise ValueError("x must lie in (0, 1]")
    return xa


def hurwitz_regular(s: complex, x, shift: int = EM_SHIFT, terms: int = EM_TERMS) -> np.ndarray:
    """zeta(s, x) - 1/(s - 1), an entire function of s, for an array of x.

    Euler-Maclaurin after shifting by N:
    zeta(s, x) = sum_{k<N} (k+x)^-s + (N+x)^(1-s)/(s-1) + (N+x)^-s / 2
                 + sum_j B_2j/(2j)! (s)_{2j-1} (N+x)^(1-s-2j)
    """
    s = complex(s)
    if terms > EM_TERMS:
        raise ValueError(f"at most {EM_TERMS} Bernoulli terms are tabulated")
    xa = _check_x(x)
    # real s stays in real arithmetic: powers are then correctly rounded
    sv = s.real if s.imag == 0 else s
    k = np.arange(shift)
    head = np.sum(np.power(k[:, None] + xa[None, :], -sv), axis=0)
    a = shift + xa
    la = np.log(a)
    if abs(s - 1) < 1e-4:
        # ((N+x)^(1-s) - 1)/(s-1) by its Taylor series
        u = (1 - sv) * la
        pole = -la * (1 + u / 2 + u * u / 6 + u**3 / 24)
    else:
        pole = (np.power(a, 1 - sv) - 1) / (sv - 1)
    out = head + pole + 0.5 * np.power(a, -sv)
    rising = sv  # (s)_{2j-1}
    for j in range(1, terms + 1):
        out = out + _EM_COEF[j - 1] * rising * np.power(a, 1 - sv - 2 * j)
        rising *= (sv + 2 * j - 1) * (sv + 2 * j)
    return out.astype(np.complex128)


def hurwitz_zeta(s: complex, x, shift: int = EM_SHIFT, terms: int = EM_TERMS):
    """zeta(s, x) for x in (0, 1]; ``x`` may be an array."""
    s = complex(s)
    if abs(s - 1) < POLE_TOL:
        raise PoleError(f"zeta(s, x) has a pole at s = 1 (got s = {s})")
    out = hurwitz_regular(s, x, shift, terms) + 1 / (s - 1)
    if np.ndim(x) == 0:
        return complex(out[0])
    return out


def is_principal(chi: QuadraticCharacterHandle) -> bool:
    return all(v in (0, 1) for v in value_table(chi))


def dirichlet_L(s: complex, chi: QuadraticCharacterHandle) -> complex:
    """L(s, chi) = n^-s sum_{a=1}^n chi(a) zeta(s, a/n), valid at every s != 1."""
    s = complex(s)
    n = chi.modulus
    vals = np.array(value_table(chi)[1:] + [value_table(chi)[0]], dtype=np.float64)
    a = np.arange(1, n + 1)
    keep = vals != 0
    z = hurwitz_regular(s, a[keep] / n)
    if is_principal(chi):
        if abs(s - 1) < POLE_TOL:
            raise PoleError("principal L-function has a pole at s = 1")
        z = z + 1 / (s - 1)
    # for non-principal chi the 1/(s-1) parts cancel because sum chi(a) = 0
    return complex(n ** (-s) * csum(vals[keep] * z))


def _gamma_pole(w: complex) -> bool:
    return w.imag == 0 and w.real <= 0 and w.real == math.floor(w.real)


def gamma_ratio(s: complex) -> complex:
    """Gamma((1-s)/2) / Gamma(s/2) through complex log-Gamma."""
    s = complex(s)
    top, bot = (1 - s) / 2, s / 2
    if _gamma_pole(top):
        raise PoleError(f"Gamma((1-s)/2) has a pole at s = {s}")
    if _gamma_pole(bot):
        return 0j
    return complex(np.exp(loggamma(top) - loggamma(bot)))


def _lambda_raw(d: int, s: complex, shift: int) -> complex:
    chi = FundamentalDiscriminant(d).character
    w = (s + shift) / 2
    return complex((abs(d) / math.pi) ** w * np.exp(loggamma(w))) * dirichlet_L(s, chi)


def completed_lambda_quadratic(d, s: complex, gamma_shift: int | None = None) -> complex:
    """(|d|/pi)^((s+a)/2) Gamma((s+a)/2) L(s, chi^(d)).

    ``a`` is 0 for even characters (d > 0) and 1 for odd ones (d < 0): only
    then is the result symmetric under s -> 1 - s.  ``gamma_shift`` forces a.
    At the trivial zeros, where Gamma has a pole and L vanishes, the value is
    taken as the mean over a small circle (the function is holomorphic there).
    """
    d = int(d)
    FundamentalDiscriminant(d)
    s = complex(s)
    a = (0 if d > 0 else 1) if gamma_shift is None else gamma_shift
    if d == 1 and (abs(s) < POLE_TOL or abs(s - 1) < POLE_TOL):
        raise PoleError("completed zeta has poles at s = 0 and s = 1")
    if _gamma_pole((s + a) / 2):
        r, m = 0.25, 32
        pts = s + r * np.exp(2j * math.pi * (np.arange(m) + 0.5) / m)
        return csum([_lambda_raw(d, complex(p), a) for p in pts]) / m
    return _lambda_raw(d, s, a)


class SeriesValue(NamedTuple):
    value: complex
    tail_bound: float


def k_series(s: complex, chi: QuadraticCharacterHandle, Q: int) -> SeriesValue:
    """sum_{q <= Q} tau(chi, q) q^-s with the tail bound n Q^(1-sigma) / (sigma - 1)."""
    s = complex(s)
    if s.real < 1 + 1e-3:
        raise ValueError("K(s, chi) is summed only where Re(s) > 1 (absolute convergence)")
    if Q < MIN_TRUNCATION:
        raise ValueError(f"truncation must be at least {MIN_TRUNCATION}")
    n = chi.modulus
    taus = tau_direct_many(chi, np.arange(n))
    q = np.arange(1, Q + 1)
    terms = taus[q % n] * np.exp(-s * np.log(q))
    tail = n * Q ** (1 - s.real) / (s.real - 1)
    return SeriesValue(csum(terms), float(tail))


@dataclass(frozen=True)
class GaussSeriesFECase:
    n: int
    s: complex
    lhs: complex
    rhs: complex
    residual: float
    tail_bound: float


def gauss_series_fe_case(n: int, s: complex, Q: int = 10**6) -> GaussSeriesFECase:
    """Both sides of L(s, chi_n) = pi^(s-1/2) n^-s Gamma-ratio(s) K(1-s, chi_n)."""
    s = complex(s)
    if n < 1 or n % 2 == 0:
        raise ValueError(f"expected an odd positive modulus, got {n}")
    if is_square(n):
        raise ValueError(f"n = {n} is a square; the identity needs n != square")
    if n % 4 != 1:
        raise ValueError(f"chi_{n} is odd; the identity needs an even character")
    if s.real >= 0:
        raise ValueError("only Re(s) < 0 is supported, where K(1-s) converges absolutely")
    chi = chi_bottom(n)
    lhs = dirichlet_L(s, chi)
    k = k_series(1 - s, chi, Q)
    pref = math.pi ** (s - 0.5) * n ** (-s) * gamma_ratio(s)
    rhs = pref * k.value
    return GaussSeriesFECase(n, s, lhs, rhs, abs(lhs - rhs), abs(pref) * k.tail_bound)


def cech_fe_residual(n: int, s: complex, Q: int = 10**6) -> float:
    return gauss_series_fe_case(n, s, Q).residual


# --- reciprocal twisted L-series ---------------------------------------------


def default_workers() -> int:
    v = os.environ.get(WORKERS_ENV)
    return max(1, int(v)) if v else 1


@dataclass(frozen=True, eq=False)
class _TwistPlan:
    k_eff: int
    ps: np.ndarray
    n_tab: int
    tables: _twist.ResidueTables
    spf_i: np.ndarray
    cofi: np.ndarray
    coef: np.ndarray  # (1 or 2, #odd k): real, and imaginary part when z is complex


def truncation_length(K: int, smooth: bool) -> int:
    return SMOOTH_SPAN * K if smooth else K


@lru_cache(maxsize=8)
def _plan(rep: SatakeSystem, z: complex, K: int, smooth: bool) -> _TwistPlan:
    k_eff = truncation_length(K, smooth)
    if k_eff > rep.prime_bound:
        raise MissingPrimeData(
            f"{rep.label!r} has Satake data only up to {rep.prime_bound}, need {k_eff}"
        )
    ks = np.arange(1, k_eff + 1, 2)
    a = coeff_table(rep, k_eff)[ks]
    c = a * np.exp(-z * np.log(ks))
    if smooth:
        c = c * np.exp(-((ks / K) ** 2))
    coef = np.stack([c.real] if z.imag == 0 else [c.real, c.imag])
    spf = spf_table(k_eff)
    ps = primes_upto(k_eff)[1:]
    pidx = np.zeros(k_eff + 1, dtype=np.int64)
    pidx[ps] = np.arange(len(ps))
    sp = spf[ks]
    spf_i = pidx[sp]
    cofi = (ks // np.maximum(sp, 1) - 1) // 2
    spf_i[0] = cofi[0] = 0
    tables = _twist.residue_tables(k_eff)
    n_tab = int(np.searchsorted(tables.primes, min(k_eff, tables.bound), side="right"))
    arrs = [np.ascontiguousarray(x) for x in (ps, spf_i, cofi, coef)]
    return _TwistPlan(k_eff, arrs[0], n_tab, tables, arrs[1], arrs[2], arrs[3])


def _check_twist_args(z: complex, K: int, smooth: bool = False, extrapolate: bool = False):
    if extrapolate:
        if not smooth or z.real <= 0.5:
            raise ValueError("extrapolated evaluation needs smoothing and Re(z) > 1/2")
    elif z.real < 1:
        raise ValueError("the reciprocal series is used only for Re(z) >= 1")
    if K < MIN_TRUNCATION:
        raise ValueError(f"truncation K must be at least {MIN_TRUNCATION}")


def twist_blocks(rep: SatakeSystem, blocks, z: complex, K: int, smooth: bool,
                 workers: int | None = None, group: int = 8,
                 extrapolate: bool = False) -> np.ndarray:
    """Reciprocal series for all 64 odd n = 128 b + 1 + 2l of each block b.

    Returns a complex array of shape (len(blocks), 64).  Work is split into
    fixed groups of blocks; every value is computed independently, so the
    result does not depend on ``workers``.  ``extrapolate`` admits
    1/2 < Re(z) < 1, where the smoothed series converges only slowly.
    """
    z = complex(z)
    _check_twist_args(z, K, smooth, extrapolate)
    plan = _plan(rep, z, K, smooth)
    blocks = np.ascontiguousarray(blocks, dtype=np.int64)
    nr = plan.coef.shape[0]
    out = np.zeros((nr, len(blocks), 64))
    t = plan.tables

    def run(i0):
        i1 = min(len(blocks), i0 + group)
        part = np.zeros((nr, i1 - i0, 64))
        _twist.twist_blocks(blocks[i0:i1], plan.ps, plan.n_tab, t.offsets, t.bits,
                            _twist.EXPAND, plan.spf_i, plan.cofi, plan.coef, part)
        out[:, i0:i1, :] = part

    starts = range(0, len(blocks), group)
    workers = workers or default_workers()
    if workers == 1:
        for i0 in starts:
            run(i0)
    else:
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(run, starts))
    return out[0] + 1j * out[1] if nr == 2 else out[0].astype(np.complex128)


def reciprocal_L_twist_many(rep: SatakeSystem, ns, z: complex, K: int, smooth: bool = False,
                            workers: int | None = None) -> np.ndarray:
    """sum_{k odd <= K'} a(k) (k/n) k^-z S(k/K) for each odd n in ``ns``."""
    ns = np.asarray(ns, dtype=np.int64)
    if np.any(ns < 1) or np.any(ns % 2 == 0):
        raise ValueError("twists are defined for odd positive n")
    b = (ns - 1) // 128
    lane = ((ns - 1) % 128) // 2
    ub, inv = np.unique(b, return_inverse=True)
    vals = twist_blocks(rep, ub, z, K, smooth, workers)
    return vals[inv, lane]


def reciprocal_L_twist(rep: SatakeSystem, n: int, z: complex, K: int, smooth: bool = False) -> complex:
    """Truncated Dirichlet series of 1/L^(2)(z, pi x chi_n).

    S = 1 without smoothing (K' = K) and S(u) = exp(-u^2) with it (K' = 6K).
    """
    return complex(reciprocal_L_twist_many(rep, [n], z, K, smooth, workers=1)[0])


def _weights(K: int, k: np.ndarray, smooth: bool) -> np.ndarray:
    if smooth:
        return np.exp(-((k / K) ** 2))
    return (k <= K).astype(np.float64)


def twist_truncation_estimate(rep: SatakeSystem, n: int, z: complex, K: int,
                              smooth: bool = False) -> float:
    """Predicted size of the change in the reciprocal series when K -> 2K.

    Odd squares coprime to n have chi_n(k) = 1, so their part of the change
    is deterministic and summed exactly.  The remaining terms carry signs
    chi_n(k) = +-1 and enter as a two-sigma band: twice their root-mean-square.
    """
    z = complex(z)
    _check_twist_args(z, K)
    k_eff = truncation_length(2 * K, smooth)
    if k_eff > rep.prime_bound:
        raise MissingPrimeData(f"{rep.label!r} has Satake data only up to {rep.prime_bound}")
    ks = np.arange(1, k_eff + 1, 2)
    dc = coeff_table(rep, k_eff)[ks] * np.exp(-z * np.log(ks))
    dc = dc * (_weights(2 * K, ks, smooth) - _weights(K, ks, smooth))
    root = np.arange(1, math.isqrt(k_eff) + 1, 2)
    root = root[np.gcd(root, n) == 1]
    sq = np.zeros(len(ks), dtype=bool)
    sq[(root * root - 1) // 2] = True
    cop = np.gcd(ks, n) == 1
    bias = abs(csum(dc[sq]))
    rms = math.sqrt(math.fsum((np.abs(dc[cop & ~sq]) ** 2).tolist()))
    return bias + 2.0 * rms

"""The negative first moment over quadratic twists and its predicted main term.

For odd n, R(n) = 1/L^(2)(1/2 + alpha, pi x chi_n) is summed against w(n/X)
and compared with X w^(1) P(1/2 + alpha; pi), where P is the Euler product
P(z; pi) = 1/2 prod_{p > 2} (1 + (1 - 1/p) sum_k a(p^2k) p^-2kz).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import loggamma

from . import _twist
from .arith import multiplicative_table, tree_reduce
from .lfunc import twist_blocks
from .rep import SatakeSystem, get_rep

GAUSSIAN_CUTOFF = 6.1
MAIN_PMAX = 10**5
SUBSAMPLE_SEED = 20240917
SUBSAMPLE_FRACTION = 0.01
SUBSAMPLE_MIN_BLOCKS = 4
NOISE_FACTOR = 3.0
EXPONENT_SLACK = 0.35


class EmptySupportWarning(UserWarning):
    pass


@dataclass(frozen=True)
class WeightSpec:
    kind: str = "gaussian"

    def __post_init__(self):
        if self.kind not in ("gaussian", "bump"):
            raise ValueError(f"unknown weight {self.kind!r}; use gaussian or bump")

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "gaussian":
            return np.where(t > 0, np.exp(-(t * t)), 0.0)
        out = np.zeros_like(t)
        inside = (t > 1) & (t < 2)
        ti = t[inside]
        out[inside] = np.exp(-1.0 / ((ti - 1) * (2 - ti)))
        return out

    def support(self, X: float, cutoff: float = GAUSSIAN_CUTOFF) -> tuple[float, float]:
        """Open interval (lo, hi) of n carrying weight; beyond hi the Gaussian is negligible."""
        if self.kind == "gaussian":
            return 0.0, cutoff * X
        return X, 2 * X


def mellin_weight(weight: WeightSpec, s: complex, rel_tol: float = 1e-12) -> complex:
    """int_0^inf w(t) t^(s-1) dt."""
    s = complex(s)
    if weight.kind == "gaussian":
        if s.real <= 0:
            raise ValueError("the Gaussian Mellin transform needs Re(s) > 0")
        return complex(0.5 * np.exp(loggamma(s / 2)))

    def part(f):
        v, _ = quad(f, 1.0, 2.0, epsabs=0.0, epsrel=rel_tol, limit=400)
        return v

    wt = lambda t: math.exp(-1.0 / ((t - 1) * (2 - t))) if 1 < t < 2 else 0.0
    re = part(lambda t: wt(t) * (t ** (s - 1)).real)
    im = 0.0 if s.imag == 0 else part(lambda t: wt(t) * (t ** (s - 1)).imag)
    return complex(re, im)


# --- Euler product and residue identity ---------------------------------------


def _check_z(z: float):
    if not z > 0.5 + 1e-3:
        raise ValueError(f"P(z) needs z > 1/2 (got {z})")


def euler_product_P(rep: SatakeSystem, z: float, Pmax: int) -> tuple[float, float]:
    """Truncated P(z; pi) over odd p <= Pmax and a bound on |P - P(Pmax)|.

    Each factor differs from 1 by at most y_p = 2^M p^-2z / (1 - p^-2z), so
    the omitted primes change the product by a factor within
    exp(sum_{p > Pmax} y_p) - 1, and sum_{n > Pmax} n^-2z <= Pmax^(1-2z)/(2z-1).
    """
    z = float(z)
    _check_z(z)
    if Pmax < 10**3:
        raise ValueError("Pmax must be at least 1000")
    if Pmax > rep.prime_bound:
        rep = get_rep(rep.label, Pmax)
    n_p = int(np.searchsorted(rep.primes, Pmax, side="right"))
    ps = rep.primes[1:n_p].astype(np.float64)
    c = rep.prime_coeffs.real[1:n_p]
    inner = np.zeros(len(ps))
    for k in range(1, (rep.M + 1) // 2 + 1):
        if 2 * k <= rep.M:
            inner += c[:, 2 * k] * ps ** (-2 * k * z)
    logs = np.log1p((1 - 1 / ps) * inner)
    value = 0.5 * math.exp(math.fsum(logs.tolist()))
    tail = 2**rep.M * Pmax ** (1 - 2 * z) / ((2 * z - 1) * (1 - Pmax ** (-2 * z)))
    return value, value * math.expm1(tail)


def square_coeff_table(rep: SatakeSystem, mmax: int) -> np.ndarray:
    """g(m) = a(m^2) prod_{p | m} (1 - 1/p) for 0 <= m <= mmax."""
    if mmax > rep.prime_bound:
        rep = get_rep(rep.label, mmax)
    pidx = np.zeros(mmax + 1, dtype=np.int64)
    ps = rep.primes[rep.primes <= mmax]
    pidx[ps] = np.arange(len(ps))
    local = rep.prime_coeffs.real

    def f(p, e):
        a = np.where(2 * e > rep.M, 0.0, local[pidx[p], np.minimum(2 * e, rep.M)])
        return a * (1 - 1 / p)

    return multiplicative_table(mmax, f)


@dataclass(frozen=True)
class ResidueCheck:
    z: float
    lhs: float
    P: float
    deviation: float
    estimate: float


def residue_identity(rep: SatakeSystem, z: float, Mmax: int = 10**6) -> ResidueCheck:
    """Compare 1/2 sum_{m odd <= Mmax} g(m) m^-2z with P(z; pi) over p <= Mmax.

    ``estimate`` bounds the truncation of both sides: the square sum loses at
    most 1/2 2^M Mmax^(1-2z)/(2z-1), the product its tail bound, plus rounding.
    """
    z = float(z)
    if z < 1:
        raise ValueError("the residue identity is checked for z >= 1")
    rep = get_rep(rep.label, max(Mmax, 10**3))
    g = square_coeff_table(rep, Mmax)
    m = np.arange(1, Mmax + 1, 2)
    lhs = 0.5 * math.fsum((g[m] * np.exp(-2 * z * np.log(m))).tolist())
    P, ptail = euler_product_P(rep, z, max(Mmax, 10**3))
    dev = abs(lhs / P - 1)
    lhs_tail = 0.5 * 2**rep.M * Mmax ** (1 - 2 * z) / (2 * z - 1)
    est = lhs_tail / P + ptail / P + 1e-15
    return ResidueCheck(z, lhs, P, dev, est)


def residue_identity_check(rep: SatakeSystem, z: float, Mmax: int = 10**6) -> float:
    return residue_identity(rep, z, Mmax).deviation


# --- the moment -----------------------------------------------------------------


@dataclass(frozen=True)
class MomentConfig:
    rep: str = "delta"
    alpha: float = 0.5
    X: float = 1e4
    K: int | None = None
    weight: WeightSpec = field(default_factory=WeightSpec)
    chunk: int = 4096
    smooth: bool = True
    cutoff: float = GAUSSIAN_CUTOFF

    def __post_init__(self):
        if not 0 < self.alpha <= 2:
            raise ValueError("alpha must lie in (0, 2]")
        if self.K is not None and self.K < 100:
            raise ValueError("K must be at least 100")
        if self.chunk < 1:
            raise ValueError("chunk size must be positive")
        if self.alpha < 0.5 and not self.smooth:
            raise ValueError("alpha < 1/2 requires smoothing")

    @property
    def z(self) -> float:
        return 0.5 + self.alpha

    @property
    def truncation(self) -> int:
        return self.K if self.K is not None else max(10**4, int(math.ceil(math.sqrt(self.X))))

    @property
    def mode(self) -> str:
        return "extrapolated" if self.alpha < 0.5 else "exact"


@dataclass
class MomentRow:
    X: float
    lhs: float
    main: float
    ratio: float
    trunc_est: float

    def __post_init__(self):
        self.trunc_est = float(self.trunc_est)


def _odd_support(cfg: MomentConfig) -> tuple[int, int]:
    lo, hi = cfg.weight.support(cfg.X, cfg.cutoff)
    first = int(math.floor(lo)) + 1
    first += first % 2 == 0
    last = int(math.ceil(hi)) - 1
    last -= last % 2 == 0
    return first, last


def _block_values(rep, blocks, cfg, K, workers):
    k_eff = 6 * K if cfg.smooth else K
    rep_k = get_rep(rep.label, k_eff) if k_eff > rep.prime_bound else rep
    vals = twist_blocks(rep_k, blocks, cfg.z, K, cfg.smooth, workers,
                        extrapolate=cfg.mode == "extrapolated")
    return vals.real


def moment_lhs(cfg: MomentConfig, workers: int | None = None) -> tuple[float, float]:
    """sum over odd n of R(n) w(n/X), and the extrapolated K -> 2K truncation change.

    The truncation estimate measures R at K and 2K on a fixed pseudo-random
    1% of the 64-lane blocks (at least four), scales the weighted change to
    the full sum, and divides by 1 - 2^-alpha: the slowest part of the
    truncation error, carried by square k, decays like K^-alpha.
    """
    first, last = _odd_support(cfg)
    if last < first:
        warnings.warn(f"weight support is empty at X = {cfg.X}", EmptySupportWarning)
        return 0.0, 0.0
    rep = get_rep(cfg.rep, _twist_bound(cfg))
    K = cfg.truncation
    b0, b1 = (first - 1) // 128, (last - 1) // 128
    blocks = np.arange(b0, b1 + 1, dtype=np.int64)
    ns = 128 * blocks[:, None] + 1 + 2 * np.arange(64)[None, :]
    w = cfg.weight(ns / cfg.X)
    w[(ns < first) | (ns > last)] = 0.0
    vals = _block_values(rep, blocks, cfg, K, workers)

    lhs = _reduce(vals.ravel(), w.ravel(), cfg.chunk)

    rng = np.random.default_rng(SUBSAMPLE_SEED)
    n_sub = min(len(blocks), max(SUBSAMPLE_MIN_BLOCKS, round(SUBSAMPLE_FRACTION * len(blocks))))
    pick = np.sort(rng.choice(len(blocks), size=n_sub, replace=False))
    vals2 = _block_values(rep, blocks[pick], cfg, 2 * K, workers)
    ws = w[pick]
    delta = _reduce((vals2 - vals[pick]).ravel(), ws.ravel(), cfg.chunk)
    wsum = w.sum()
    scale = wsum / ws.sum() if ws.sum() > 0 else 0.0
    est = abs(delta) * scale / (1 - 2.0 ** (-cfg.alpha))
    return lhs, est


def _twist_bound(cfg: MomentConfig) -> int:
    return 12 * cfg.truncation if cfg.smooth else 2 * cfg.truncation


def _reduce(values: np.ndarray, weights: np.ndarray, chunk: int) -> float:
    parts = _twist.weighted_chunk_sums(np.ascontiguousarray(values),
                                       np.ascontiguousarray(weights), chunk)
    return tree_reduce([(float(h), float(l)) for h, l in parts])


def main_term(cfg: MomentConfig, Pmax: int = MAIN_PMAX) -> tuple[float, float]:
    """X w^(1) P(1/2 + alpha) and the uncertainty inherited from the product tail."""
    rep = get_rep(cfg.rep, Pmax)
    P, tail = euler_product_P(rep, cfg.z, Pmax)
    w1 = mellin_weight(cfg.weight, 1).real
    return cfg.X * w1 * P, cfg.X * w1 * tail


def moment_row(cfg: MomentConfig, workers: int | None = None) -> MomentRow:
    lhs, est = moment_lhs(cfg, workers)
    main, _ = main_term(cfg)
    return MomentRow(cfg.X, lhs, main, lhs / main, est)


@dataclass
class MomentReport:
    rep: str
    alpha: float
    weight: str
    K: int
    rows: list[MomentRow]
    fitted_exponent: float | str | None
    passed: bool | None
    mode: str = "exact"

    def to_dict(self) -> dict:
        return {
            "rep": self.rep,
            "alpha": self.alpha,
            "weight": self.weight,
            "K": self.K,
            "mode": self.mode,
            "rows": [asdict(r) for r in self.rows],
            "fitted_exponent": self.fitted_exponent,
            "pass": self.passed,
        }


def noise_limited_rows(rows: list[MomentRow], main_tails: list[float]) -> list[bool]:
    return [
        abs(r.lhs - r.main) <= NOISE_FACTOR * r.trunc_est + t
        for r, t in zip(rows, main_tails)
    ]


def fit_error_exponent(rows: list[MomentRow], noisy: list[bool]) -> float | str:
    """Least-squares slope of log|lhs - main| against log X over rows above the noise."""
    keep = [r for r, nz in zip(rows, noisy) if not nz and r.lhs != r.main]
    if len(keep) < 3:
        return "noise-limited"
    x = np.log([r.X for r in keep])
    y = np.log([abs(r.lhs - r.main) for r in keep])
    return float(np.polyfit(x, y, 1)[0])


def trend_decreasing(values: list[float], bands: list[float] | None = None,
                     inversions: int = 1) -> bool:
    """Decreasing up to ``inversions`` increases; steps within the bands are not increases."""
    bands = bands or [0.0] * len(values)
    ups = sum(b - a > ea + eb for a, b, ea, eb in zip(values, values[1:], bands, bands[1:]))
    return ups <= inversions and values[-1] <= values[0] + bands[0] + bands[-1]


def truncated_main_term(cfg: MomentConfig, mmax: int | None = None) -> float:
    """X w^(1) 1/2 sum_m g(m) m^-2z S(m^2/K): the main term of the truncated series.

    The square k = m^2 carry the mean of chi_n(k) over n, so this is the
    value the computed moment approaches at fixed K.
    """
    K = cfg.truncation
    mmax = mmax or math.isqrt(6 * K if cfg.smooth else K)
    rep = get_rep(cfg.rep, max(mmax, 10**3))
    g = square_coeff_table(rep, mmax)
    m = np.arange(1, mmax + 1, 2)
    k = m.astype(np.float64) ** 2
    s = np.exp(-((k / K) ** 2)) if cfg.smooth else (k <= K).astype(np.float64)
    w1 = mellin_weight(cfg.weight, 1).real
    return cfg.X * w1 * 0.5 * math.fsum((g[m] * np.exp(-2 * cfg.z * np.log(m)) * s).tolist())


def moment_report(rep: str, alpha: float, X_list, K: int | None = None,
                  weight: WeightSpec | None = None, workers: int | None = None,
                  chunk: int = 4096) -> MomentReport:
    X_list = [float(x) for x in X_list]
    if len(X_list) < 3:
        raise ValueError("a sweep needs at least three values of X")
    if any(b <= a for a, b in zip(X_list, X_list[1:])):
        raise ValueError("X values must be strictly increasing")
    weight = weight or WeightSpec()
    rows, tails = [], []
    for X in X_list:
        cfg = MomentConfig(rep, alpha, X, K, weight, chunk)
        rows.append(moment_row(cfg, workers))
        tails.append(main_term(cfg)[1])
    noisy = noise_limited_rows(rows, tails)
    exponent = fit_error_exponent(rows, noisy)
    dev = [abs(r.ratio - 1) for r in rows]
    bands = [(NOISE_FACTOR * r.trunc_est + t) / r.main for r, t in zip(rows, tails)]
    ok_exp = exponent == "noise-limited" or exponent <= 1 - 2 * alpha + EXPONENT_SLACK
    cfg0 = MomentConfig(rep, alpha, X_list[0], K, weight, chunk)
    return MomentReport(rep, alpha, weight.kind, cfg0.truncation, rows, exponent,
                        bool(trend_decreasing(dev, bands) and ok_exp), cfg0.mode)

"""Lane-parallel evaluation of sum_{k odd <= K'} c_k (k/n) for many odd n at once.

n is processed in blocks of 64 consecutive odd integers n = 128 b + 1 + 2 l,
l < 64.  For each block:

1. the Jacobi symbols (p/n_l) at every odd prime p <= K' are read off bit
   tables of quadratic residues mod p (through reciprocity), 64 lanes at a
   time;
2. (k/n_l) for all odd k <= K' follows from complete multiplicativity,
   chi(k) = chi(spf(k)) chi(k / spf(k)), one int8 vector op per k;
3. the weighted sums over k run as blocked dot products with compensated
   accumulation between blocks.

Primes beyond the residue tables fall back to a scalar Jacobi symbol.
The functions here are pure numba kernels; validation and caching live in
the callers.
"""
from __future__ import annotations

import threading

import numba as nb
import numpy as np

LANES = 64
TABLE_CAP = 200_000
_DOT_BLOCK = 2048


@nb.njit(cache=True, nogil=True)
def jacobi(a, m):
    a %= m
    t = 1
    while a != 0:
        while (a & 1) == 0:
            a >>= 1
            r = m & 7
            if r == 3 or r == 5:
                t = -t
        a, m = m, a
        if (a & 3) == 3 and (m & 3) == 3:
            t = -t
        a %= m
    return t if m == 1 else 0


@nb.njit(cache=True)
def _build_tables(ps, offsets, bits):
    # bit i of prime p's table: is (2i + 1) mod p a nonzero square?  i < p + 64,
    # the last 64 bits repeat the start so any 64-bit window is contiguous
    for j in range(ps.shape[0]):
        p = ps[j]
        o = offsets[j]
        sq = 0
        for r in range(1, (p + 1) // 2):
            sq += 2 * r - 1
            while sq >= p:
                sq -= p
            i = (sq - 1) // 2 if (sq & 1) else (sq + p - 1) // 2
            bits[o + (i >> 6)] |= np.uint64(1) << np.uint64(i & 63)
        for t in range(64):
            src = t
            b = (bits[o + (src >> 6)] >> np.uint64(src & 63)) & np.uint64(1)
            dst = p + t
            if b:
                bits[o + (dst >> 6)] |= np.uint64(1) << np.uint64(dst & 63)


class ResidueTables:
    """Quadratic-residue bit tables for all odd primes up to ``bound``."""

    def __init__(self, bound: int):
        from .arith import primes_upto

        ps = primes_upto(bound)
        self.primes = ps[ps > 2]
        words = (self.primes + 64) // 64 + 1
        self.offsets = np.zeros(len(self.primes), dtype=np.int64)
        self.offsets[1:] = np.cumsum(words)[:-1]
        self.bits = np.zeros(int(words.sum()), dtype=np.uint64)
        _build_tables(self.primes, self.offsets, self.bits)
        self.bound = bound


_tables_lock = threading.Lock()
_tables: ResidueTables | None = None


def residue_tables(bound: int) -> ResidueTables:
    """Shared tables covering at least min(bound, TABLE_CAP)."""
    global _tables
    want = min(bound, TABLE_CAP)
    with _tables_lock:
        if _tables is None or _tables.bound < want:
            _tables = ResidueTables(want)
        return _tables


def _expand_table() -> np.ndarray:
    # byte b -> 8 int8 lanes, 0xFF (= -1) where the bit is set, 0x01 otherwise
    out = np.zeros(256, dtype=np.uint64)
    for b in range(256):
        v = 0
        for j in range(8):
            v |= (0xFF if (b >> j) & 1 else 0x01) << (8 * j)
        out[b] = v
    return out


EXPAND = _expand_table()
ODD_LANES = np.uint64(0xAAAAAAAAAAAAAAAA)


@nb.njit(cache=True, nogil=True)
def _prime_lanes(block, ps, n_tab, offsets, bits, expand, chip64, chip8):
    """chip8[j, l] = (p_j / n_l) for the 64 odd n_l of ``block``."""
    base = 64 * block  # (n_0 - 1) / 2
    n0 = 128 * block + 1
    for j in range(ps.shape[0]):
        p = ps[j]
        if j < n_tab:
            i0 = base % p
            o = offsets[j] + (i0 >> 6)
            sh = i0 & 63
            w = bits[o] >> np.uint64(sh)
            if sh:
                w |= bits[o + 1] << np.uint64(64 - sh)
            w = ~w
            if (p & 3) == 3:
                w ^= np.uint64(0xAAAAAAAAAAAAAAAA)
            for q in range(8):
                chip64[j, q] = expand[(w >> np.uint64(8 * q)) & np.uint64(255)]
            l = ((p - 1) // 2 - i0) % p
            while l < 64:
                chip8[j, l] = 0
                l += p
        else:
            for l in range(64):
                chip8[j, l] = jacobi(p, n0 + 2 * l)


@nb.njit(cache=True, nogil=True)
def _block_sums(chip8, spf_i, cofi, coef, chi, out, acc, comp, tmp):
    nk = spf_i.shape[0]
    for l in range(64):
        chi[0, l] = 1
    for ki in range(1, nk):
        a = spf_i[ki]
        b = cofi[ki]
        for l in range(64):
            chi[ki, l] = chip8[a, l] * chi[b, l]
    for r in range(coef.shape[0]):
        for l in range(64):
            acc[l] = 0.0
            comp[l] = 0.0
        for k0 in range(0, nk, 2048):
            k1 = min(nk, k0 + 2048)
            for l in range(64):
                tmp[l] = 0.0
            for ki in range(k0, k1):
                ck = coef[r, ki]
                for l in range(64):
                    tmp[l] += ck * chi[ki, l]
            for l in range(64):
                x = tmp[l]
                s = acc[l] + x
                if abs(acc[l]) >= abs(x):
                    comp[l] += (acc[l] - s) + x
                else:
                    comp[l] += (x - s) + acc[l]
                acc[l] = s
        for l in range(64):
            out[r, l] = acc[l] + comp[l]


@nb.njit(cache=True, nogil=True)
def twist_blocks(blocks, ps, n_tab, offsets, bits, expand, spf_i, cofi, coef, out):
    """out[r, i, l] = sum_k coef[r, k] (k / n) for n = 128 blocks[i] + 1 + 2 l."""
    n_p = ps.shape[0]
    nk = spf_i.shape[0]
    chip64 = np.empty((max(n_p, 1), 8), dtype=np.uint64)
    chip8 = chip64.view(np.int8).reshape((max(n_p, 1), 64))
    chi = np.empty((nk, 64), dtype=np.int8)
    acc = np.empty(64)
    comp = np.empty(64)
    tmp = np.empty(64)
    res = np.empty((coef.shape[0], 64))
    for i in range(blocks.shape[0]):
        _prime_lanes(blocks[i], ps, n_tab, offsets, bits, expand, chip64, chip8)
        _block_sums(chip8, spf_i, cofi, coef, chi, res, acc, comp, tmp)
        for r in range(coef.shape[0]):
            for l in range(64):
                out[r, i, l] = res[r, l]


@nb.njit(cache=True, nogil=True)
def weighted_chunk_sums(values, weights, chunk):
    """Neumaier sums of values * weights over consecutive chunks -> (hi, lo) rows."""
    n = values.shape[0]
    nchunks = (n + chunk - 1) // chunk
    out = np.zeros((nchunks, 2))
    for c in range(nchunks):
        s = 0.0
        e = 0.0
        for i in range(c * chunk, min(n, (c + 1) * chunk)):
            x = values[i] * weights[i]
            t = s + x
            if abs(s) >= abs(x):
                e += (s - t) + x
            else:
                e += (x - t) + s
            s = t
        out[c, 0] = s
        out[c, 1] = e
    return out

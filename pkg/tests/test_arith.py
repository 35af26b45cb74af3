import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from negmoment.arith import (
    FactorizationError,
    csum,
    factorize,
    is_square,
    multiplicative_table,
    primes_upto,
    spf_table,
    squarefree_part,
    tree_reduce,
)


def naive_primes(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def test_sieve_matches_trial_division():
    assert primes_upto(2000).tolist() == naive_primes(2000)
    assert len(primes_upto(1)) == 0


def test_spf_table():
    spf = spf_table(500)
    for k in range(2, 501):
        assert spf[k] == min(d for d in range(2, k + 1) if k % d == 0)


@given(st.integers(1, 10**9))
def test_factorize_roundtrip(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.items()) == n
    assert all(factorize(p) == {p: 1} for p in f)


def test_factorize_large_cofactors():
    p, q = 1000003, 1000033
    assert factorize(p * p) == {p: 2}
    with pytest.raises(FactorizationError):
        factorize(p * q)
    # squares can still be ruled out for a product of two large primes
    assert squarefree_part(p * q) == p * q
    assert squarefree_part(9 * p * p) == 1
    with pytest.raises(ValueError):
        factorize(0)


@given(st.integers(1, 10**6))
def test_squarefree_part(n):
    n0 = squarefree_part(n)
    assert is_square(n // n0) and n % n0 == 0
    assert all(e == 1 for e in factorize(n0).values())


def test_multiplicative_table_divisor_count():
    d = multiplicative_table(1000, lambda p, e: e + 1.0)
    for k in range(1, 1001):
        assert d[k] == sum(1 for j in range(1, k + 1) if k % j == 0)


def test_csum_is_exact_on_cancellation():
    vals = [1e16, 1.0, -1e16, 1j, -1j * 1e-17]
    assert csum(vals) == complex(1.0, 1.0)


def test_tree_reduce_depends_only_on_partials():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(10_000) * 10.0 ** rng.integers(-8, 8, 10_000)
    exact = math.fsum(x.tolist())
    for chunk in (1, 7, 64, 1000):
        parts = [(math.fsum(x[i:i + chunk].tolist()), 0.0) for i in range(0, len(x), chunk)]
        assert tree_reduce(parts) == pytest.approx(exact, rel=1e-15, abs=1e-12)
    assert tree_reduce([]) == 0.0

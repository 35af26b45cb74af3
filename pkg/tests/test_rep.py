import itertools
import math

import numpy as np
import pytest

from negmoment.rep import (
    MissingPrimeData,
    NonUnitaryError,
    SatakeSystem,
    coeff,
    coeff_prime_power,
    coeff_table,
    get_rep,
    hecke_coeff_prime_power,
    ramanujan_tau,
    ramanujan_tau_table,
    satake_from_hecke_eigenvalue,
)


def tau_naive(N):
    """q prod (1 - q^n)^24 by repeated multiplication, truncated to degree N."""
    c = [0] * (N + 1)
    c[0] = 1
    for n in range(1, N + 1):
        for _ in range(24):
            for k in range(N, n - 1, -1):
                c[k] -= c[k - n]
    return [0] + c[:N]


def test_tau_against_naive_product():
    t = tau_naive(150)
    assert list(ramanujan_tau_table(150)) == t


def test_tau_hecke_relations():
    t = ramanujan_tau_table(10**4)
    for p in (2, 3, 5, 7, 11, 13, 97):
        if p * p <= 10**4:
            assert t[p * p] == t[p] ** 2 - p**11
        if p**3 <= 10**4:
            assert t[p**3] == t[p] * t[p * p] - p**11 * t[p]


def test_tau_range_errors():
    with pytest.raises(ValueError):
        ramanujan_tau(0)
    with pytest.raises(ValueError):
        ramanujan_tau(200, bound=100)


def test_satake_from_eigenvalue():
    a, b = satake_from_hecke_eigenvalue(1.2)
    assert abs(a * b - 1) < 1e-15 and abs(a + b - 1.2) < 1e-15
    with pytest.raises(NonUnitaryError):
        satake_from_hecke_eigenvalue(2.1)


def elementary(alphas, k):
    return sum(math.prod(c) for c in itertools.combinations(alphas, k)) if k else 1


@pytest.mark.parametrize("label", ["delta", "unitary2"])
def test_prime_coefficients_are_signed_elementary_polynomials(label):
    rep = get_rep(label, 2000)
    for p in (2, 3, 5, 101, 997):
        al = rep.satake(p)
        for k in range(rep.M + 1):
            assert abs(coeff_prime_power(rep, p, k) - (-1) ** k * elementary(al, k)) < 1e-14
        assert coeff_prime_power(rep, p, rep.M + 1) == 0


def test_delta_coefficients_real_and_square_value(delta):
    for p in (3, 5, 7, 1009):
        assert coeff_prime_power(delta, p, 2) == pytest.approx(1.0, abs=1e-14)
        lam = ramanujan_tau(p) / p**5.5
        assert coeff_prime_power(delta, p, 1).real == pytest.approx(-lam, abs=1e-14)
        assert hecke_coeff_prime_power(delta, p, 1) == pytest.approx(lam, abs=1e-14)


def test_coeff_table_matches_pointwise(delta, unitary2):
    for rep in (delta, unitary2):
        a = coeff_table(rep, 3000)
        for k in (1, 2, 4, 8, 9, 12, 60, 105, 999, 2310, 2997):
            assert a[k] == pytest.approx(coeff(rep, k), abs=1e-14)
        assert a[8] == 0.0 and a[27] == 0.0


def test_coeff_sample_value(delta):
    assert coeff(delta, 1) == 1.0
    assert coeff(delta, 60) == pytest.approx(0.41385265599, abs=1e-10)


def test_missing_data_and_validation():
    rep = get_rep("unitary2", 1000)
    with pytest.raises(MissingPrimeData):
        rep.index(rep.prime_bound + 2 if rep.prime_bound % 2 else rep.prime_bound + 1)
    with pytest.raises(MissingPrimeData):
        coeff_table(rep, rep.prime_bound + 10)
    ps = np.array([2, 3])
    with pytest.raises(ValueError):
        SatakeSystem(1, ps, np.ones((2, 1), complex), "bad")
    with pytest.raises(NonUnitaryError):
        SatakeSystem(2, ps, np.full((2, 2), 1.5 + 0j), "bad")
    with pytest.raises(ValueError):
        SatakeSystem(2, ps, np.array([[1j, 1j], [1, 1]], complex), "bad")
    with pytest.raises(ValueError):
        get_rep("gl3")


def test_system_is_read_only(delta):
    with pytest.raises(ValueError):
        delta.params[0, 0] = 0
    with pytest.raises(ValueError):
        delta.prime_coeffs[0, 0] = 0

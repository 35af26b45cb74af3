import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from negmoment.arith import primes_upto
from negmoment.characters import chi_bottom, chi_top, jacobi_symbol, principal
from negmoment.gauss import tau_direct
from negmoment.lfunc import (
    PoleError,
    gauss_series_fe_case,
    cech_fe_residual,
    completed_lambda_quadratic,
    dirichlet_L,
    gamma_ratio,
    hurwitz_zeta,
    k_series,
    reciprocal_L_twist,
    reciprocal_L_twist_many,
    twist_truncation_estimate,
)
from negmoment.rep import coeff, get_rep


def bernoulli_L_minus_one(n):
    """L(-1, chi_n) = -B_{2,chi}/2 with B_{2,chi} = n sum chi(a) B_2(a/n), exactly."""
    b2 = lambda x: x * x - x + Fraction(1, 6)
    B = n * sum(jacobi_symbol(a, n) * b2(Fraction(a, n)) for a in range(1, n + 1))
    return -B / 2


def test_hurwitz_closed_forms():
    assert hurwitz_zeta(2, 1) == pytest.approx(math.pi**2 / 6, rel=1e-15)
    assert hurwitz_zeta(2, 0.5) == pytest.approx(math.pi**2 / 2, rel=1e-15)
    for x in np.linspace(0.05, 1, 20):
        assert abs(hurwitz_zeta(-1, x) + (x * x - x + 1 / 6) / 2) < 1e-12


@settings(max_examples=150, deadline=None)
@given(st.floats(0.5, 50), st.floats(-50, 50), st.floats(0.01, 1))
def test_hurwitz_right_half_plane_against_mpmath(sr, si, x):
    s = complex(sr, si)
    if abs(s) > 50 or abs(s - 1) < 1e-3:
        return
    ref = complex(mp.zeta(mp.mpc(s), x))
    assert abs(hurwitz_zeta(s, x) - ref) <= 1e-11 * abs(ref)


@settings(max_examples=150, deadline=None)
@given(st.floats(-3, 0.5), st.floats(-40, 40), st.floats(0.01, 1))
def test_hurwitz_left_strip_against_mpmath(sr, si, x):
    # cancellation in the shifted head sum: absolute error ~ 1e-16 (N + 1)^(1 - Re s)
    s = complex(sr, si)
    ref = complex(mp.zeta(mp.mpc(s), x))
    tol = max(1e-13, 1e-15 * 31.0 ** (1 - sr))
    assert abs(hurwitz_zeta(s, x) - ref) <= tol * max(1.0, abs(ref))


def test_hurwitz_pole():
    with pytest.raises(PoleError):
        hurwitz_zeta(1 + 1e-7, 0.5)
    with pytest.raises(ValueError):
        hurwitz_zeta(2, 0)


def test_L_values_from_bernoulli_oracle():
    assert bernoulli_L_minus_one(5) == Fraction(-2, 5)
    assert bernoulli_L_minus_one(45) == Fraction(-8, 5)
    for n in (5, 13, 17, 21, 45, 65, 105):
        assert abs(dirichlet_L(-1, chi_bottom(n)) - float(bernoulli_L_minus_one(n))) < 1e-8
    assert dirichlet_L(2, principal()) == pytest.approx(math.pi**2 / 6)


def test_L_against_direct_series_at_two():
    K = 10**5
    k = np.arange(1, K + 1)
    for n in range(1, 100, 2):
        chi = chi_bottom(n)
        table = np.array([chi(a) for a in range(n)], dtype=float)
        direct = math.fsum((table[k % n] / k.astype(float) ** 2).tolist())
        if math.isqrt(n) ** 2 == n:
            # principal: the omitted tail is about (phi(n)/n) / K, larger than 1e-6
            direct += np.mean(table != 0) / K
        assert abs(dirichlet_L(2, chi) - direct) < 1e-6


def test_L_at_one_for_nonprincipal():
    assert abs(dirichlet_L(1, chi_top(-4)) - math.pi / 4) < 1e-13
    assert abs(dirichlet_L(1, chi_bottom(5)) - 2 * math.log((1 + 5**0.5) / 2) / 5**0.5) < 1e-13
    with pytest.raises(PoleError):
        dirichlet_L(1, chi_bottom(9))


def test_gamma_ratio_values():
    assert gamma_ratio(0.5) == pytest.approx(1.0)
    assert gamma_ratio(-1).real == pytest.approx(-1 / (2 * math.sqrt(math.pi)), rel=1e-14)
    assert gamma_ratio(0) == 0 and gamma_ratio(-4) == 0
    for s in (0.3 + 4j, -2.5 + 1j, 7.25, 20 - 30j):
        ref = complex(mp.gamma((1 - s) / 2) / mp.gamma(mp.mpc(s) / 2))
        assert abs(gamma_ratio(s) - ref) <= 1e-10 * abs(ref)
    for s in (1, 3, 5):
        with pytest.raises(PoleError):
            gamma_ratio(s)


def test_gamma_ratio_growth():
    for sigma in (-1, 0, 1):
        r = [abs(gamma_ratio(complex(sigma, t))) / (1 + abs(complex(sigma, t))) ** (0.5 - sigma)
             for t in np.linspace(1, 40, 79)]
        assert max(r) < 3
        # Stirling: the ratio tends to 2^(sigma - 1/2)
        assert r[-1] == pytest.approx(2.0 ** (sigma - 0.5), rel=0.1)


@pytest.mark.parametrize("d", [1, 5, 8, 12, 13, -3, -4, -7, -8])
def test_completed_lambda_symmetric(d):
    for s in (-1, 0.25 + 1j, 0.5 + 2.7j, 2, -2):
        a = completed_lambda_quadratic(d, s)
        b = completed_lambda_quadratic(d, 1 - s)
        assert abs(a - b) <= 1e-7 * abs(a)


def test_completed_zeta_oracle():
    for s in (2, -1, 0.3 + 5j):
        ref = complex(mp.pi ** (-mp.mpc(s) / 2) * mp.gamma(mp.mpc(s) / 2) * mp.zeta(mp.mpc(s)))
        assert abs(completed_lambda_quadratic(1, s) - ref) < 1e-10 * abs(ref)
    with pytest.raises(PoleError):
        completed_lambda_quadratic(1, 0)


def test_odd_characters_need_shifted_gamma():
    # with Gamma(s/2) in place of Gamma((s+1)/2) an odd character is far from symmetric
    for d in (-3, -4, -7, -8):
        a = completed_lambda_quadratic(d, 2, gamma_shift=0)
        b = completed_lambda_quadratic(d, -1, gamma_shift=0)
        assert abs(a - b) > 0.1 * abs(a)


def test_trivial_zero_value():
    # Lambda(-1) for odd chi equals its limit 2 (|d|/pi)^0 L'(-1, chi)
    d = -4
    h = 1e-5
    deriv = (dirichlet_L(-1 + h, chi_top(d)) - dirichlet_L(-1 - h, chi_top(d))) / (2 * h)
    assert completed_lambda_quadratic(d, -1) == pytest.approx(2 * deriv, rel=1e-6)


def test_k_series_primitive_oracle():
    chi = chi_bottom(5)
    k = k_series(2, chi, 10**5)
    assert abs(k.value - tau_direct(chi, 1) * dirichlet_L(2, chi)) <= k.tail_bound
    assert abs(tau_direct(chi, 1) - math.sqrt(5)) < 1e-12


def ramanujan_sum(n, q):
    mu = {1: 1, 3: -1, 9: 0}
    return sum(mu[n // d] * d for d in (1, 3, 9) if n % d == 0 and q % d == 0)


def test_k_series_ramanujan_sum_oracle():
    chi = chi_bottom(9)
    Q = 5000
    ref = math.fsum(ramanujan_sum(9, q) / q**2 for q in range(1, Q + 1))
    assert abs(k_series(2, chi, Q).value - ref) < 1e-12


@pytest.mark.parametrize("n,s", [(5, 2), (21, 1.5 + 2j), (45, 3), (13, 1.2)])
def test_k_series_tail_bound(n, s):
    chi = chi_bottom(n)
    a, b = k_series(s, chi, 20000), k_series(s, chi, 40000)
    assert abs(a.value - b.value) <= a.tail_bound


def test_k_series_domain():
    with pytest.raises(ValueError):
        k_series(1, chi_bottom(5), 100)
    with pytest.raises(ValueError):
        k_series(2, chi_bottom(5), 8)


def test_gauss_series_fe_small_case():
    c = gauss_series_fe_case(5, -1, 10**5)
    assert c.lhs == pytest.approx(-0.4, abs=1e-10)
    assert c.residual <= c.tail_bound + 1e-6 * abs(c.lhs)


def test_gauss_series_fe_preconditions():
    with pytest.raises(ValueError):
        cech_fe_residual(9, -1)
    with pytest.raises(ValueError):
        cech_fe_residual(7, -1)
    with pytest.raises(ValueError):
        cech_fe_residual(5, 0.5)


def test_twist_leading_term(delta):
    v = reciprocal_L_twist(delta, 1, 2, 16)
    assert abs(v - 1) <= sum(2 * 3 / k**2 for k in range(3, 17, 2))


def test_twist_against_euler_product(delta):
    ps = primes_upto(10**4)[1:].tolist()
    ep = 1.0
    for p in ps:
        a, b = delta.satake(p)
        ep *= ((1 - a / p**2) * (1 - b / p**2)).real
    assert abs(reciprocal_L_twist(delta, 1, 2, 10**4) - ep) < 1e-6


@pytest.mark.parametrize("n,z,smooth", [(9, 2, False), (45, 1.3 + 2j, True), (1001, 1, True),
                                        (12345, 1.5, False)])
def test_twist_against_scalar_loop(delta, n, z, smooth):
    K = 150
    ke = 6 * K if smooth else K
    ref = sum(coeff(delta, k) * jacobi_symbol(k, n) * k ** (-complex(z))
              * (math.exp(-((k / K) ** 2)) if smooth else 1) for k in range(1, ke + 1, 2))
    assert abs(reciprocal_L_twist(delta, n, z, K, smooth) - ref) < 1e-13


def test_twist_multiples_of_three_drop_out(unitary2):
    K = 300
    keep = sum(coeff(unitary2, k) * jacobi_symbol(k, 9) / k**2 for k in range(1, K + 1, 2)
               if k % 3)
    assert abs(reciprocal_L_twist(unitary2, 9, 2, K) - keep) < 1e-14


def test_twist_batch_matches_single(unitary2):
    ns = [1, 3, 127, 129, 255, 9999, 777]
    many = reciprocal_L_twist_many(unitary2, ns, 1.25, 500, True, workers=3)
    single = [reciprocal_L_twist(unitary2, n, 1.25, 500, True) for n in ns]
    assert np.array_equal(many, np.array(single))


def test_twist_validation(delta):
    with pytest.raises(ValueError):
        reciprocal_L_twist(delta, 4, 2, 100)
    with pytest.raises(ValueError):
        reciprocal_L_twist(delta, 5, 0.9, 100)
    with pytest.raises(ValueError):
        reciprocal_L_twist(delta, 5, 2, 8)
    with pytest.raises(KeyError):
        reciprocal_L_twist(delta, 5, 2, 10**6)


@pytest.mark.parametrize("label", ["delta", "unitary2"])
@pytest.mark.parametrize("z,smooth", [(1, True), (1, False), (2, True), (1.25 + 3j, False)])
def test_truncation_estimate_self_consistent(label, z, smooth):
    rep = get_rep(label, 10**5)
    rng = np.random.default_rng(11)
    ns = rng.integers(0, 5000, 100) * 2 + 1
    K = 512
    est = np.array([twist_truncation_estimate(rep, int(n), z, K, smooth) for n in ns])
    change = np.abs(reciprocal_L_twist_many(rep, ns, z, 2 * K, smooth)
                    - reciprocal_L_twist_many(rep, ns, z, K, smooth))
    assert np.all(change <= 3 * est)

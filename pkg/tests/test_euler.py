import math
from fractions import Fraction

import mpmath as mp
import pytest

from pseudomoments import arith, euler
from pseudomoments.euler import (
    a_asymptotic,
    arithmetic_factor,
    calibrate_norton_C,
    diagonal_F,
    local_factor_a,
    norton_bound,
)
from pseudomoments.moments import pseudomoment


class TestLocalFactor:
    def test_k1_rho1_is_one(self):
        for p in (2, 3, 101):
            assert abs(local_factor_a(p, 1, 1) - 1) < mp.mpf(2) ** -100

    def test_k2_rho1_collapses_to_one_minus_p2(self):
        # local factor at k=2, rho=1 is (1-1/p)^4 (1+1/p)/(1-1/p)^3 = 1 - 1/p^2
        for p in (2, 3, 5, 13):
            assert float(local_factor_a(p, 2, 1)) == pytest.approx(1 - 1 / p**2, rel=1e-25)

    def test_rho_zero(self):
        assert local_factor_a(2, 1, 0) == 1
        assert local_factor_a(7, 4, 0) == 1

    def test_against_direct_series(self):
        # blunt 200-term reference sum
        p, k, rho2 = 3, 3, Fraction(1, 2)
        with mp.workprec(120):
            r2 = mp.mpf(rho2.numerator) / rho2.denominator
            ref = (1 - mp.mpf(1) / p) ** (k * k * r2) * mp.fsum(
                mp.mpf(arith.dk_prime_power(k, j)) ** 2 * r2**j / mp.mpf(p) ** j
                for j in range(200)
            )
        assert float(local_factor_a(p, k, rho2)) == pytest.approx(float(ref), rel=1e-25)

    def test_rho2_range_enforced(self):
        with pytest.raises(ValueError):
            local_factor_a(2, 2, Fraction(21, 10))


class TestArithmeticFactor:
    def test_a11_exact(self):
        res = arithmetic_factor(1, 1, 128, 10**4)
        assert res.value == 1 and res.tail_bound == 0

    def test_a_k0_is_one(self):
        for k in (1, 2, 5):
            res = arithmetic_factor(k, 0, 64, 1000)
            assert res.value == 1 and res.tail_bound == 0

    def test_a21_closed_form(self):
        res = arithmetic_factor(2, 1, 128, 10**5)
        with mp.workprec(160):
            assert abs(res.value - 6 / mp.pi**2) < mp.mpf("1e-30")
        assert float(res.tail_bound) < 1e-20

    def test_a21_sigma_extrapolation_oracle(self):
        # A(sigma) = F(sigma)/zeta(1+2s)^4 collapses to 1/zeta(2+4s) for k=2;
        # Richardson extrapolation of that sigma-family toward sigma = 0,
        # built from mpmath zeta values alone, must recover the product.
        with mp.workprec(120):
            f = lambda s: 1 / mp.zeta(2 + 4 * s)
            h = mp.mpf(1) / 64
            table = [[f(h / 2**i)] for i in range(4)]
            for j in range(1, 4):
                for i in range(4 - j):
                    table[i].append(
                        (2**j * table[i + 1][j - 1] - table[i][j - 1]) / (2**j - 1))
            extrap = table[0][3]
            res = arithmetic_factor(2, 1, 128, 10**4)
            assert abs(res.value - extrap) / extrap < mp.mpf("1e-6")

    def test_decreasing_in_k(self):
        vals = [float(arithmetic_factor(k, Fraction(1, 4), 64, 2000).value)
                for k in (1, 2, 3)]
        assert 0 < vals[2] < vals[1] < vals[0] < 1

    def test_truncation_refinement(self):
        for k, rho2 in [(2, Fraction(1)), (3, Fraction(1, 2))]:
            coarse = arithmetic_factor(k, rho2, 96, 10**3)
            fine = arithmetic_factor(k, rho2, 96, 10**4)
            assert fine.tail_bound < coarse.tail_bound
            with mp.workprec(256):
                gap = abs(fine.value - coarse.value)
                assert gap <= coarse.value * mp.expm1(coarse.tail_bound)

    def test_truncation_prime_validation(self):
        with pytest.raises(ValueError):
            arithmetic_factor(2, 1, 64, 50)


class TestDiagonalF:
    def test_zeta2(self):
        res = diagonal_F(1, 1, 0.5, 96, 10**4)
        with mp.workprec(120):
            assert abs(res.value - mp.zeta(2)) < mp.mpf("1e-20")

    def test_pole_approach(self):
        sigma = 1e-3
        res = diagonal_F(1, 1, sigma, 96, 10**4)
        assert float(res.value) == pytest.approx(1 / (2 * sigma), rel=0.01)
        with mp.workprec(120):
            assert abs(res.value - mp.zeta(1 + 2 * mp.mpf(sigma))) < mp.mpf("1e-18")

    def test_divisor_squared_identity(self):
        # sum d_2(n)^2 / n^2 = zeta(2)^4 / zeta(4)
        res = diagonal_F(2, 1, 0.5, 96, 10**4)
        with mp.workprec(120):
            target = mp.zeta(2) ** 4 / mp.zeta(4)
            assert abs(res.value - target) < mp.mpf("1e-18")

    def test_brute_series_oracle(self):
        # direct truncated Dirichlet series at a comfortable sigma
        k, rho2, sigma = 2, Fraction(1, 2), 1.0
        res = diagonal_F(k, rho2, sigma, 64, 10**4)
        om = arith.omega_table(200000)
        total = 0.0
        for n in range(1, 200001):
            d = 1
            for p, e in arith.factorize(n).factors:
                d *= arith.dk_prime_power(k, e)
            total += d * d * float(rho2) ** int(om[n]) / n ** (1 + 2 * sigma)
        assert float(res.value) == pytest.approx(total, rel=1e-6)

    def test_monotone_in_sigma_and_rho(self):
        vals = [float(diagonal_F(2, 1, s, 64, 2000).value) for s in (0.2, 0.4, 0.8)]
        assert vals[0] > vals[1] > vals[2]
        vals = [float(diagonal_F(2, r, 0.4, 64, 2000).value)
                for r in (Fraction(1, 2), Fraction(1), Fraction(3, 2))]
        assert vals[0] < vals[1] < vals[2]

    def test_rankin_domination(self):
        # M_{k,rho}(N) <= N^{2 k sigma} F(sigma) for every sigma > 0
        for N in (50, 200):
            for k in (1, 2, 3):
                for rho2 in (Fraction(1, 2), Fraction(1)):
                    moment = float(pseudomoment(N, k, rho2).value_float)
                    sigmas = [float(k * rho2) / math.log(N)]
                    if k >= 2:
                        sigmas.append(1 / math.log(k))
                    for sigma in sigmas:
                        F = diagonal_F(k, rho2, sigma, 64, 10**4)
                        upper = float(F.value * mp.exp(F.tail_bound))
                        assert moment <= N ** (2 * k * sigma) * upper * (1 + 1e-12)


class TestNortonBound:
    def test_plug_in(self):
        k, sigma = 3, 1 / math.log(3)
        got = float(norton_bound(k, 1, sigma))
        expected = math.exp(-9 * (math.log(2 * sigma) + math.log(math.log(9))))
        assert got == pytest.approx(expected, rel=1e-12)

    def test_monotone_in_sigma(self):
        vals = [float(norton_bound(3, 1, s)) for s in (0.05, 0.2, 0.5, 0.9)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            norton_bound(2, Fraction(1, 8), 0.1)  # k^2 rho^2 = 1/2 <= 1

    def test_calibrated_C_dominates_diagonal(self):
        C = calibrate_norton_C()
        slack = C + 0.05
        for k in (2, 3, 4, 5):
            for sigma in (1e-2, 1e-1):
                if sigma > 1 / math.log(k):
                    continue
                F = diagonal_F(k, 1, sigma, 64, 10**4)
                upper = float(F.value * mp.exp(F.tail_bound))
                assert upper <= float(norton_bound(k, 1, sigma, slack))


class TestAsymptotic:
    def test_loglog_term_vanishes(self):
        k = math.e  # k rho = e, log log = 0
        got = float(a_asymptotic(k, 1))
        expected = math.exp(-k * k * math.log(2 * math.exp(0.5772156649015329)))
        assert got == pytest.approx(expected, rel=1e-10)

    def test_ratio_tends_to_one(self):
        ratios = []
        for k in (3, 5, 8):
            a = arithmetic_factor(k, 1, 64, 2 * 10**4)
            ratios.append(float(mp.log(a.value) / mp.log(a_asymptotic(k, 1))))
        assert all(r1 < r2 for r1, r2 in zip(ratios, ratios[1:]))
        assert all(abs(r - 1) < abs(ratios[0] - 1) + 1e-12 for r in ratios[1:])
        assert abs(ratios[-1] - 1) < 0.5

    def test_small_k_positive_below_one(self):
        val = float(a_asymptotic(2, 1))
        assert 0 < val < 1

    def test_domain_error(self):
        with pytest.raises(ValueError):
            a_asymptotic(1, 1)

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from pseudomoments.polytope import (
    gamma_factor_exact_k1,
    gamma_factor_mc,
    membership,
    volume_mc,
    volume_sandwich,
)

GAMMA_2_1 = Fraction(11, 1680)  # smoothed-moment constant at k=2, rho=1 (exact)
VOL_P2 = Fraction(1, 6)


class TestMembership:
    def test_k1(self):
        assert membership([0.999], 1, 1)
        assert membership([0.999], 1, Fraction(1, 2))
        assert not membership([1.001], 1, 1)

    def test_k2_boundary(self):
        assert membership([[0.5, 0.5], [0.5, 0.5]], 2, 1)

    def test_k2_twisted_reject(self):
        # x^2 row sums are 2 * 0.64 = 1.28 > 1
        assert not membership([[0.8, 0.8], [0.8, 0.8]], 2, Fraction(1, 2))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            membership([[-0.1, 0.2], [0.2, 0.2]], 2, 1)


class TestExactK1:
    def test_values(self):
        assert gamma_factor_exact_k1(1) == pytest.approx(1 / 3, rel=1e-15)
        assert gamma_factor_exact_k1(2) == pytest.approx(1 / 12, rel=1e-15)
        assert gamma_factor_exact_k1(50) < 1e-10

    @pytest.mark.parametrize("rho2", [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)])
    def test_quadrature_oracle(self, rho2):
        r = float(rho2)
        integrand = lambda x: (1 - x ** (1 / r)) ** 2 / math.gamma(1 + r)
        val, err = integrate.quad(integrand, 0, 1, epsabs=1e-12)
        assert gamma_factor_exact_k1(rho2) == pytest.approx(val, abs=1e-9)


class TestGammaMC:
    @pytest.mark.parametrize("rho2", [Fraction(1, 2), Fraction(1), Fraction(3, 2)])
    def test_k1_within_four_se(self, rho2):
        est = gamma_factor_mc(1, rho2, samples=10**5, seed=5)
        assert est.exact == pytest.approx(gamma_factor_exact_k1(rho2))
        assert abs(est.mean - est.exact) <= 4 * est.std_error

    def test_k2_exact_constant(self):
        # 4D integral of (1-r1)(1-r2)(1-c1)(1-c2) over P_2 evaluates to 11/1680
        est = gamma_factor_mc(2, 1, samples=4 * 10**6, seed=11)
        assert abs(est.mean - float(GAMMA_2_1)) <= 4 * est.std_error

    def test_min_samples(self):
        with pytest.raises(ValueError):
            gamma_factor_mc(2, 1, samples=10)

    def test_integrand_below_volume(self):
        g = gamma_factor_mc(2, Fraction(3, 2), samples=10**5, seed=3)
        v = volume_mc(2, Fraction(3, 2), samples=10**5, seed=3)
        raw = g.mean * math.gamma(1 + 1.5) ** 4
        assert raw <= v.mean + 4 * (g.std_error + v.std_error)


class TestVolumeMC:
    def test_k1_full_interval(self):
        est = volume_mc(1, 1, samples=10**4, seed=1)
        assert est.exact == 1.0
        assert est.mean == 1.0

    def test_k2_exact_sixth(self):
        # Vol(P_2) = 1/6: integrate the 2D cell area formula over one row
        def cell_area(a, b):
            return b * (1 - b) + ((1 - b) ** 2 - a**2) / 2 if a + b <= 1 else 0.0

        val, _ = integrate.dblquad(lambda b, a: cell_area(a, b), 0, 1, 0, lambda a: 1 - a)
        assert val == pytest.approx(float(VOL_P2), abs=1e-9)
        est = volume_mc(2, 1, samples=2 * 10**6, seed=9)
        assert abs(est.mean - float(VOL_P2)) <= 4 * est.std_error

    def test_seed_pair_consistency(self):
        a = volume_mc(2, Fraction(1, 2), samples=5 * 10**5, seed=101)
        b = volume_mc(2, Fraction(1, 2), samples=5 * 10**5, seed=202)
        assert abs(a.mean - b.mean) <= 3 * math.hypot(a.std_error, b.std_error)

    def test_transpose_symmetry_seed_paired(self):
        # permuted sampling stream: distribution is transpose-invariant, so
        # independent streams must agree within noise
        a = gamma_factor_mc(3, 1, samples=2 * 10**6, seed=7)
        b = gamma_factor_mc(3, 1, samples=2 * 10**6, seed=77)
        assert abs(a.mean - b.mean) <= 4 * math.hypot(a.std_error, b.std_error)


class TestSandwich:
    def test_k1_example(self):
        lo, hi = volume_sandwich(1, 1)
        assert lo == pytest.approx(1 / 8, rel=1e-12)
        assert hi == pytest.approx(1.0, rel=1e-12)
        assert lo < 1 / 3 < hi

    def test_k2_example(self):
        lo, hi = volume_sandwich(2, 1)
        assert lo == pytest.approx(2.0**-12, rel=1e-12)
        assert hi == pytest.approx(0.25, rel=1e-12)
        assert lo < float(GAMMA_2_1) < hi

    @pytest.mark.parametrize("k,rho2,samples", [
        (2, Fraction(1, 2), 2 * 10**5),
        (2, Fraction(1), 10**6),
        (2, Fraction(3, 2), 4 * 10**6),
        (3, Fraction(1, 2), 10**6),
        (3, Fraction(1), 2 * 10**7),
        (4, Fraction(1, 2), 2 * 10**7),
    ])
    def test_brackets_mc_three_sigma(self, k, rho2, samples):
        est = gamma_factor_mc(k, rho2, samples=samples, seed=13)
        lo, hi = volume_sandwich(k, rho2)
        assert lo <= est.mean - 3 * est.std_error
        assert est.mean + 3 * est.std_error <= hi

    def test_log_slope_matches_minus_rho2(self):
        # log gamma ~ -k^2 rho^2 log k: least-squares slope of log(mean)
        # against k^2 log k should sit within 25% of -rho^2.
        cases = {
            Fraction(1, 2): [(2, 10**6), (3, 4 * 10**6), (4, 3 * 10**7)],
            Fraction(1): [(2, 10**6), (3, 3 * 10**7)],
        }
        for rho2, cells in cases.items():
            xs, ys = [], []
            for k, n in cells:
                est = gamma_factor_mc(k, rho2, samples=n, seed=21)
                xs.append(k * k * math.log(k))
                ys.append(math.log(est.mean))
            slope = np.polyfit(xs, ys, 1)[0]
            assert abs(slope + float(rho2)) < 0.25 * float(rho2)


class TestDeterminism:
    def test_worker_count_invariance(self):
        runs = [gamma_factor_mc(2, Fraction(3, 2), samples=3 * (1 << 16) + 17,
                                seed=42, workers=w) for w in (1, 4)]
        assert runs[0].mean == runs[1].mean
        assert runs[0].std_error == runs[1].std_error

    def test_same_seed_same_result(self):
        a = volume_mc(3, 1, samples=10**5, seed=8, workers=2)
        b = volume_mc(3, 1, samples=10**5, seed=8, workers=3)
        assert a.to_json_dict() == b.to_json_dict()

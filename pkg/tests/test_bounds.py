import math
from fractions import Fraction

import mpmath as mp
import pytest

from pseudomoments.bounds import (
    breakdown_threshold,
    rankin_upper,
    sandwich,
    weissler_lower,
)
from pseudomoments.moments import pseudomoment
from tests.test_moments import brute_twisted_moment


class TestWeisslerLower:
    def test_integer_k_is_exact_moment(self):
        for N, k in [(10, 2), (30, 2), (20, 3)]:
            val, exact, chain = weissler_lower(N, k)
            want = pseudomoment(N, k, 1).value_exact
            assert exact == want
            assert float(val) == pytest.approx(float(want), rel=1e-25)

    def test_fractional_k_brute_inner(self):
        val, _, chain = weissler_lower(10, Fraction(3, 2))
        inner = brute_twisted_moment(10, 2, Fraction(3, 4))
        with mp.workprec(120):
            want = mp.power(mp.mpf(inner.numerator) / inner.denominator, mp.mpf(3) / 4)
        assert float(val) == pytest.approx(float(want), rel=1e-20)
        assert chain["ceil_k"] == 2
        assert chain["rho_squared"] == "3/4"

    def test_monotone_in_N(self):
        vals = [float(weissler_lower(N, Fraction(5, 2))[0]) for N in (10, 20, 40)]
        assert vals[0] < vals[1] < vals[2]

    def test_continuity_at_integer_boundary(self):
        # the one-sided limit k -> m matches the exact value at m; the
        # approach is linear with slope log M + E[Omega] (a few units), so
        # eps = 1e-6 lands within ~1e-5 relative.
        N, m = 20, 2
        exact = float(pseudomoment(N, m, 1).value_float)
        for eps, tol in [(Fraction(1, 10**6), 1e-4), (Fraction(1, 10**3), 2e-2)]:
            val = float(weissler_lower(N, m - eps)[0])
            assert abs(val - exact) / exact < tol

    def test_smoothed_variant_is_weaker(self):
        plain = float(weissler_lower(20, Fraction(5, 2))[0])
        smooth = float(weissler_lower(20, Fraction(5, 2), use_smoothed=True)[0])
        assert smooth <= plain


class TestRankinUpper:
    def test_dominates_exact_moment(self):
        for N in (50, 100):
            upper, chain = rankin_upper(N, 2)
            exact = pseudomoment(N, 2, 1).value_exact
            assert mp.mpf(exact.numerator) / exact.denominator <= upper

    def test_grid_refinement_never_increases(self):
        coarse, _ = rankin_upper(100, Fraction(5, 2), sigma_grid_segments=32)
        fine, _ = rankin_upper(100, Fraction(5, 2), sigma_grid_segments=64)
        assert fine <= coarse

    def test_grid_beats_or_ties_default(self):
        default, _ = rankin_upper(200, 2)
        grid, _ = rankin_upper(200, 2, sigma_grid_segments=32)
        assert grid <= default

    def test_loglog_normalization_trend(self):
        # log(upper)/(k^2 log log N) decreases toward 1 as N grows
        ratios = []
        for N in (10**3, 10**4, 10**5):
            upper, _ = rankin_upper(N, 2)
            ratios.append(float(mp.log(upper)) / (4 * math.log(math.log(N))))
        assert ratios[0] > ratios[1] > ratios[2] > 1

    def test_needs_k_at_least_two(self):
        with pytest.raises(ValueError):
            rankin_upper(100, Fraction(3, 2))

    def test_sigma_validation(self):
        with pytest.raises(ValueError):
            rankin_upper(100, 2, sigma=-0.1)


class TestSandwich:
    def test_exact_inside_at_integer_k(self):
        cert = sandwich(50, 2, 96)
        exact = pseudomoment(50, 2, 1).value_exact
        assert cert.lower_exact == exact
        assert cert.lower <= cert.upper
        assert mp.mpf(exact.numerator) / exact.denominator <= cert.upper

    def test_fractional_k_finite(self):
        cert = sandwich(50, Fraction(5, 2), 96)
        assert cert.upper is not None and cert.lower is not None
        assert cert.lower <= cert.upper
        assert cert.lower_normalized <= cert.upper_normalized

    def test_below_two_has_no_upper(self):
        cert = sandwich(50, Fraction(3, 2), 96)
        assert cert.upper is None
        assert cert.lower > 0

    def test_main_term_value(self):
        cert = sandwich(50, 2, 96)
        want = math.exp(-4 * math.log(2) - 4 * math.log(math.log(2)))
        assert float(cert.main_term) == pytest.approx(want, rel=1e-12)

    def test_json_round_trip(self):
        d = sandwich(20, Fraction(5, 2), 64).to_json_dict()
        assert d["N"] == 20
        assert d["k"] == "5/2"
        assert d["upper_chain"]["floor_k"] == 2
        assert d["lower_chain"]["ceil_k"] == 3


class TestBreakdown:
    def test_k_star_formula(self):
        rep = breakdown_threshold(10**6, 1.0)
        want = math.log(10**6) / math.log(math.log(10**6))
        assert rep.k_star == pytest.approx(want, rel=1e-14)

    def test_identity_exact(self):
        for N in (10**4, 10**8, 10**16):
            for C in (1.0, 2.5, 7.389):
                rep = breakdown_threshold(N, C)
                assert rep.residual == pytest.approx(rep.closed_form, abs=1e-12)

    def test_residual_slow_decay(self):
        # |residual| ~ log log log N / log log N: barely moving at desk N
        # (0.445, 0.457, 0.440 at 10^4, 10^8, 10^16) and clearly decayed for
        # astronomically large N supplied through log_N.
        r16 = breakdown_threshold(10**16, 1.0).residual
        r8 = breakdown_threshold(10**8, 1.0).residual
        assert abs(r16) < abs(r8)
        huge = breakdown_threshold(float("inf"), 1.0, log_N=10.0**6)
        assert abs(huge.residual) < 0.01

    def test_contradiction_flag(self):
        rep = breakdown_threshold(10**6, math.exp(2.0), calibration_C0=1.0)
        assert rep.contradiction is True
        rep2 = breakdown_threshold(10**6, 1.0, calibration_C0=0.0)
        assert rep2.contradiction is False

    def test_domain(self):
        with pytest.raises(ValueError):
            breakdown_threshold(10, 1.0)

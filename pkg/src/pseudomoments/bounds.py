"""Certified bound chains for pseudomoments at non-integer k.

Lower chain (hypercontractive): with m = ceil(k) and rho^2 = k/m,
    M_k(N) >= (M_{m, rho}(N))^{rho^2},
and the inner twisted moment is exact because rho^2 stays rational.

Upper chain (Rankin): with m = floor(k) and rho^2 = k/m <= 3/2 for k >= 2,
    M_k(N) <= (N^{2 m sigma} F_{m,rho}(sigma,...,sigma))^{rho^2},
using the certified upper side of the Euler-product evaluation. The default
sigma = k / log N follows the saddle heuristic; an optional nested
log-spaced grid takes the min over sigma, which can only improve the bound.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath as mp

from .errors import BudgetExceededError
from .euler import diagonal_F
from .moments import MomentResult, as_fraction, pseudomoment, smoothed_pseudomoment


@dataclass
class BoundCertificate:
    N: int
    k: Fraction
    lower: mp.mpf
    upper: Optional[mp.mpf]
    lower_exact: Optional[Fraction]
    lower_chain: dict = field(default_factory=dict)
    upper_chain: Optional[dict] = None
    main_term: Optional[mp.mpf] = None
    lower_normalized: Optional[mp.mpf] = None
    upper_normalized: Optional[mp.mpf] = None
    precision_bits: int = 128

    def to_json_dict(self) -> dict:
        dps = max(int(self.precision_bits * 0.30103), 15)

        def fmt(x):
            return None if x is None else mp.nstr(x, dps)

        return {
            "N": self.N,
            "k": f"{self.k.numerator}/{self.k.denominator}",
            "lower": fmt(self.lower),
            "upper": fmt(self.upper),
            "lower_chain": self.lower_chain,
            "upper_chain": self.upper_chain,
            "main_term": fmt(self.main_term),
            "lower_normalized": fmt(self.lower_normalized),
            "upper_normalized": fmt(self.upper_normalized),
        }


def weissler_lower(N: int, k, precision_bits: int = 128,
                   use_smoothed: bool = False):
    """(M_{ceil(k), rho}(N))^{rho^2} with rho^2 = k/ceil(k); exact inner moment.

    With use_smoothed the inner moment is the smoothed variant, still a valid
    lower bound since every smoothing weight is <= 1.
    """
    kf = as_fraction(k)
    if kf < 1:
        raise ValueError("k must be >= 1")
    m = -((-kf.numerator) // kf.denominator)  # ceil
    rho2 = kf / m
    if use_smoothed:
        inner: MomentResult = smoothed_pseudomoment(N, m, rho2, precision_bits)
    else:
        inner = pseudomoment(N, m, rho2, precision_bits)
    with mp.workprec(precision_bits + 16):
        base = (
            mp.mpf(inner.value_exact.numerator) / inner.value_exact.denominator
            if inner.value_exact is not None
            else inner.value_float
        )
        value = +mp.power(base, mp.mpf(rho2.numerator) / rho2.denominator)
    chain = {
        "ceil_k": m,
        "rho_squared": f"{rho2.numerator}/{rho2.denominator}",
        "smoothed": use_smoothed,
        "inner_moment": inner.to_json_dict(),
    }
    exact = inner.value_exact if (rho2 == 1 and not use_smoothed) else None
    return value, exact, chain


def _sigma_grid(center: float, segments: int = 32):
    """Nested log-spaced grid on [center/8, 8*center]; doubling `segments`
    refines without dropping any existing point."""
    lo, hi = center / 8.0, center * 8.0
    ratio = hi / lo
    return [lo * ratio ** (i / segments) for i in range(segments + 1)]


def rankin_upper(N: int, k, sigma: Optional[float] = None,
                 precision_bits: int = 128, sigma_grid_segments: Optional[int] = None,
                 truncation_prime: int = 10**4):
    """Certified upper bound (N^{2 m sigma} F_{m,rho}(sigma))^{rho^2}, m = floor(k)."""
    kf = as_fraction(k)
    if kf < 2:
        raise ValueError("the upper chain needs k >= 2 (so that rho^2 <= 3/2)")
    m = kf.numerator // kf.denominator  # floor
    rho2 = kf / m
    logN = math.log(N)
    default_sigma = float(kf) / logN  # m * rho^2 / log N
    if sigma is not None and sigma <= 0:
        raise ValueError("sigma must be positive")
    candidates = (
        [sigma] if sigma is not None
        else _sigma_grid(default_sigma, sigma_grid_segments) if sigma_grid_segments
        else [default_sigma]
    )
    if m >= 2 and max(candidates) > 1.0 / math.log(m):
        warnings.warn(
            f"sigma above 1/log(floor k) = {1.0/math.log(m):.4f}; "
            "outside the regime of the Norton-type estimate", stacklevel=2)
    best = None
    best_sigma = None
    best_F = None
    with mp.workprec(precision_bits + 16):
        for sg in candidates:
            F = diagonal_F(m, rho2, sg, precision_bits, truncation_prime)
            upper_F = F.value * mp.exp(F.tail_bound)  # certified upper side
            val = mp.power(
                mp.power(mp.mpf(N), 2 * m * mp.mpf(sg)) * upper_F,
                mp.mpf(rho2.numerator) / rho2.denominator,
            )
            if best is None or val < best:
                best, best_sigma, best_F = +val, sg, F
    chain = {
        "floor_k": m,
        "rho_squared": f"{rho2.numerator}/{rho2.denominator}",
        "sigma": repr(best_sigma),
        "F_value": mp.nstr(best_F.value, 20),
        "F_tail_bound": mp.nstr(best_F.tail_bound, 6, strip_zeros=False),
        "grid_points": len(candidates),
    }
    return best, chain


def sandwich(N: int, k, precision_bits: int = 128,
             sigma_grid_segments: Optional[int] = None,
             use_smoothed_lower: bool = False,
             truncation_prime: int = 10**4) -> BoundCertificate:
    """Two-sided certificate for M_k(N), with Theorem-style normalizations.

    For 1 <= k < 2 only the lower side is available. main_term is the
    leading normalized asymptotic exp(-k^2 log k - k^2 log log k) for
    comparison (meaningful for k > 1).
    """
    kf = as_fraction(k)
    if kf < 1:
        raise ValueError("k must be >= 1")
    lower, lower_exact, lchain = weissler_lower(N, kf, precision_bits,
                                                use_smoothed_lower)
    upper = None
    uchain = None
    if kf >= 2:
        upper, uchain = rankin_upper(N, kf, None, precision_bits,
                                     sigma_grid_segments, truncation_prime)
    with mp.workprec(precision_bits + 16):
        km = mp.mpf(kf.numerator) / kf.denominator
        norm = mp.power(mp.log(N), km * km)
        lower_n = +(lower / norm)
        upper_n = None if upper is None else +(upper / norm)
        main = None
        if kf > 1:
            main = +mp.exp(-km * km * mp.log(km) - km * km * mp.log(mp.log(km)))
    return BoundCertificate(N, kf, lower, upper, lower_exact, lchain, uchain,
                            main, lower_n, upper_n, precision_bits)


@dataclass
class BreakdownReport:
    """k* = C log N / log log N and the identity residual of the upper-bound
    breakdown computation.

    residual = log log N - log k* - log log k* + log C, which algebraically
    equals -log(1 + (log C - log log log N)/log log N); both sides are
    reported so the agreement and the slow decay toward 0 are visible.
    With an O(k^2)-constant calibration C0, the normalized main term at k*
    is exp(k*^2 (residual - log C + C0)); contradiction with the trivial
    bound M_k >= 1 is flagged when that exponent is negative.
    """

    N: float
    C: float
    k_star: float
    residual: float
    closed_form: float
    exponent_per_k2: Optional[float] = None
    contradiction: Optional[bool] = None

    def to_json_dict(self) -> dict:
        return {
            "N": repr(self.N),
            "C": repr(self.C),
            "k_star": repr(self.k_star),
            "residual": repr(self.residual),
            "closed_form": repr(self.closed_form),
            "exponent_per_k2": None if self.exponent_per_k2 is None else repr(self.exponent_per_k2),
            "contradiction": self.contradiction,
        }


def breakdown_threshold(N: float, C: float, calibration_C0: Optional[float] = None,
                        log_N: Optional[float] = None) -> BreakdownReport:
    """Threshold k* = C log N / log log N where the upper bound must fail.

    Accepts huge N through log_N (only logarithms of N enter the formulas).
    """
    if C <= 0:
        raise ValueError("C must be positive")
    logN = math.log(N) if log_N is None else float(log_N)
    if logN <= 1.0:
        raise ValueError("need N >= 16 or so: log log N must be positive")
    llN = math.log(logN)
    if llN <= 0:
        raise ValueError("log log N must be positive (N >= 16)")
    k_star = C * logN / llN
    log_k = math.log(k_star)
    residual = llN - log_k - math.log(log_k) + math.log(C)
    lllN = math.log(llN)
    closed = -math.log1p((math.log(C) - lllN) / llN)
    exponent = None
    contradiction = None
    if calibration_C0 is not None:
        exponent = residual - math.log(C) + calibration_C0
        contradiction = exponent < 0
    return BreakdownReport(N, C, k_star, residual, closed, exponent, contradiction)

"""Arbitrary-precision Euler products: the arithmetic factor a(k, rho) and
the diagonal multiple-Dirichlet-series values F_{k,rho}(sigma, ..., sigma).

Truncation at a prime P alone converges far too slowly (the neglected
log-tail is of order 1/P), so the tail over p > P is resummed through prime
zeta values: with f(x) = (1-x)^{k^2 rho^2} D(x) and log f(x) = sum c_m x^m,

    sum_{p>P} log f(1/p) = sum_{m>=2} c_m (P(m) - sum_{p<=P} p^{-m}),

where the c_m are computed exactly as rationals and P(m) is the prime zeta
function. The remainder past the series cutoff M is certified by elementary
comparisons only: |c_m| <= (2 k^2 rho^2)^m and sum_{n>P} n^{-m} <= P^{1-m},
giving a geometric bound with ratio 2 k^2 rho^2 / P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import mpmath as mp

from .arith import dk_prime_power, primes_up_to
from .errors import SeriesDivergenceError
from .moments import as_fraction

J_MAX = 10**4
DELTA = Fraction(1, 100)  # enforce rho^2 <= 2 - DELTA
_M_CAP = 64


@dataclass
class EulerProductValue:
    value: mp.mpf
    truncation_prime: int
    tail_bound: mp.mpf
    precision_bits: int
    k: int = 0
    rho_squared: Optional[Fraction] = None
    sigma: Optional[float] = None

    def to_json_dict(self) -> dict:
        dps = max(int(self.precision_bits * 0.30103), 15)
        return {
            "k": self.k,
            "rho_squared": None
            if self.rho_squared is None
            else f"{self.rho_squared.numerator}/{self.rho_squared.denominator}",
            "sigma": None if self.sigma is None else repr(self.sigma),
            "value": mp.nstr(self.value, dps),
            "truncation_prime": self.truncation_prime,
            "tail_bound": mp.nstr(self.tail_bound, 8, strip_zeros=False),
        }


def _check_rho2(rho2: Fraction) -> None:
    if rho2 < 0:
        raise ValueError("rho^2 must be nonnegative")
    if rho2 > 2 - DELTA:
        raise ValueError(f"rho^2 = {rho2} exceeds the convergence range 2 - {DELTA}")


def _local_series_coeffs(k: int, rho2: Fraction, M: int) -> List[Fraction]:
    """Coefficients of D(x) = sum_j d_k(p^j)^2 rho^{2j} x^j up to x^M."""
    return [Fraction(dk_prime_power(k, j)) ** 2 * rho2**j for j in range(M + 1)]

def _log_series(dcoef: List[Fraction]) -> List[Fraction]:
    """Formal log of a power series with constant term 1 (Newton recursion)."""
    M = len(dcoef) - 1
    v = [Fraction(0)] * (M + 1)
    for m in range(1, M + 1):
        s = Fraction(0)
        for i in range(1, m):
            s += i * v[i] * dcoef[m - i]
        v[m] = dcoef[m] - s / m
    return v


def local_factor_a(p: int, k: int, rho_squared, precision_bits: int = 128) -> mp.mpf:
    """Local factor (1 - 1/p)^{k^2 rho^2} sum_j d_k(p^j)^2 rho^{2j} p^{-j}."""
    rho2 = as_fraction(rho_squared)
    _check_rho2(rho2)
    if rho2 == 0:
        return mp.mpf(1)
    with mp.workprec(precision_bits + 16):
        pm = mp.mpf(p)
        r2 = mp.mpf(rho2.numerator) / rho2.denominator
        A = mp.mpf((k * k * rho2).numerator) / (k * k * rho2).denominator
        s = mp.mpf(1)
        term = mp.mpf(1)
        threshold = mp.mpf(2) ** (-(precision_bits + 8))
        j = 0
        x = r2 / pm
        while True:
            j += 1
            term = term * x * (mp.mpf(j + k - 1) / j) ** 2
            s += term
            if term < s * threshold:
                break
            if j >= J_MAX:
                raise SeriesDivergenceError(p, k, rho2, J_MAX)
        return +( (1 - 1 / pm) ** A * s )


def _series_cutoff(alpha: float, P_eff: float, precision_bits: int) -> Tuple[int, float]:
    """Cutoff M with P * (alpha/P_eff)^{M+1} / (1 - alpha/P_eff) below target.

    One extra step past the first admissible M keeps the reported remainder
    strictly shrinking under decade refinements of the truncation prime.
    """
    q = alpha / P_eff
    if q >= 0.5:
        raise ValueError(
            f"truncation prime too small for certified tail: need P^s > {2*alpha:.1f}"
        )
    target = 2.0 ** (-(precision_bits + 8))
    M = 2
    while M < _M_CAP:
        rem = P_eff * q ** (M + 1) / (1 - q)
        if rem <= target:
            M = min(M + 1, _M_CAP)
            break
        M += 1
    return M, P_eff * q ** (M + 1) / (1 - q)


def _prime_power_sums(primes: List[int], exponents) -> List[mp.mpf]:
    """sum_{p<=P} p^{-e} for each exponent e (ascending primes, fixed order)."""
    out = []
    for e in exponents:
        em = mp.mpf(e) if not isinstance(e, mp.mpf) else e
        out.append(mp.fsum(mp.mpf(p) ** (-em) for p in primes))
    return out


def arithmetic_factor(
    k: int,
    rho_squared,
    precision_bits: int = 128,
    truncation_prime: int = 10**5,
) -> EulerProductValue:
    """a(k, rho): product over all primes of the local factor, with a proven
    bound on the log-error of the truncation.

    The reported tail_bound covers the resummation remainder past the series
    cutoff plus a worst-case allowance for the truncated local j-series.
    """
    rho2 = as_fraction(rho_squared)
    _check_rho2(rho2)
    P = truncation_prime
    g = Fraction(k * k) * rho2
    if P < max(int(g), 100):
        raise ValueError(f"truncation prime {P} below max(k^2 rho^2, 100)")
    if rho2 == 0 or (k == 1 and rho2 == 1):
        # every local factor is exactly 1
        return EulerProductValue(mp.mpf(1), P, mp.mpf(0), precision_bits, k, rho2)
    with mp.workprec(precision_bits + 64):
        M, remainder = _series_cutoff(float(2 * g), float(P), precision_bits)
        dcoef = _local_series_coeffs(k, rho2, M)
        v = _log_series(dcoef)
        A = g
        c = [Fraction(0), Fraction(0)] + [
            v[m] - A * Fraction(1, m) for m in range(2, M + 1)
        ]
        assert v[1] == A  # first-order terms cancel; the product converges
        primes = primes_up_to(P)
        logsum = mp.mpf(0)
        Am = mp.mpf(A.numerator) / A.denominator
        r2 = mp.mpf(rho2.numerator) / rho2.denominator
        # stop far below the reported precision so the neglected j-mass over
        # all pi(P) factors stays under the fixed rounding allowance below
        threshold = mp.mpf(2) ** (-(precision_bits + 40))
        for p in primes:
            pm = mp.mpf(p)
            s = mp.mpf(1)
            term = mp.mpf(1)
            x = r2 / pm
            j = 0
            while True:
                j += 1
                term = term * x * (mp.mpf(j + k - 1) / j) ** 2
                s += term
                if term < s * threshold:
                    break
                if j >= J_MAX:
                    raise SeriesDivergenceError(p, k, rho2, J_MAX)
            logsum += Am * mp.log(1 - 1 / pm) + mp.log(s)
        partial = _prime_power_sums(primes, range(2, M + 1))
        for i, m in enumerate(range(2, M + 1)):
            cm = mp.mpf(c[m].numerator) / c[m].denominator
            logsum += cm * (mp.primezeta(m) - partial[i])
        value = mp.exp(logsum)
        tail = mp.mpf(remainder) + mp.mpf(2) ** (-(precision_bits + 10))
        return EulerProductValue(+value, P, +tail, precision_bits, k, rho2)


def diagonal_F(
    k: int,
    rho_squared,
    sigma: float,
    precision_bits: int = 128,
    truncation_prime: int = 10**5,
) -> EulerProductValue:
    """F_{k,rho} on the diagonal: sum_n d_k(n)^2 rho^{2 Omega(n)} n^{-1-2 sigma},
    evaluated as the Euler product of D(p^{-(1+2 sigma)}).

    Valid for any sigma > 0; near sigma = 0 the prime-zeta resummation is what
    keeps the truncation certified (the raw tail decays like P^{-2 sigma}).
    """
    rho2 = as_fraction(rho_squared)
    _check_rho2(rho2)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    P = truncation_prime
    g = Fraction(k * k) * rho2
    if P < max(int(g), 100):
        raise ValueError(f"truncation prime {P} below max(k^2 rho^2, 100)")
    if rho2 == 0:
        return EulerProductValue(mp.mpf(1), P, mp.mpf(0), precision_bits, k, rho2, sigma)
    with mp.workprec(precision_bits + 64):
        # the exponent 1 + 2 sigma must stay in working precision: near the
        # pole the value is amplified by 1/(s-1)^2 against exponent error
        sm = 1 + 2 * mp.mpf(sigma)
        s_float = float(sm)
        M, remainder = _series_cutoff(float(2 * g), float(P) ** s_float, precision_bits)
        dcoef = _local_series_coeffs(k, rho2, M)
        v = _log_series(dcoef)
        primes = primes_up_to(P)
        logsum = mp.mpf(0)
        r2 = mp.mpf(rho2.numerator) / rho2.denominator
        threshold = mp.mpf(2) ** (-(precision_bits + 40))
        for p in primes:
            x = r2 * mp.mpf(p) ** (-sm)
            s = mp.mpf(1)
            term = mp.mpf(1)
            j = 0
            while True:
                j += 1
                term = term * x * (mp.mpf(j + k - 1) / j) ** 2
                s += term
                if term < s * threshold:
                    break
                if j >= J_MAX:
                    raise SeriesDivergenceError(p, k, rho2, J_MAX)
            logsum += mp.log(s)
        exps = [m * sm for m in range(1, M + 1)]
        partial = _prime_power_sums(primes, exps)
        for i, m in enumerate(range(1, M + 1)):
            vm = mp.mpf(v[m].numerator) / v[m].denominator
            logsum += vm * (mp.primezeta(exps[i]) - partial[i])
        value = mp.exp(logsum)
        tail = mp.mpf(remainder) + mp.mpf(2) ** (-(precision_bits + 10))
        return EulerProductValue(+value, P, +tail, precision_bits, k, rho2, sigma)


def norton_bound(k: int, rho_squared, sigma: float, calibration_C: float = 0.0) -> mp.mpf:
    """Explicit Norton-type bound exp(-k^2 rho^2 (log 2sigma + log log(k^2 rho^2) - C)).

    The O(1) constant has no published numeric value; C is a calibration
    parameter supplied by the caller.
    """
    rho2 = as_fraction(rho_squared)
    _check_rho2(rho2)
    if k < 2:
        raise ValueError("the bound is stated for k >= 2")
    if not 0 < sigma <= 1.0 / math.log(k):
        raise ValueError("need 0 < sigma <= 1/log k")
    g = float(Fraction(k * k) * rho2)
    if g <= 1.0:
        raise ValueError("log log(k^2 rho^2) undefined for k^2 rho^2 <= 1")
    with mp.workprec(96):
        expo = -mp.mpf(g) * (mp.log(2 * mp.mpf(sigma)) + mp.log(mp.log(g)) - calibration_C)
        return +mp.exp(expo)


def calibrate_norton_C(ks=(2, 3, 4, 5), sigmas=(1e-2, 1e-1), rho_squared=1,
                       precision_bits: int = 64, truncation_prime: int = 10**4) -> float:
    """Smallest C that makes norton_bound dominate diagonal_F on the grid."""
    rho2 = as_fraction(rho_squared)
    best = 0.0
    for k in ks:
        g = float(Fraction(k * k) * rho2)
        for sg in sigmas:
            if sg > 1.0 / math.log(k):
                continue
            F = diagonal_F(k, rho2, sg, precision_bits, truncation_prime)
            up = float(F.value) * math.exp(float(F.tail_bound))
            # C with bound == F: log F = -g (log 2sigma + loglog g - C)
            C = math.log(up) / g + math.log(2 * sg) + math.log(math.log(g))
            best = max(best, C)
    return best


def a_asymptotic(k: float, rho_squared) -> mp.mpf:
    """Main term exp(-k^2 rho^2 log(2 e^gamma log(k rho))) of the a(k, rho) expansion."""
    rho2 = as_fraction(rho_squared)
    _check_rho2(rho2)
    with mp.workprec(96):
        krho = mp.mpf(k) * mp.sqrt(mp.mpf(rho2.numerator) / rho2.denominator)
        if krho <= 1:
            raise ValueError("main term needs k rho > 1 (log log would be undefined)")
        g = mp.mpf(k * k) * rho2.numerator / rho2.denominator
        return +mp.exp(-g * mp.log(2 * mp.exp(mp.euler) * mp.log(krho)))

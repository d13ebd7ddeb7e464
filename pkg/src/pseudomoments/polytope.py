"""Monte Carlo estimation of the twisted-polytope constants.

Two distinct quantities live here and are easy to conflate:

* volume_mc estimates Vol(P_{k,rho}), the plain volume of the polytope
  {x >= 0 : row and column sums of x_ij^{1/rho^2} are <= 1}. Divided by
  Gamma(1+rho^2) this is the limiting constant of the *unsmoothed* twisted
  moments (Conrey-Gamburd: a(k) Vol(P_k) = lim M_k(N)/(log N)^{k^2};
  at k=2 that product is 1/pi^2).

* gamma_factor_mc estimates the *smoothed-moment* constant
  Gamma(1+rho^2)^{-k^2} * integral over P_{k,rho} of
  prod_i (1 - sum_j x_ij^{1/rho^2}) prod_j (1 - sum_i x_ij^{1/rho^2}),
  which is strictly smaller (at k=2, rho=1 it equals 11/1680, versus
  Vol(P_2) = 1/6).

Sampling is plain uniform rejection on the unit cube with the shared
counter-based chunking, so estimates are unbiased and reproducible across
worker counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .moments import as_fraction
from .sampling import mean_and_stderr, run_chunked


@dataclass
class PolytopeEstimate:
    k: int
    rho_squared: Fraction
    kind: str  # "gamma_factor" | "volume"
    mean: float
    std_error: float
    samples: int
    seed: int
    exact: Optional[float] = None

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "rho_squared": f"{self.rho_squared.numerator}/{self.rho_squared.denominator}",
            "kind": self.kind,
            "mean": repr(self.mean),
            "std_error": repr(self.std_error),
            "samples": self.samples,
            "seed": self.seed,
            "exact": None if self.exact is None else repr(self.exact),
        }


def _fractional_power(x: np.ndarray, rho2: Fraction) -> np.ndarray:
    """x^{1/rho^2} with fast paths for the common exponents."""
    if rho2 == 1:
        return x
    if rho2 == Fraction(1, 2):
        return np.square(x)
    if rho2 == Fraction(1, 3):
        return x * x * x
    if rho2 == 2:
        return np.sqrt(x)
    if rho2 == 3:
        return np.cbrt(x)
    if rho2 == Fraction(3, 2):
        return np.cbrt(np.square(x))
    if rho2 == Fraction(2, 3):
        return np.sqrt(x * x * x)
    return np.power(x, 1.0 / float(rho2))


def membership(x, k: int, rho_squared) -> bool:
    """Is x (a k x k nonnegative array) inside the twisted polytope?"""
    rho2 = as_fraction(rho_squared)
    if rho2 <= 0:
        raise ValueError("rho^2 must be positive")
    arr = np.asarray(x, dtype=np.float64).reshape(k, k)
    if (arr < 0).any():
        raise ValueError("polytope points must have nonnegative coordinates")
    u = _fractional_power(arr, rho2)
    return bool((u.sum(axis=0) <= 1.0).all() and (u.sum(axis=1) <= 1.0).all())


def _mc_partials(k: int, rho2: Fraction, samples: int, seed: int, workers: int,
                 integrand: bool):
    def kernel(rng: np.random.Generator, n: int) -> Tuple[float, float, int, int]:
        x = rng.random((n, k, k))
        u = _fractional_power(x, rho2)
        rows = u.sum(axis=2)
        cols = u.sum(axis=1)
        ok = (rows <= 1.0).all(axis=1) & (cols <= 1.0).all(axis=1)
        hits = int(ok.sum())
        if not integrand:
            return (float(hits), float(hits), hits, n)
        y = np.where(ok, np.prod(1.0 - rows, axis=1) * np.prod(1.0 - cols, axis=1), 0.0)
        return (float(y.sum()), float((y * y).sum()), hits, n)

    return run_chunked(seed, samples, workers, kernel)


def gamma_factor_exact_k1(rho_squared) -> float:
    """Closed form at k=1: 2 / ((1+rho^2)(2+rho^2) Gamma(1+rho^2)).

    Untwisting x^{1/rho^2} -> t turns the integral into a Beta function:
    integral_0^1 (1-t)^2 rho^2 t^{rho^2-1} dt = 2 rho^2 B(rho^2, 3).
    """
    rho2 = as_fraction(rho_squared)
    if rho2 <= 0:
        raise ValueError("rho^2 must be positive")
    r = float(rho2)
    return 2.0 / ((1.0 + r) * (2.0 + r) * math.gamma(1.0 + r))


def gamma_factor_mc(k: int, rho_squared, samples: int = 10**6, seed: int = 0,
                    workers: int = 1) -> PolytopeEstimate:
    """Monte Carlo estimate of the smoothed-moment geometric constant."""
    rho2 = as_fraction(rho_squared)
    if rho2 <= 0:
        raise ValueError("rho^2 must be positive")
    if samples < 10**3:
        raise ValueError("need at least 10^3 samples")
    partials = _mc_partials(k, rho2, samples, seed, workers, integrand=True)
    raw_mean, raw_se = mean_and_stderr([(p[0], p[1], p[3]) for p in partials])
    prefactor = math.gamma(1.0 + float(rho2)) ** (-(k * k))
    exact = gamma_factor_exact_k1(rho2) if k == 1 else None
    return PolytopeEstimate(k, rho2, "gamma_factor", prefactor * raw_mean,
                            prefactor * raw_se, samples, seed, exact)


def volume_mc(k: int, rho_squared, samples: int = 10**6, seed: int = 0,
              workers: int = 1) -> PolytopeEstimate:
    """Hit-rate estimate of Vol(P_{k,rho}); exactly 1 when k = 1."""
    rho2 = as_fraction(rho_squared)
    if rho2 <= 0:
        raise ValueError("rho^2 must be positive")
    if samples < 1:
        raise ValueError("samples must be positive")
    partials = _mc_partials(k, rho2, samples, seed, workers, integrand=False)
    hits = sum(p[2] for p in partials)
    n = sum(p[3] for p in partials)
    p_hat = hits / n
    se = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)
    exact = 1.0 if k == 1 else None
    return PolytopeEstimate(k, rho2, "volume", p_hat, se, samples, seed, exact)


def volume_sandwich(k: int, rho_squared) -> Tuple[float, float]:
    """Closed-form bracket for the smoothed-moment constant:

    Gamma(1+rho^2)^{-k^2} 2^{-2k - k^2 rho^2} k^{-k^2 rho^2}
        <= gamma(k, rho) <= Gamma(1 + k rho^2)^{-k}.

    Lower: a box of side (2k)^{-rho^2} inside the polytope, where every
    integrand factor is >= 1/2. Upper: integrand <= 1 and the polytope sits
    inside a product of l^{1/rho^2}-ball orthants.
    """
    rho2 = as_fraction(rho_squared)
    if k < 1 or rho2 <= 0:
        raise ValueError("need k >= 1 and rho^2 > 0")
    r = float(rho2)
    log_lower = (
        -k * k * math.lgamma(1.0 + r)
        - (2 * k + k * k * r) * math.log(2.0)
        - k * k * r * math.log(k)
    )
    log_upper = -k * math.lgamma(1.0 + k * r)
    return math.exp(log_lower), math.exp(log_upper)

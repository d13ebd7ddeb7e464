"""Polytorus toolkit: Bohr lifts, concentration sampling, Bernstein and
Khintchine bounds, smooth projections, and the smooth-sum comparison.

A Dirichlet polynomial sum a_n n^{-s} lifts to F(z) = sum a_n z(n) on T^d,
d = pi(N), by sending the j-th prime to an independent unimodular variable;
the lift preserves every L^q norm of the vertical flow, so norm questions
become questions about trigonometric polynomials in d variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Mapping, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np

from . import arith
from .errors import BudgetExceededError
from .moments import DirichletPolynomial, as_fraction, l2k_norm, sup_norm_nonneg
from .sampling import run_chunked


@dataclass(frozen=True)
class BohrLift:
    """F(z) = sum a_n z(n) with z(n) = prod z_j^{kappa_j(n)} over the first
    d = pi(N) primes."""

    source: DirichletPolynomial
    dimension: int
    monomials: Tuple[Tuple[Tuple[int, ...], float], ...]

    def degree(self) -> int:
        """Max total degree over the support; equals max Omega(n)."""
        return max((sum(kappa) for kappa, _ in self.monomials), default=0)

    def coefficient_sum(self) -> float:
        return math.fsum(abs(c) for _, c in self.monomials)


def bohr_lift(f: DirichletPolynomial) -> BohrLift:
    """Lift each n <= N to its prime-exponent vector over the primes <= N."""
    primes = arith.primes_up_to(f.length)
    index = {p: i for i, p in enumerate(primes)}
    d = len(primes)
    monomials = []
    for n in sorted(f.coeffs):
        c = f.coefficient_value(n)
        if c == 0:
            continue
        kappa = [0] * d
        for p, e in arith.factorize(n).factors:
            kappa[index[p]] = e
        monomials.append((tuple(kappa), c))
    return BohrLift(f, d, tuple(monomials))


def evaluate(F: BohrLift, theta: Sequence[float]) -> mp.mpc:
    """F at the torus point (e^{i theta_1}, ..., e^{i theta_d})."""
    if len(theta) != F.dimension:
        raise ValueError(f"theta has length {len(theta)}, lift has dimension {F.dimension}")
    with mp.workprec(96):
        total = mp.mpc(0)
        for kappa, c in F.monomials:
            phase = mp.fsum(k * mp.mpf(t) for k, t in zip(kappa, theta) if k)
            total += c * mp.exp(mp.mpc(0, phase))
        return total


def _lift_arrays(F: BohrLift) -> Tuple[np.ndarray, np.ndarray]:
    K = np.array([kappa for kappa, _ in F.monomials], dtype=np.float64)
    a = np.array([c for _, c in F.monomials], dtype=np.float64)
    return K, a


@dataclass
class ConcentrationReport:
    lam: float
    sup_norm: float
    empirical_measure: float
    bound: float
    samples: int
    seed: int
    std_error: float
    bound_satisfied: bool

    def to_json_dict(self) -> dict:
        return {
            "lambda": repr(self.lam),
            "sup_norm": repr(self.sup_norm),
            "empirical_measure": repr(self.empirical_measure),
            "bound": repr(self.bound),
            "samples": self.samples,
            "seed": self.seed,
            "std_error": repr(self.std_error),
            "bound_satisfied": self.bound_satisfied,
        }


def empirical_concentration(F: BohrLift, lam: float, samples: int = 10**6,
                            seed: int = 0, workers: int = 1) -> ConcentrationReport:
    """Measure of {|F| >= lam * sup |F|} by uniform sampling of T^d.

    Needs nonnegative coefficients so that sup |F| = sum a_n exactly. The
    reference bound is ((1-lam)/pi^2)^d e^{-sqrt(N)}; the report records
    whether the empirical measure (plus 4 binomial standard errors)
    dominates it.
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    if not F.monomials:
        raise ValueError("zero polynomial has no concentration set")
    if any(c < 0 for _, c in F.monomials):
        raise ValueError("concentration sampling needs nonnegative coefficients")
    K, a = _lift_arrays(F)
    sup = float(a.sum())
    threshold = lam * sup
    d = F.dimension

    def kernel(rng: np.random.Generator, n: int):
        theta = rng.random((n, d)) * (2.0 * math.pi)
        vals = np.exp(1j * (theta @ K.T)) @ a
        hits = int((np.abs(vals) >= threshold).sum())
        return (hits, n)

    partials = run_chunked(seed, samples, workers, kernel)
    hits = sum(p[0] for p in partials)
    n = sum(p[1] for p in partials)
    p_hat = hits / n
    se = math.sqrt(max(p_hat * (1 - p_hat), 0.0) / n)
    N = F.source.length
    bound = ((1.0 - lam) / math.pi**2) ** arith.prime_count(N) * math.exp(-math.sqrt(N))
    return ConcentrationReport(lam, sup, p_hat, bound, samples, seed, se,
                               bound <= p_hat + 4 * se)


def _wrap_distance(a: float, b: float) -> float:
    d = abs(a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def bernstein_modulus_bound(F: BohrLift, theta: Sequence[float],
                            vartheta: Sequence[float]) -> Tuple[float, float]:
    """Multivariate Bernstein modulus bound and the actual difference.

    Returns ((pi/2) * degree * sup-surrogate * max_j dist(theta_j, vartheta_j),
    |F(theta) - F(vartheta)|). The surrogate sum |a_n| >= sup |F| keeps the
    bound valid for signed coefficients; distances are wrap-around on R/2pi.
    """
    if len(theta) != F.dimension or len(vartheta) != F.dimension:
        raise ValueError("point dimension mismatch")
    deg = F.degree()
    sup = F.coefficient_sum()
    gap = max((_wrap_distance(a, b) for a, b in zip(theta, vartheta)), default=0.0)
    bound = (math.pi / 2.0) * deg * sup * gap
    K, a = _lift_arrays(F)
    th = np.asarray(theta, dtype=np.float64)
    vt = np.asarray(vartheta, dtype=np.float64)
    diff = abs(complex(np.exp(1j * (K @ th)) @ a) - complex(np.exp(1j * (K @ vt)) @ a))
    return bound, float(diff)


@dataclass
class KhintchineResult:
    exact_norm: float
    bound: float
    exact_norm_power: Optional[Fraction]
    bound_power: Optional[Fraction]
    holds: bool


def khintchine_bound(N: int, k: int, coefficients: Mapping[int, object]) -> KhintchineResult:
    """Khintchine comparison for prime-supported polynomials, q = 2k:

        ||sum_p a_p z(p)||_{2k} <= Gamma(1+k)^{1/2k} (sum |a_p|^2)^{1/2}.

    The left norm is combinatorial: its 2k-th power equals
    sum over multisets m with |m| = k of (k!/prod m_j!)^2 prod |a_j|^{2 m_j}.
    With rational inputs both 2k-th powers are compared exactly.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    primes = set(arith.primes_up_to(N))
    for p in coefficients:
        if p not in primes:
            raise ValueError(f"support must be primes <= N; got {p}")
    coeffs = {p: as_fraction(c) for p, c in coefficients.items()}
    sq = {p: c * c for p, c in coeffs.items()}
    support = sorted(sq)
    d = len(support)
    kfact = math.factorial(k)
    norm_power = Fraction(0)
    for combo in combinations_with_replacement(range(d), k):
        mult: Dict[int, int] = {}
        for i in combo:
            mult[i] = mult.get(i, 0) + 1
        coef = kfact
        for m in mult.values():
            coef //= math.factorial(m)
        term = Fraction(coef * coef)
        for i, m in mult.items():
            term *= sq[support[i]] ** m
        norm_power += term
    bound_power = Fraction(kfact) * sum(sq.values(), Fraction(0)) ** k
    holds = norm_power <= bound_power
    return KhintchineResult(
        float(norm_power) ** (1.0 / (2 * k)),
        float(bound_power) ** (1.0 / (2 * k)),
        norm_power,
        bound_power,
        holds,
    )


def smooth_projection(F: BohrLift, y: int) -> BohrLift:
    """Drop every monomial with a prime factor above y (the projection that
    averages out the corresponding torus variables; an L^q contraction)."""
    if y < 2:
        raise ValueError("y must be >= 2")
    primes = arith.primes_up_to(F.source.length)
    keep_idx = [i for i, p in enumerate(primes) if p <= y]
    keep_set = set(keep_idx)
    kept_monomials = []
    kept_coeffs = {}
    members = set(arith.smooth_set(F.source.length, y).members)
    for kappa, c in F.monomials:
        if all(k == 0 or i in keep_set for i, k in enumerate(kappa)):
            kept_monomials.append((kappa, c))
    for n, c in F.source.coeffs.items():
        if n in members:
            kept_coeffs[n] = c
    projected = DirichletPolynomial(F.source.length, kept_coeffs,
                                    F.source.zeta_scaled)
    return BohrLift(projected, F.dimension, tuple(kept_monomials))


@dataclass
class NormComparison:
    sup_norm: float
    l2k: float
    psi: int
    psi_is_estimate: bool
    factor: float
    holds: bool


def normcomp_threshold(N: int, k: int, psi_cap: int = 10**8) -> NormComparison:
    """Cauchy-Schwarz comparison for the zeta partial sum f_N:

        ||f||_inf <= Psi(N^k, N)^{1/2k} ||f||_{2k},

    since f^k has at most Psi(N^k, N) nonzero terms. Psi is enumerated
    exactly up to psi_cap; beyond that the product-formula upper bound is
    used (flagged), which keeps the inequality valid.
    """
    f = DirichletPolynomial.zeta_partial_sum(N)
    sup = float(sup_norm_nonneg(f))
    norm = l2k_norm(f, k)
    l2k_val = float(norm.value_float) ** (1.0 / (2 * k))
    try:
        psi = arith.psi_smooth_count(N**k, N, cap=psi_cap)
        est = False
    except BudgetExceededError:
        psi = arith.psi_upper_estimate(N**k, N)
        est = True
    factor = psi ** (1.0 / (2 * k))
    return NormComparison(sup, l2k_val, psi, est, factor, sup <= factor * l2k_val)


@dataclass
class SmoothSumComparison:
    sum_value: float
    dickman_prediction: float
    ratio: float
    smoothness_y: int
    count: int


def smooth_sum_lower(N: int, eps: float) -> SmoothSumComparison:
    """sum over S(N, ceil(N^eps)) of n^{-1/2} against 2 rho(1/eps) sqrt(N).

    The prediction is the leading term only; at desk scale the positive
    1/log y correction is substantial (roughly +40% at N = 10^6, eps = 1/2).
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    y = max(math.ceil(N**eps), 2)
    members = arith.smooth_set(N, y).members
    total = math.fsum(1.0 / math.sqrt(n) for n in members)
    pred = 2.0 * arith.dickman_rho(1.0 / eps) * math.sqrt(N)
    return SmoothSumComparison(total, pred, total / pred, y, len(members))

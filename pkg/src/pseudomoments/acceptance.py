"""Acceptance suite: one callable per criterion, shared by the CLI verify
command and the pytest acceptance tests.

Each criterion is self-contained, computes its own oracle where one is
required, and reports a one-line pass/fail with the measured numbers.
Criteria 3 and 12 encode stated expectations that the measured mathematics
does not satisfy at these desk-scale parameters (approach to the k=2 limit
constant is from above, and the smooth-sum prediction carries a large
1/log y correction); they are kept faithful to their stated tolerances and
are expected to fail. See the README for the measured values.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional

import mpmath as mp
import numpy as np

from . import arith, bounds, euler, moments, polytope, torus

DEFAULT_SEED = 20250809


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.elapsed:.1f}s)"


def _brute_force_twisted_moment(N: int, k: int, rho2: Fraction) -> Fraction:
    """Direct sum over all 2k-tuples with matching half products (oracle)."""
    total = Fraction(0)
    p, q = rho2.numerator, rho2.denominator
    if k == 1:
        for a in range(1, N + 1):
            e = arith.big_omega(a)
            total += Fraction(p**e, q**e * a)
        return total
    assert k == 2
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            m = a * b
            for c in range(1, N + 1):
                if m % c:
                    continue
                d = m // c
                if d > N:
                    continue
                e = arith.big_omega(m)  # Omega(abcd)/2 = Omega(m)
                total += Fraction(p**e, q**e * m)
    return total


def c01_exact_moment_oracle(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    rhos = [Fraction(0), Fraction(1, 4), Fraction(1), Fraction(25, 16)]
    checked = 0
    for N in range(1, 13):
        for k in (1, 2):
            for r2 in rhos:
                got = moments.pseudomoment(N, k, r2).value_exact
                want = _brute_force_twisted_moment(N, k, r2)
                if got != want:
                    return CriterionResult(
                        1, "exact moment oracle", False,
                        f"mismatch at N={N} k={k} rho2={r2}: {got} != {want}",
                        time.perf_counter() - t0)
                checked += 1
    return CriterionResult(1, "exact moment oracle", True,
                           f"{checked} exact equalities", time.perf_counter() - t0)


def c02_m1_asymptotic(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    N = 10**6
    value = float(np.reciprocal(np.arange(1, N + 1, dtype=np.float64)).sum())
    ratio = value / math.log(N)
    ok = 1.0 <= ratio <= 1.15
    return CriterionResult(2, "M_1 ~ log N", ok,
                           f"M_1(1e6)/log(1e6) = {ratio:.5f} in [1.0, 1.15]",
                           time.perf_counter() - t0)


def c03_conrey_gamburd_constant(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    target = 1.0 / math.pi**2
    ratios = []
    for N in (100, 1000, 10000):
        r = float(moments.pseudomoment(N, 2, 1).value_float) / math.log(N) ** 4
        ratios.append(r)
    increasing = ratios[0] < ratios[1] < ratios[2] <= target
    in_bracket = 0.04 <= ratios[2] <= target
    ok = increasing and in_bracket
    return CriterionResult(
        3, "k=2 limit constant", ok,
        f"ratios {ratios[0]:.4f}, {ratios[1]:.4f}, {ratios[2]:.4f} "
        f"(limit 1/pi^2 = {target:.4f}; approach is from above)",
        time.perf_counter() - t0)


def c04_arithmetic_factor(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    one = euler.arithmetic_factor(1, 1, 128, 10**4)
    if one.value != 1 or one.tail_bound != 0:
        return CriterionResult(4, "a(k,rho) certified", False,
                               "a(1,1) != 1 exactly", time.perf_counter() - t0)
    a2 = euler.arithmetic_factor(2, 1, 128, 10**5)
    with mp.workprec(160):
        oracle = 6 / mp.pi**2  # the k=2 Dirichlet series collapses to 1/zeta(2)
        rel = abs(a2.value - oracle) / oracle
    tail_ok = float(a2.tail_bound) <= 1e-20
    digits_ok = rel < mp.mpf("1e-10")
    return CriterionResult(
        4, "a(k,rho) certified", tail_ok and digits_ok,
        f"a(2,1) tail={float(a2.tail_bound):.2e} (<=1e-20), "
        f"rel err vs 1/zeta(2) = {float(rel):.2e} (<=1e-10)",
        time.perf_counter() - t0)


def c05_gamma_k1_closed_form(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    samples = 10**5 if quick else 10**6
    details = []
    ok = True
    for r2 in (Fraction(1, 2), Fraction(1), Fraction(3, 2)):
        est = polytope.gamma_factor_mc(1, r2, samples, seed)
        exact = polytope.gamma_factor_exact_k1(r2)
        dev = abs(est.mean - exact) / est.std_error if est.std_error else 0.0
        ok &= dev <= 4.0
        details.append(f"rho2={r2}: {dev:.2f} se")
    exact_third = polytope.gamma_factor_exact_k1(1)
    ok &= abs(exact_third - 1.0 / 3.0) < 1e-14
    return CriterionResult(5, "gamma(1,rho) closed form vs MC", ok,
                           "; ".join(details) + f"; gamma(1,1)={exact_third:.12f}",
                           time.perf_counter() - t0)


def c06_k2_constant_product(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    """a(2,1) * Vol(P_2) = 1/pi^2: the k=2 limit constant splits into the
    Euler product times the plain polytope volume (the volume, not the
    smoothed-moment integrand constant, is what enters the unsmoothed limit).
    """
    t0 = time.perf_counter()
    samples = 5 * 10**5 if quick else 10**7
    vol = polytope.volume_mc(2, 1, samples, seed)
    a2 = euler.arithmetic_factor(2, 1, 96, 10**4)
    a2f = float(a2.value)
    product = a2f * vol.mean
    target = 1.0 / math.pi**2
    dev = abs(product - target) / (a2f * vol.std_error)
    ok = dev <= 3.0
    return CriterionResult(
        6, "a(2,1)*gamma(2) = 1/pi^2", ok,
        f"product={product:.6f} target={target:.6f} ({dev:.2f} MC se; "
        f"Vol(P_2)={vol.mean:.6f}, exact 1/6)",
        time.perf_counter() - t0)


def c07_sandwich_validity(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    Ns = (20, 50) if quick else (20, 50, 100)
    ks = (Fraction(2), Fraction(5, 2), Fraction(3))
    details = []
    ok = True
    for N in Ns:
        for k in ks:
            cert = bounds.sandwich(N, k, 96)
            if not cert.lower <= cert.upper:
                ok = False
                details.append(f"(N={N},k={k}): lower > upper")
                continue
            if k.denominator == 1:
                exact = moments.pseudomoment(N, int(k), 1).value_exact
                inside = (cert.lower_exact == exact
                          and mp.mpf(exact.numerator) / exact.denominator <= cert.upper)
                if not inside:
                    ok = False
                    details.append(f"(N={N},k={k}): exact moment outside")
    msg = "all certificates valid" if ok else "; ".join(details)
    return CriterionResult(7, "Weissler/Rankin sandwich", ok,
                           f"{msg} over N in {Ns}, k in (2, 5/2, 3)",
                           time.perf_counter() - t0)


def c08_volume_sandwich_brackets(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    cells = {
        (2, Fraction(1)): 4 * 10**6,
        (2, Fraction(3, 2)): 10**7,
        (3, Fraction(1)): 4 * 10**7,
        (3, Fraction(3, 2)): 8 * 10**7,
    }
    if quick:
        cells = {c: max(n // 20, 10**5) for c, n in cells.items()}
    ok = True
    details = []
    for (k, r2), n in cells.items():
        est = polytope.gamma_factor_mc(k, r2, n, seed)
        lo, hi = polytope.volume_sandwich(k, r2)
        lo3, hi3 = est.mean - 3 * est.std_error, est.mean + 3 * est.std_error
        cell_ok = lo <= lo3 and hi3 <= hi
        ok &= cell_ok
        details.append(f"(k={k},rho2={r2}): {'ok' if cell_ok else 'OUT'}")
    return CriterionResult(8, "closed-form bracket of gamma MC", ok,
                           "; ".join(details), time.perf_counter() - t0)


def c09_concentration(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    samples = 10**5 if quick else 10**6
    F = torus.bohr_lift(moments.DirichletPolynomial.zeta_partial_sum(5))
    rep = torus.empirical_concentration(F, 0.5, samples, seed)
    ok = rep.bound <= rep.empirical_measure + 4 * rep.std_error
    return CriterionResult(
        9, "concentration lower bound", ok,
        f"empirical={rep.empirical_measure:.5f} + 4se vs bound={rep.bound:.3e}",
        time.perf_counter() - t0)


def c10_khintchine(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    primes = arith.primes_up_to(30)
    failures = 0
    trials = 0
    vectors = 20 if quick else 100
    for _ in range(vectors):
        support = [p for p in primes if rng.random() < 0.7] or [2]
        coeffs = {p: Fraction(int(rng.integers(0, 50)), int(rng.integers(1, 12)))
                  for p in support}
        for k in range(1, 6):
            res = torus.khintchine_bound(30, k, coeffs)
            trials += 1
            if res.exact_norm_power > res.bound_power:
                failures += 1
    return CriterionResult(10, "Khintchine upper bound", failures == 0,
                           f"{trials} exact comparisons, {failures} failures",
                           time.perf_counter() - t0)


def c11_normcomp_chain(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    details = []
    ok = True
    for N in (4, 10):
        for k in (2, 3):
            res = torus.normcomp_threshold(N, k)
            ok &= res.holds and not res.psi_is_estimate
            details.append(f"(N={N},k={k}): Psi={res.psi} slack="
                           f"{res.factor * res.l2k / res.sup_norm:.3f}")
    return CriterionResult(11, "sup norm vs Psi-weighted L^2k", ok,
                           "; ".join(details), time.perf_counter() - t0)


def c12_dickman_prediction(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    res = torus.smooth_sum_lower(10**6, 0.5)
    ok = abs(res.ratio - 1.0) <= 0.2
    return CriterionResult(
        12, "smooth-sum Dickman prediction", ok,
        f"sum={res.sum_value:.2f} vs 2 rho(2) sqrt(N)={res.dickman_prediction:.2f} "
        f"(ratio {res.ratio:.4f}, tolerance 20%)",
        time.perf_counter() - t0)


def c13_determinism(seed: int = DEFAULT_SEED, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    samples = 3 * (1 << 16) + 123
    runs = []
    for workers in (1, 4):
        g = polytope.gamma_factor_mc(2, 1, samples, seed, workers)
        v = polytope.volume_mc(3, Fraction(3, 2), samples, seed, workers)
        F = torus.bohr_lift(moments.DirichletPolynomial.zeta_partial_sum(7))
        c = torus.empirical_concentration(F, 0.5, samples, seed, workers)
        runs.append(json.dumps(
            [g.to_json_dict(), v.to_json_dict(), c.to_json_dict()], sort_keys=True))
    ok = runs[0] == runs[1]
    return CriterionResult(13, "worker-count determinism", ok,
                           "identical JSON payloads for workers 1 and 4"
                           if ok else "payload mismatch",
                           time.perf_counter() - t0)


CRITERIA: List[Callable[..., CriterionResult]] = [
    c01_exact_moment_oracle,
    c02_m1_asymptotic,
    c03_conrey_gamburd_constant,
    c04_arithmetic_factor,
    c05_gamma_k1_closed_form,
    c06_k2_constant_product,
    c07_sandwich_validity,
    c08_volume_sandwich_brackets,
    c09_concentration,
    c10_khintchine,
    c11_normcomp_chain,
    c12_dickman_prediction,
    c13_determinism,
]

# Criteria whose stated tolerances the measured mathematics does not meet at
# these parameters (see module docstring): kept faithful, expected red.
KNOWN_UNATTAINABLE = {3, 12}


def run_all(quick: bool = False, seed: int = DEFAULT_SEED,
            emit: Optional[Callable[[str], None]] = print) -> List[CriterionResult]:
    results = []
    for fn in CRITERIA:
        res = fn(seed=seed, quick=quick)
        results.append(res)
        if emit:
            emit(res.line())
    return results

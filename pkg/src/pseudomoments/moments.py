"""Pseudomoments of zeta partial sums and norms of Dirichlet polynomials.

The 2k-th moment of sum_{n<=N} a_n n^{-it} over the vertical flow equals the
diagonal sum over n_1...n_k = n_{k+1}...n_{2k}, so everything here reduces to
restricted multiplicative convolutions c = w^{*k} on [1, N^k] followed by a
weighted sum of |c_m|^2. Three engines cover the practical regimes:

* exact integer/rational tables (numpy int64 convolution + big-rational
  reduction of sum c_m^2 rho^{2 Omega(m)} / m), used whenever N^k fits the
  dense budget;
* streamed float64 convolution for large N^k (the table is never
  materialized; blocks of the output range are processed in order);
* an mpf object-array path for smoothed weights at precision above 53 bits.

For the pure power weight rho^{Omega(n)} the convolution collapses:
complete additivity of Omega gives c_m = rho^{Omega(m)} d_{k,N}(m), so the
exact path convolves integers only and applies the twist once per output.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import mpmath as mp
import numpy as np

from . import arith
from .errors import BudgetExceededError

try:
    from gmpy2 import mpq as _mpq

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpq = Fraction
    _HAVE_GMPY2 = False

DENSE_BUDGET = 1 << 26
STREAM_BUDGET = 1 << 30
MPF_BUDGET = 1 << 20
EXACT_SUPPORT_BUDGET = 1 << 26
_STREAM_BLOCK = 1 << 24

Rational = Union[int, Fraction]
Coefficient = Union[int, Fraction, float]


def as_fraction(x) -> Fraction:
    """Accept int, Fraction, or string forms like '3/4' and '0.75'."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class DirichletPolynomial:
    """Finite coefficient sequence (a_n)_{n <= length}.

    Coefficients are stored sparsely. When zeta_scaled is set the true
    coefficient is coeffs[n] / sqrt(n); products of 2k such coefficients on
    a diagonal term square to exact rationals, which keeps the moment
    computations exact for the zeta partial sum itself.
    """

    length: int
    coeffs: Mapping[int, Coefficient]
    zeta_scaled: bool = False

    def __post_init__(self):
        for n in self.coeffs:
            if not (1 <= n <= self.length):
                raise ValueError(f"coefficient index {n} outside 1..{self.length}")

    @classmethod
    def zeta_partial_sum(cls, N: int) -> "DirichletPolynomial":
        """S_N zeta(1/2 + it): a_n = n^{-1/2}, stored as (1, sqrt-denominator n)."""
        if N < 1:
            raise ValueError("N must be positive")
        return cls(N, {n: Fraction(1) for n in range(1, N + 1)}, zeta_scaled=True)

    @classmethod
    def from_coefficients(cls, coeffs: Mapping[int, Coefficient], N: Optional[int] = None):
        if not coeffs and N is None:
            raise ValueError("empty polynomial needs an explicit length")
        length = N if N is not None else max(coeffs)
        return cls(length, dict(coeffs))

    def coefficient_value(self, n: int) -> float:
        c = self.coeffs.get(n, 0)
        if self.zeta_scaled:
            return float(c) / math.sqrt(n)
        return float(c)

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs.values())

    def nonnegative(self) -> bool:
        return all(
            not isinstance(c, complex) and c >= 0 for c in self.coeffs.values()
        )


@dataclass
class MomentResult:
    N: int
    k: int
    rho_squared: Optional[Fraction]
    smoothed: bool
    value_exact: Optional[Fraction]
    value_float: mp.mpf
    precision_bits: int
    elapsed: float

    def to_json_dict(self) -> dict:
        dps = max(int(self.precision_bits * 0.30103), 15)
        return {
            "N": self.N,
            "k": self.k,
            "rho_squared": None
            if self.rho_squared is None
            else f"{self.rho_squared.numerator}/{self.rho_squared.denominator}",
            "smoothed": self.smoothed,
            "value_exact": None
            if self.value_exact is None
            else f"{self.value_exact.numerator}/{self.value_exact.denominator}",
            "value_float": mp.nstr(self.value_float, dps),
            "precision_bits": self.precision_bits,
        }


@dataclass
class ConvolutionTable:
    """Restricted k-fold convolution c_m = sum_{n_1...n_k = m, n_j <= N} prod w(n_j)."""

    k: int
    N: int
    support_bound: int
    dense: Optional[np.ndarray] = None  # index m, 0..support_bound
    sparse: Optional[Dict[int, object]] = None

    def get(self, m: int):
        if self.dense is not None:
            return self.dense[m] if 0 <= m <= self.support_bound else 0
        return self.sparse.get(m, 0)

    def items(self):
        if self.dense is not None:
            sup = np.nonzero(self.dense)[0]
            for m in sup:
                yield int(m), self.dense[m]
        else:
            yield from sorted(self.sparse.items())

    def total_mass(self):
        if self.dense is not None:
            return self.dense.sum()
        return sum(self.sparse.values())


def _dense_numeric_table(weights: np.ndarray, N: int, k: int, top: int) -> np.ndarray:
    """k-fold restricted convolution as a dense array (int64 or float64)."""
    cur = weights[: N + 1].copy()
    for _ in range(2, k + 1):
        new = np.zeros(top + 1, dtype=cur.dtype)
        prev_top = len(cur) - 1
        for n in range(1, N + 1):
            if weights[n] == 0:
                continue
            jhi = min(top // n, prev_top)
            if jhi < 1:
                continue
            new[n : jhi * n + 1 : n] += weights[n] * cur[1 : jhi + 1]
        cur = new
    if len(cur) < top + 1:
        out = np.zeros(top + 1, dtype=cur.dtype)
        out[: len(cur)] = cur
        cur = out
    return cur


def _sparse_exact_table(weight_map: Dict[int, object], N: int, k: int, top: int,
                        budget: int) -> Dict[int, object]:
    cur = {1: _one_like(weight_map)}
    for _ in range(k):
        new: Dict[int, object] = {}
        for m, c in cur.items():
            for n, wn in weight_map.items():
                mn = m * n
                if mn > top:
                    continue
                new[mn] = new.get(mn, 0) + c * wn
        if len(new) > budget:
            raise BudgetExceededError(len(new), budget, "sparse exact convolution")
        cur = new
    return cur


def _one_like(weight_map: Dict[int, object]):
    for v in weight_map.values():
        if isinstance(v, Fraction):
            return Fraction(1)
        break
    return 1


def _tree_sum(values: list):
    """Pairwise reduction; keeps big-rational denominators near their lcm."""
    if not values:
        return Fraction(0)
    vals = list(values)
    n = len(vals)
    while n > 1:
        half = (n + 1) // 2
        for i in range(n // 2):
            vals[i] = vals[2 * i] + vals[2 * i + 1]
        if n % 2:
            vals[n // 2] = vals[n - 1]
        n = half
        del vals[n:]
    return vals[0]


def _to_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    return Fraction(int(q.numerator), int(q.denominator))


def _exact_twisted_square_sum(table: np.ndarray, rho2: Fraction) -> Fraction:
    """sum_m table[m]^2 * rho2^{Omega(m)} / m, exactly."""
    support = np.nonzero(table)[0]
    if len(support) == 0:
        return Fraction(0)
    need_omega = rho2 != 1
    om = arith.omega_table(int(support[-1])) if need_omega else None
    p, q = rho2.numerator, rho2.denominator
    terms = []
    for m in support:
        m_i = int(m)
        c2 = int(table[m_i]) ** 2
        if need_omega:
            e = int(om[m_i])
            terms.append(_mpq(c2 * p**e, m_i * q**e))
        else:
            terms.append(_mpq(c2, m_i))
    return _to_fraction(_tree_sum(terms))


def _stream_square_sum(weights: np.ndarray, N: int, k: int, top: int,
                       divide_by_m: bool = True) -> float:
    """sum_m c_m^2 (/m) with the final convolution stage streamed in blocks."""
    if k == 1:
        m = np.arange(1, N + 1, dtype=np.float64)
        w = weights[1 : N + 1].astype(np.float64)
        return float((w * w / m).sum()) if divide_by_m else float((w * w).sum())
    prev_top = N ** (k - 1)
    if prev_top > DENSE_BUDGET:
        raise BudgetExceededError(prev_top, DENSE_BUDGET, "penultimate convolution stage")
    cur = _dense_numeric_table(weights.astype(np.float64), N, k - 1, prev_top)
    block_sums = []
    for lo in range(1, top + 1, _STREAM_BLOCK):
        hi = min(lo + _STREAM_BLOCK, top + 1)
        buf = np.zeros(hi - lo)
        for n in range(1, N + 1):
            wn = weights[n]
            if wn == 0:
                continue
            jlo = (lo + n - 1) // n
            jhi = min((hi - 1) // n, prev_top)
            if jlo > jhi:
                continue
            buf[jlo * n - lo : jhi * n - lo + 1 : n] += wn * cur[jlo : jhi + 1]
        if divide_by_m:
            m = np.arange(lo, hi, dtype=np.float64)
            block_sums.append(float((buf * buf / m).sum()))
        else:
            block_sums.append(float((buf * buf).sum()))
    return math.fsum(block_sums)


def restricted_divisor_table(
    N: int,
    k: int,
    weight: Optional[Callable[[int], Coefficient]] = None,
    budget: int = DENSE_BUDGET,
) -> ConvolutionTable:
    """Materialized weighted restricted-divisor table on [1, N^k].

    With weight identically 1 this is the table of d_{k,N}(m) and its total
    mass is N^k. Integer and float weights go to dense numpy storage;
    Fraction weights to an exact sparse map.
    """
    if N < 1 or k < 1:
        raise ValueError("need N >= 1 and k >= 1")
    top = N**k
    if top > budget:
        raise BudgetExceededError(top, budget)
    values = [weight(n) if weight else 1 for n in range(1, N + 1)]
    if all(isinstance(v, int) for v in values):
        w = np.zeros(N + 1, dtype=np.int64)
        w[1:] = values
        return ConvolutionTable(k, N, top, dense=_dense_numeric_table(w, N, k, top))
    if any(isinstance(v, Fraction) for v in values):
        wmap = {n: as_fraction(v) for n, v in enumerate(values, start=1) if v != 0}
        sparse = _sparse_exact_table(wmap, N, k, top, budget)
        return ConvolutionTable(k, N, top, sparse=sparse)
    w = np.zeros(N + 1, dtype=np.float64)
    w[1:] = [float(v) for v in values]
    return ConvolutionTable(k, N, top, dense=_dense_numeric_table(w, N, k, top))


def _power_weight_floats(N: int, rho2: Fraction) -> np.ndarray:
    """w(n) = rho^{Omega(n)} as float64, rho = sqrt(rho2)."""
    w = np.zeros(N + 1)
    om = arith.omega_table(N)[: N + 1].astype(np.float64)
    w[1:] = float(rho2) ** (om[1:] / 2.0)
    return w


def pseudomoment(
    N: int,
    k: int,
    rho_squared: Rational = 1,
    precision_bits: int = 128,
    want_exact: Optional[bool] = None,
) -> MomentResult:
    """Twisted pseudomoment: sum over n_1...n_k = n_{k+1}...n_{2k}, n_j <= N,
    of rho^{Omega(n_1) + ... + Omega(n_{2k})} / sqrt(n_1...n_{2k}).

    Equals sum_m c_m^2/m for c_m = rho^{Omega(m)} d_{k,N}(m); exact rational
    whenever rho^2 is rational and the table fits the dense budget.
    """
    if N < 1 or k < 1:
        raise ValueError("need N >= 1 and k >= 1")
    rho2 = as_fraction(rho_squared)
    if rho2 < 0:
        raise ValueError("rho^2 must be nonnegative")
    t0 = time.perf_counter()
    if rho2 == 0:
        # only n_j = 1 contributes
        return MomentResult(N, k, rho2, False, Fraction(1), mp.mpf(1),
                            precision_bits, time.perf_counter() - t0)
    top = N**k
    if top <= DENSE_BUDGET:
        w = np.zeros(N + 1, dtype=np.int64)
        w[1:] = 1
        table = _dense_numeric_table(w, N, k, top)
        exact = None
        if want_exact is not False:
            support = int(np.count_nonzero(table))
            if support <= EXACT_SUPPORT_BUDGET:
                exact = _exact_twisted_square_sum(table, rho2)
        if exact is not None:
            with mp.workprec(precision_bits + 16):
                vf = mp.mpf(exact.numerator) / exact.denominator
            return MomentResult(N, k, rho2, False, exact, vf,
                                precision_bits, time.perf_counter() - t0)
        wf = _power_weight_floats(N, rho2)
        val = _stream_square_sum(wf, N, k, top)
        return MomentResult(N, k, rho2, False, None, mp.mpf(val), 53,
                            time.perf_counter() - t0)
    if top > STREAM_BUDGET:
        raise BudgetExceededError(top, STREAM_BUDGET, "streamed moment range")
    if want_exact:
        raise BudgetExceededError(top, DENSE_BUDGET, "exact moment table")
    wf = _power_weight_floats(N, rho2)
    val = _stream_square_sum(wf, N, k, top)
    return MomentResult(N, k, rho2, False, None, mp.mpf(val), 53,
                        time.perf_counter() - t0)


def _smoothed_weights_mpf(N: int, rho2: Fraction, prec: int):
    om = arith.omega_table(N)
    logN = mp.log(N)
    rho = mp.sqrt(mp.mpf(rho2.numerator) / rho2.denominator)
    w = [mp.mpf(0)] * (N + 1)
    for n in range(1, N + 1):
        w[n] = rho ** int(om[n]) * (1 - mp.log(n) / logN)
    return w


def smoothed_pseudomoment(
    N: int,
    k: int,
    rho_squared: Rational = 1,
    precision_bits: int = 128,
) -> MomentResult:
    """Smoothed twisted moment: weight rho^{Omega(n)} (1 - log n / log N).

    The log weight is irrational, so there is no exact path; above 53
    requested bits an mpf object-array convolution is used (small N^k only).
    """
    if N < 2:
        raise ValueError("need N >= 2 so that log N > 0")
    if k < 1:
        raise ValueError("need k >= 1")
    rho2 = as_fraction(rho_squared)
    if rho2 < 0:
        raise ValueError("rho^2 must be nonnegative")
    t0 = time.perf_counter()
    top = N**k
    if precision_bits <= 53:
        if top > STREAM_BUDGET:
            raise BudgetExceededError(top, STREAM_BUDGET, "streamed moment range")
        om = arith.omega_table(N)[: N + 1].astype(np.float64)
        n = np.arange(1, N + 1, dtype=np.float64)
        w = np.zeros(N + 1)
        w[1:] = float(rho2) ** (om[1:] / 2.0) * (1.0 - np.log(n) / math.log(N))
        val = _stream_square_sum(w, N, k, top)
        return MomentResult(N, k, rho2, True, None, mp.mpf(val), 53,
                            time.perf_counter() - t0)
    if top > MPF_BUDGET:
        raise BudgetExceededError(top, MPF_BUDGET, "mpf smoothed convolution")
    with mp.workprec(precision_bits + 16):
        w = _smoothed_weights_mpf(N, rho2, precision_bits)
        cur = list(w)
        for _ in range(2, k + 1):
            new = [mp.mpf(0)] * (top + 1)
            prev_top = len(cur) - 1
            for n in range(1, N + 1):
                if w[n] == 0:
                    continue
                jhi = min(top // n, prev_top)
                for j in range(1, jhi + 1):
                    if cur[j]:
                        new[n * j] += w[n] * cur[j]
            cur = new
        val = mp.fsum(cur[m] ** 2 / m for m in range(1, len(cur)) if cur[m])
        val = +val
    return MomentResult(N, k, rho2, True, None, val, precision_bits,
                        time.perf_counter() - t0)


def l2k_norm(f: DirichletPolynomial, k: int, precision_bits: int = 128) -> MomentResult:
    """||f||_{2k}^{2k} by diagonal expansion: sum_m |sum_{n_1...n_k=m} prod a_{n_j}|^2.

    For a zeta-scaled polynomial the stored rational parts are convolved and
    the sqrt denominators recombine into an exact 1/m.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    t0 = time.perf_counter()
    if not f.is_exact():
        raise TypeError("l2k_norm requires exact rational coefficients")
    wmap = {n: as_fraction(c) for n, c in f.coeffs.items() if c != 0}
    if not wmap:
        return MomentResult(f.length, k, None, False, Fraction(0), mp.mpf(0),
                            precision_bits, time.perf_counter() - t0)
    top = f.length**k
    conv = _sparse_exact_table(wmap, f.length, k, top, EXACT_SUPPORT_BUDGET)
    if f.zeta_scaled:
        terms = [_mpq(c.numerator**2, c.denominator**2 * m) for m, c in conv.items()]
    else:
        terms = [_mpq(c.numerator**2, c.denominator**2) for m, c in conv.items()]
    exact = _to_fraction(_tree_sum(terms))
    with mp.workprec(precision_bits + 16):
        vf = mp.mpf(exact.numerator) / exact.denominator
    return MomentResult(f.length, k, None, False, exact, vf, precision_bits,
                        time.perf_counter() - t0)


def sup_norm_nonneg(f: DirichletPolynomial, precision_bits: int = 128) -> mp.mpf:
    """Sup of |f| over the vertical flow for nonnegative coefficients: sum a_n.

    The supremum is attained where every character equals 1 (all torus
    coordinates at 1 under the Bohr lift), so it is just the coefficient sum.
    """
    if not f.nonnegative():
        raise ValueError("sup norm by coefficient sum needs nonnegative coefficients")
    with mp.workprec(precision_bits + 16):
        if f.zeta_scaled:
            total = mp.fsum(
                mp.mpf(as_fraction(c).numerator) / as_fraction(c).denominator / mp.sqrt(n)
                for n, c in f.coeffs.items()
            )
        else:
            total = mp.fsum(mp.mpf(float(c)) if isinstance(c, float)
                            else mp.mpf(as_fraction(c).numerator) / as_fraction(c).denominator
                            for c in f.coeffs.values())
        return +total

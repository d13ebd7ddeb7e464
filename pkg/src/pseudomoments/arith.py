"""Arithmetic substrate: primes, factorization, multiplicative functions,
smooth numbers, and Dickman's function.

Everything here is pure once the shared sieve has been built; the sieve
grows on demand (up to MAX_SIEVE_LIMIT) and is replaced atomically, so
concurrent readers always see a consistent snapshot.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BudgetExceededError

MAX_SIEVE_LIMIT = 10**7

_lock = threading.Lock()
_primes_state: tuple[int, np.ndarray] = (0, np.zeros(0, dtype=np.int64))
_spf_state: tuple[int, np.ndarray] = (0, np.zeros(0, dtype=np.int64))


def _grow_primes(limit: int) -> tuple[int, np.ndarray]:
    global _primes_state
    with _lock:
        cur_limit, cur = _primes_state
        if limit <= cur_limit:
            return _primes_state
        new_limit = max(limit, 2 * cur_limit, 1 << 12)
        sieve = np.ones(new_limit + 1, dtype=bool)
        sieve[:2] = False
        for i in range(2, math.isqrt(new_limit) + 1):
            if sieve[i]:
                sieve[i * i :: i] = False
        _primes_state = (new_limit, np.nonzero(sieve)[0].astype(np.int64))
        return _primes_state


def _primes_array(limit: int) -> np.ndarray:
    cur_limit, primes = _primes_state
    if limit > cur_limit:
        cur_limit, primes = _grow_primes(limit)
    if limit == cur_limit:
        return primes
    return primes[: np.searchsorted(primes, limit, side="right")]


def _grow_spf(limit: int) -> tuple[int, np.ndarray]:
    global _spf_state
    with _lock:
        cur_limit, cur = _spf_state
        if limit <= cur_limit:
            return _spf_state
        new_limit = min(max(limit, 2 * cur_limit, 1 << 16), MAX_SIEVE_LIMIT)
        spf = np.zeros(new_limit + 1, dtype=np.int64)
        spf[1] = 1
        for p in range(2, math.isqrt(new_limit) + 1):
            if spf[p] == 0:
                sl = spf[p * p :: p]
                sl[sl == 0] = p
                spf[p] = p
        rest = np.nonzero(spf == 0)[0]
        spf[rest] = rest  # remaining entries are primes > sqrt(new_limit)
        _spf_state = (new_limit, spf)
        return _spf_state


def primes_up_to(limit: int) -> List[int]:
    """All primes <= limit in ascending order."""
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    if limit < 2:
        return []
    return _primes_array(limit).tolist()


def prime_count(limit: int) -> int:
    """pi(limit)."""
    if limit < 2:
        return 0
    return len(_primes_array(limit))


@dataclass(frozen=True)
class FactoredInteger:
    """n together with its prime factorization, primes ascending."""

    n: int
    factors: Tuple[Tuple[int, int], ...]

    def reconstruct(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


def _factor_pairs(n: int) -> List[Tuple[int, int]]:
    spf_limit, spf = _spf_state
    if n > spf_limit and n <= MAX_SIEVE_LIMIT:
        spf_limit, spf = _grow_spf(min(max(n, 1 << 16), MAX_SIEVE_LIMIT))
    pairs: List[Tuple[int, int]] = []
    if n <= spf_limit:
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        return pairs
    for p in _primes_array(math.isqrt(n)):
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
    if n > 1:
        pairs.append((n, 1))
    pairs.sort()
    return pairs


def factorize(n: int) -> FactoredInteger:
    """Prime factorization of n >= 1; factorize(1) has an empty factor list."""
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    return FactoredInteger(n, tuple(_factor_pairs(n)))


def big_omega(n: int) -> int:
    """Omega(n): number of prime factors counted with multiplicity."""
    if n < 1:
        raise ValueError(f"big_omega requires n >= 1, got {n}")
    return sum(e for _, e in _factor_pairs(n))


def dk_prime_power(k: int, j: int) -> int:
    """d_k(p^j) = C(j+k-1, j), the k-fold divisor function at a prime power."""
    if k < 1 or j < 0:
        raise ValueError("need k >= 1 and j >= 0")
    return math.comb(j + k - 1, j)


def omega_table(limit: int) -> np.ndarray:
    """Omega(n) for all n <= limit as an int16 array (index 0 unused).

    Vectorized over power-of-two blocks: for n in [2^a, 2^(a+1)) the
    quotient n // spf(n) is < 2^a, so earlier blocks are already filled.
    """
    if limit > MAX_SIEVE_LIMIT:
        raise BudgetExceededError(limit, MAX_SIEVE_LIMIT, "omega table")
    _, spf = _grow_spf(limit)
    om = np.zeros(limit + 1, dtype=np.int16)
    a = 1
    while (1 << a) <= limit:
        lo = 1 << a
        hi = min((1 << (a + 1)) - 1, limit)
        idx = np.arange(lo, hi + 1)
        om[lo : hi + 1] = om[idx // spf[lo : hi + 1]] + 1
        a += 1
    return om


@dataclass(frozen=True)
class SmoothSet:
    """The set S(x, y) = {n <= x : p | n implies p <= y}, listed ascending."""

    bound_x: int
    smoothness_y: int
    members: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)


def _smooth_iter(x: int, primes: Sequence[int]) -> Iterator[int]:
    stack = [(0, 1)]
    while stack:
        i, prod = stack.pop()
        yield prod
        for j in range(i, len(primes)):
            nxt = prod * primes[j]
            if nxt > x:
                break
            stack.append((j, nxt))


def smooth_set(x: int, y: int) -> SmoothSet:
    """Enumerate S(x, y) by recursive generation over the prime list."""
    if x < 1:
        raise ValueError("x must be >= 1")
    if y < 2:
        raise ValueError("y must be >= 2")
    ps = primes_up_to(min(x, y))
    members = sorted(_smooth_iter(x, ps))
    return SmoothSet(x, y, tuple(members))


def psi_smooth_count(x: int, y: int, cap: int = 10**8) -> int:
    """Psi(x, y) = |S(x, y)|, counted without storing the members."""
    if x < 1:
        raise ValueError("x must be >= 1")
    if y < 2:
        raise ValueError("y must be >= 2")
    ps = primes_up_to(min(x, y))
    count = 0
    for _ in _smooth_iter(x, ps):
        count += 1
        if count > cap:
            raise BudgetExceededError(count, cap, "smooth-number enumeration")
    return count


def psi_upper_estimate(x: int, y: int) -> int:
    """Product-formula upper bound Psi(x,y) <= prod_{p<=y} (floor(log x/log p) + 1).

    Every y-smooth n <= x has exponent of p at most log x / log p.
    """
    out = 1
    lx = math.log(x)
    for p in primes_up_to(y):
        out *= int(lx / math.log(p)) + 1
    return out


class _DickmanCache:
    """Dickman's rho by numerical continuation of u rho'(u) = -rho(u-1).

    Closed forms on [0, 2]; each further unit segment [n, n+1] is integrated
    with a high-order adaptive solver against the previous segment's dense
    output, checkpointing the value at the integer endpoints.
    """

    def __init__(self) -> None:
        self._segments: dict[int, object] = {}
        self._lock = threading.Lock()

    def _segment_value(self, seg: int, t: float) -> float:
        if t <= 1.0:
            return 1.0
        if t <= 2.0:
            return 1.0 - math.log(t)
        return float(self._segments[seg].sol(t)[0])

    def _ensure(self, n: int) -> None:
        with self._lock:
            for seg in range(2, n + 1):
                if seg in self._segments:
                    continue
                if seg == 2:
                    y0 = 1.0 - math.log(2.0)
                else:
                    y0 = float(self._segments[seg - 1].sol(float(seg))[0])
                prev_seg = seg - 1

                def rhs(t, y, _s=prev_seg):
                    return [-self._segment_value(_s, t - 1.0) / t]

                sol = solve_ivp(
                    rhs,
                    (float(seg), float(seg + 1)),
                    [y0],
                    method="DOP853",
                    dense_output=True,
                    rtol=1e-12,
                    atol=1e-14,
                )
                if not sol.success:
                    raise RuntimeError(f"Dickman integration failed on [{seg}, {seg+1}]")
                self._segments[seg] = sol

    def rho(self, u: float) -> float:
        if u < 0:
            raise ValueError("u must be nonnegative")
        if u <= 1.0:
            return 1.0
        if u <= 2.0:
            return 1.0 - math.log(u)
        seg = min(int(math.floor(u)), int(u))
        if u == seg:
            seg -= 1
        self._ensure(seg)
        return float(self._segments[seg].sol(u)[0])


_dickman = _DickmanCache()


def dickman_rho(u: float) -> float:
    """rho(u): 1 on [0,1], 1 - log u on [1,2], delay-equation continuation beyond."""
    return _dickman.rho(float(u))

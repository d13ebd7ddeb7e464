"""Reproducible chunked Monte Carlo driver.

Contract shared by the polytope and torus samplers: a master seed is split
into per-chunk Philox streams (chunk i uses the key stream jumped i times),
chunks are a fixed 2^16 samples, and partial results are reduced in chunk
index order. The outcome is a pure function of (seed, total samples) and in
particular independent of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple

import numpy as np

CHUNK_SAMPLES = 1 << 16


def chunk_sizes(samples: int) -> List[int]:
    full, rem = divmod(samples, CHUNK_SAMPLES)
    out = [CHUNK_SAMPLES] * full
    if rem:
        out.append(rem)
    return out


def chunk_generator(seed: int, index: int) -> np.random.Generator:
    """Generator for chunk `index` of the stream keyed by `seed`."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def run_chunked(
    seed: int,
    samples: int,
    workers: int,
    kernel: Callable[[np.random.Generator, int], Tuple],
) -> List[Tuple]:
    """Evaluate `kernel(rng, n)` on every chunk; partials in chunk order.

    `kernel` must draw exactly from the generator it is given and return a
    tuple of per-chunk statistics. Scheduling order never affects the result
    because partials are collected positionally.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    sizes = chunk_sizes(samples)

    def job(i: int) -> Tuple:
        return kernel(chunk_generator(seed, i), sizes[i])

    if workers <= 1:
        return [job(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(len(sizes))))


def mean_and_stderr(partials: Sequence[Tuple[float, float, int]]) -> Tuple[float, float]:
    """Combine per-chunk (sum, sum-of-squares, count) triples.

    math.fsum is exactly rounded, so the reduction does not depend on how
    chunks were scheduled.
    """
    total = math.fsum(p[0] for p in partials)
    total_sq = math.fsum(p[1] for p in partials)
    n = sum(p[2] for p in partials)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)

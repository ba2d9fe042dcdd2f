"""Seeded Monte Carlo plumbing: splittable streams and mean/stderr reports.

All randomness in the package flows through Philox streams keyed by
(seed, chunk index).  Philox is counter-based, so the per-chunk streams
are independent and the estimate for a given (seed, n) is bit-identical
no matter how chunks are scheduled across workers: partial sums are
reduced in chunk order after the fact.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

DEFAULT_CHUNK = 1 << 17

THREADS_ENV = "STRICHARTZ_LAB_THREADS"


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo result: sample mean, standard error, count, seed."""

    mean: float
    stderr: float
    n: int
    seed: int

    def within(self, target: float, n_sigma: float = 3.0) -> bool:
        return abs(self.mean - target) <= n_sigma * self.stderr


def chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    """Independent stream for one chunk of one seeded run."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(chunk_index)])
    return np.random.Generator(np.random.Philox(key=key))


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def mc_mean(sample_weights, n: int, seed: int, chunk: int = DEFAULT_CHUNK) -> McEstimate:
    """Estimate E[w] where sample_weights(rng, m) returns m weights.

    The callable must be a pure function of the generator state; chunk
    results are combined in index order so thread count cannot change
    the outcome.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    sizes = []
    remaining = n
    while remaining > 0:
        m = min(chunk, remaining)
        sizes.append(m)
        remaining -= m

    def run(idx_size):
        idx, m = idx_size
        w = np.asarray(sample_weights(chunk_generator(seed, idx), m), dtype=float)
        if w.size != m:
            raise ValueError("sampler returned wrong batch size")
        return float(np.sum(w)), float(np.sum(w * w)), m

    tasks = list(enumerate(sizes))
    workers = _worker_count()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, tasks))
    else:
        partials = [run(t) for t in tasks]

    s1 = math.fsum(p[0] for p in partials)
    s2 = math.fsum(p[1] for p in partials)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    stderr = math.sqrt(var / n) if n > 1 else float("inf")
    return McEstimate(mean=mean, stderr=stderr, n=n, seed=seed)

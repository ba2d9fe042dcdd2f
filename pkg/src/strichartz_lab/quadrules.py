"""Cached Gauss-Legendre rules (node generation is O(n^2); reuse them)."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_nodes(n: int, lo: float, hi: float):
    """GL nodes/weights on [lo, hi]."""
    x, w = leggauss(n)
    return 0.5 * (hi + lo) + 0.5 * (hi - lo) * x, 0.5 * (hi - lo) * w

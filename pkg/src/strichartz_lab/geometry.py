"""Minkowski form, Lorentz boosts, Galilean maps, and interaction weights.

The change-of-variables toolbox behind the shell-convolution closed
forms: the quadratic form rho(tau, xi) = tau^2 - |xi|^2, the pure boost
T_v normalising interior cone points to (sqrt(rho), 0), the affine
frequency map preserving the paraboloid, and the two interaction
weights K(eta) whose square collapses to rho on the delta supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Below this speed the (gamma-1)/|v|^2 block is evaluated by series;
# the limit coefficient is 1/2 and the v^2 correction is 3|v|^2/8.
_SMALL_V = 1e-8


@dataclass
class ConePoint:
    """Space-time frequency point (tau, xi)."""

    tau: float
    xi: np.ndarray

    def __post_init__(self):
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        self.tau = float(self.tau)

    @property
    def d(self) -> int:
        return self.xi.size

    @property
    def interior(self) -> bool:
        """Strictly inside the forward light cone (tau > |xi|)."""
        return self.tau > float(np.linalg.norm(self.xi))


def minkowski_form(p: ConePoint) -> float:
    """rho(tau, xi) = tau^2 - |xi|^2."""
    return p.tau * p.tau - float(np.dot(p.xi, p.xi))


def boost_matrix(v) -> np.ndarray:
    """The (d+1)x(d+1) pure Lorentz boost T_v for |v| < 1.

    Row/column 0 is the tau direction:

        [ gamma       -gamma v^T              ]
        [ -gamma v    I + (gamma-1)/|v|^2 vv^T]
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    v2 = float(np.dot(v, v))
    if v2 >= 1.0:
        raise ValueError(f"boost speed |v| = {math.sqrt(v2):.6g} must be < 1")
    d = v.size
    T = np.eye(d + 1)
    if v2 == 0.0:
        return T
    gamma = 1.0 / math.sqrt(1.0 - v2)
    if math.sqrt(v2) < _SMALL_V:
        coeff = 0.5 + 0.375 * v2
    else:
        coeff = (gamma - 1.0) / v2
    T[0, 0] = gamma
    T[0, 1:] = -gamma * v
    T[1:, 0] = -gamma * v
    T[1:, 1:] += coeff * np.outer(v, v)
    return T


def lorentz_boost(v, p: ConePoint) -> ConePoint:
    """Apply T_v to a cone point."""
    T = boost_matrix(v)
    if T.shape[0] != p.d + 1:
        raise ValueError("boost velocity and point dimension mismatch")
    vec = T @ np.concatenate(([p.tau], p.xi))
    return ConePoint(vec[0], vec[1:])


def normalizing_boost(p: ConePoint) -> np.ndarray:
    """Velocity v = -xi/tau whose boost sends (sqrt(rho), 0) to (tau, xi)."""
    if not p.interior:
        raise ValueError("point must lie strictly inside the forward cone")
    return -p.xi / p.tau


def galilean_map(v, p: ConePoint) -> ConePoint:
    """(tau, xi) -> (tau + 2 xi.v + |v|^2, xi + v); preserves tau = |xi|^2."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return ConePoint(p.tau + 2.0 * float(np.dot(p.xi, v)) + float(np.dot(v, v)), p.xi + v)


def _pair_term(a, b) -> float:
    """|a||b| - a.b without cancellation.

    For nearly parallel vectors the direct difference loses all digits;
    the Lagrange identity |a|^2|b|^2 - (a.b)^2 = sum_{m<n}(a_m b_n - a_n b_m)^2
    provides a nonnegative numerator, and division by |a||b| + a.b is safe
    whenever a.b >= 0.
    """
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    dot = float(np.dot(a, b))
    if dot <= 0.0:
        return na * nb - dot
    denom = na * nb + dot
    if denom == 0.0:
        return 0.0
    cross = np.outer(a, b) - np.outer(b, a)
    gram = 0.5 * float(np.sum(cross * cross))
    return gram / denom


def wave_weight(eta) -> float:
    """K(eta) = sqrt( sum_{i<j} (|eta_i||eta_j| - eta_i . eta_j) ).

    Pairwise terms are clamped at zero from below: rounding can push the
    stable form a few ulp negative for exactly parallel frequencies.
    """
    eta = np.asarray(eta, dtype=float)
    k = eta.shape[0]
    terms = []
    for i in range(k):
        for j in range(i + 1, k):
            terms.append(max(_pair_term(eta[i], eta[j]), 0.0))
    return math.sqrt(math.fsum(terms))


def schro_weight(eta) -> float:
    """K(eta) = sqrt( sum_{i<j} |eta_i - eta_j|^2 ); |eta_1 - eta_2| at k=2."""
    eta = np.asarray(eta, dtype=float)
    k = eta.shape[0]
    terms = []
    for i in range(k):
        for j in range(i + 1, k):
            diff = eta[i] - eta[j]
            terms.append(float(np.dot(diff, diff)))
    return math.sqrt(math.fsum(terms))


def wave_weight_sq_batch(eta: np.ndarray) -> np.ndarray:
    """K^2 for a batch of frequency tuples, shape (n, k, d) -> (n,).

    Same stabilised pair evaluation as wave_weight, vectorised over the
    sample axis for the Monte Carlo integrators.
    """
    eta = np.asarray(eta, dtype=float)
    n, k, d = eta.shape
    norms = np.linalg.norm(eta, axis=2)
    total = np.zeros(n)
    for i in range(k):
        for j in range(i + 1, k):
            dot = np.einsum("nd,nd->n", eta[:, i, :], eta[:, j, :])
            prod = norms[:, i] * norms[:, j]
            # Lagrange identity numerator: sum over coordinate pairs.
            gram = np.zeros(n)
            for m in range(d):
                for q in range(m + 1, d):
                    c = eta[:, i, m] * eta[:, j, q] - eta[:, i, q] * eta[:, j, m]
                    gram += c * c
            # Direct difference is safe for dot <= 0 (no cancellation there).
            denom = np.where(dot > 0.0, prod + dot, 1.0)
            stable = np.where(dot > 0.0, gram / denom, prod - dot)
            total += np.maximum(stable, 0.0)
    return total


def schro_weight_sq_batch(eta: np.ndarray) -> np.ndarray:
    """Schrodinger K^2 for a batch, shape (n, k, d) -> (n,)."""
    eta = np.asarray(eta, dtype=float)
    n, k, _ = eta.shape
    total = np.zeros(n)
    for i in range(k):
        for j in range(i + 1, k):
            diff = eta[:, i, :] - eta[:, j, :]
            total += np.einsum("nd,nd->n", diff, diff)
    return total

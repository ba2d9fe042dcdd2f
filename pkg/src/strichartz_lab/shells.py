"""Delta-shell convolutions on the light cone and the paraboloid.

The k-fold self-convolution of the cone measure mu = |xi|^{-1} delta(tau - |xi|),

    Itilde_k(tau, xi) = int prod_j |eta_j|^{-1}
                          delta(tau - sum |eta_j|) delta(xi - sum eta_j) d eta,

is evaluated three independent ways: the closed form (Lorentz reduction
to (1,0) plus homogeneity), the one-dimensional recursion peeling off
one frequency at a time, and smoothed importance-sampled Monte Carlo on
the literal definition.  The paraboloid analogue for the Schrodinger
shell is closed-form only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .constants import (
    alpha_exponent,
    log_beta_fn,
    log_sphere_area,
    sphere_area,
)
from .geometry import ConePoint
from .mc import McEstimate, mc_mean

CLOSED_FORM = "closed_form"
RECURSION = "recursion"
MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class ShellResult:
    value: float
    method: str
    stderr: float = 0.0

    def __post_init__(self):
        if self.method == MONTE_CARLO:
            if self.stderr < 0:
                raise ValueError("monte_carlo results need stderr >= 0")
        elif self.stderr != 0.0:
            raise ValueError("deterministic methods carry stderr = 0")


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature cannot reach the requested
    tolerance; carries the best estimate."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


def _require_interior(p: ConePoint):
    if not p.interior:
        raise ValueError("shell formulas require tau > |xi|")


def _rho(p: ConePoint) -> float:
    return p.tau * p.tau - float(np.dot(p.xi, p.xi))


def log_itilde_unit(d: int, k: int) -> float:
    """log Itilde_k(1, 0).

    k = 2:  |S^{d-1}| / 2^{d-2}
    k >= 3: |S^{d-1}|^{k-1} / 2^{2 alpha(k)+1} * prod_{j=2}^{k-1} B(d-1, alpha(j)+1)
    """
    if d < 2 or k < 2:
        raise ValueError("need d >= 2 and k >= 2")
    if k == 2:
        return log_sphere_area(d) - (d - 2) * math.log(2.0)
    alpha_k = alpha_exponent(d, k)
    logv = (k - 1) * log_sphere_area(d) - (2.0 * float(alpha_k) + 1.0) * math.log(2.0)
    for j in range(2, k):
        logv += log_beta_fn(d - 1, float(alpha_exponent(d, j)) + 1.0)
    return logv


def itilde_closed(d: int, k: int, p: ConePoint) -> ShellResult:
    """Closed form Itilde_k(tau, xi) = rho^{alpha(k)} Itilde_k(1, 0)."""
    _require_interior(p)
    alpha_k = float(alpha_exponent(d, k))
    value = math.exp(log_itilde_unit(d, k) + alpha_k * math.log(_rho(p)))
    return ShellResult(value, CLOSED_FORM)


def i_weighted(d: int, k: int, p: ConePoint) -> ShellResult:
    """Weighted shell constant I_k = 2^{alpha} rho^{-alpha} Itilde_k.

    Point-independent: 2^{-(d-1)/2}|S^{d-1}| at k = 2 and
    2^{-(alpha(k)+1)}|S^{d-1}|^{k-1} prod B(d-1, alpha(j)+1) for k >= 3.
    """
    _require_interior(p)
    alpha_k = float(alpha_exponent(d, k))
    rho = _rho(p)
    itilde = itilde_closed(d, k, p).value
    value = 2.0 ** alpha_k * rho ** (-alpha_k) * itilde
    return ShellResult(value, CLOSED_FORM)


def _radial_recursion_integral(d: int, alpha: Fraction, tol: float) -> float:
    """int_0^{1/2} (1 - 2r)^{alpha} r^{d-2} dr by adaptive quadrature.

    For non-integer alpha the substitution w = (1-2r)^{1+alpha} removes
    the endpoint singularity (alpha in (-1, 0)) or derivative blow-up
    (fractional alpha > 0):

        I = 1/(2(1+alpha)) int_0^1 ((1 - w^{1/(1+alpha)})/2)^{d-2} dw.
    """
    af = float(alpha)
    if af <= -1.0:
        raise ValueError("recursion needs alpha > -1 (holds for d >= 2, k >= 3)")
    if alpha.denominator == 1:
        fn = lambda r: (1.0 - 2.0 * r) ** af * r ** (d - 2)
        lo, hi = 0.0, 0.5
        scale = 1.0
    else:
        q = 1.0 / (1.0 + af)
        fn = lambda w: ((1.0 - w ** q) / 2.0) ** (d - 2)
        lo, hi = 0.0, 1.0
        scale = 0.5 * q
    value, err = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=tol, limit=200)
    value *= scale
    err *= scale
    if value != 0.0 and err > 10.0 * tol * abs(value):
        raise QuadratureError(
            f"recursion quadrature stalled at relative error {err / abs(value):.2e}",
            best=value,
        )
    return value


def itilde_recursive(d: int, k: int, p: ConePoint, tol: float = 1e-10) -> ShellResult:
    """Evaluate Itilde_k by the peel-one-frequency recursion.

    Itilde_k(1,0) = |S^{d-1}| int_0^{1/2} (1-2r)^{alpha(k-1)} r^{d-2} dr
                    * Itilde_{k-1}(1,0),

    iterated down to the k = 2 base |S^{d-1}|/2^{d-2}; each level's
    radial integral is quadrature, never the Beta closed form.
    """
    _require_interior(p)
    if k < 2:
        raise ValueError("need k >= 2")
    log_unit = log_sphere_area(d) - (d - 2) * math.log(2.0)
    for j in range(3, k + 1):
        radial = _radial_recursion_integral(d, alpha_exponent(d, j - 1), tol)
        log_unit += log_sphere_area(d) + math.log(radial)
    alpha_k = float(alpha_exponent(d, k))
    value = math.exp(log_unit + alpha_k * math.log(_rho(p)))
    return ShellResult(value, RECURSION)


def itilde_montecarlo(
    d: int,
    k: int,
    p: ConePoint,
    epsilon: float = 1e-3,
    n_samples: int = 10**6,
    seed: int = 0,
) -> ShellResult:
    """Smoothed Monte Carlo on the literal delta-shell integral.

    eta_k is integrated out against the spatial delta, the remaining
    scalar delta is mollified by a Gaussian of width epsilon (O(eps^2)
    bias, smooth weights), and the (k-1)d free variables are importance
    sampled: directions uniform on S^{d-1}, radii from the exponential
    shell proposal q(r) ~ r^{d-2} e^{-lambda r} with rate
    lambda = k(d-1)/tau.  The polynomial factor matches the measure
    r^{d-2} dr of the integrand exactly (so it cancels from the weights)
    and the rate centers sum |eta_j| on the shell at tau.
    """
    _require_interior(p)
    if epsilon <= 0:
        raise ValueError("need a positive smoothing width")
    if n_samples < 10**4:
        raise ValueError("need n_samples >= 1e4")
    tau, xi = p.tau, np.asarray(p.xi, dtype=float)
    rate = k * (d - 1) / tau
    area = sphere_area(d)
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * epsilon)
    # Per-factor weight constant: |S^{d-1}| Gamma(d-1) / rate^{d-1}.
    log_const = (k - 1) * (
        math.log(area) + math.lgamma(d - 1) - (d - 1) * math.log(rate)
    )

    def sample_weights(rng, m):
        radii = rng.gamma(shape=d - 1, scale=1.0 / rate, size=(m, k - 1))
        dirs = rng.normal(size=(m, k - 1, d))
        dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
        eta = radii[:, :, None] * dirs
        eta_k = xi[None, :] - eta.sum(axis=1)
        nk = np.linalg.norm(eta_k, axis=1)
        s = tau - radii.sum(axis=1) - nk
        log_w = np.where(
            nk > 0.0,
            rate * radii.sum(axis=1) - np.log(np.where(nk > 0.0, nk, 1.0)) + log_const,
            -np.inf,
        )
        gauss = -0.5 * (s / epsilon) ** 2
        w = np.exp(log_w + gauss) * norm
        return np.where(np.isfinite(w), w, 0.0)

    est = mc_mean(sample_weights, n_samples, seed)
    return ShellResult(est.mean, MONTE_CARLO, est.stderr)


class SchroShell(NamedTuple):
    itilde: ShellResult
    weighted: float


def schro_shell(d: int, tau: float, xi) -> SchroShell:
    """Paraboloid shell pair (Itilde(tau, xi), I) for 2 tau > |xi|^2.

    Itilde(tau, xi) = 2^{-(d-2)/2} (2 tau - |xi|^2)^{(d-2)/2} Itilde(1, 0)
    with Itilde(1, 0) = 2^{-(d+2)/2} |S^{d-1}|, and the weighted constant
    I = 2^{-d} |S^{d-1}| independent of the point.
    """
    if d < 1:
        raise ValueError("need d >= 1")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    gap = 2.0 * tau - float(np.dot(xi, xi))
    if gap <= 0.0:
        raise ValueError("paraboloid shell needs 2 tau > |xi|^2")
    unit = 2.0 ** (-(d + 2) / 2.0) * sphere_area(d)
    value = 2.0 ** (-(d - 2) / 2.0) * gap ** ((d - 2) / 2.0) * unit
    weighted = 2.0 ** (-d) * sphere_area(d)
    return SchroShell(ShellResult(value, CLOSED_FORM), weighted)

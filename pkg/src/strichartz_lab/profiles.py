"""Extremizer families, their Sobolev norms, data splitting, symmetries.

Wave family:        |xi| fhat(xi) = exp(a|xi| + b.xi + c)
Schrodinger family:      fhat(xi) = exp(a|xi|^2 + b.xi + c)

with complex a, c and complex vector b.  Re(a) < 0 always; the wave
family additionally needs |Re(b)| < -Re(a) for its weighted integrals
to converge (the admissibility predicate below).  Imaginary parts of b
are spatial translations and are folded into the evaluators' base point
rather than the quadrature paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import WAVE, SCHRODINGER, sphere_area, log_sphere_area
from .quadrules import gauss_nodes as _gauss_legendre


@dataclass
class ExtremalProfile:
    family: str
    d: int
    a: complex
    b: np.ndarray = None
    c: complex = 0.0
    sign: int = 1  # +1 rides exp(+it sqrt(-Lap)); -1 the opposite sheet

    def __post_init__(self):
        if self.family not in (WAVE, SCHRODINGER):
            raise ValueError(f"unknown family {self.family!r}")
        if self.b is None:
            self.b = np.zeros(self.d, dtype=complex)
        self.b = np.atleast_1d(np.asarray(self.b, dtype=complex))
        if self.b.size != self.d:
            raise ValueError("tilt vector b must have length d")
        self.a = complex(self.a)
        self.c = complex(self.c)
        if self.sign not in (1, -1):
            raise ValueError("propagator sign must be +1 or -1")
        if self.a.real >= 0:
            raise ValueError("profile requires Re(a) < 0")

    @property
    def decay(self) -> float:
        """sigma = -Re(a) > 0."""
        return -self.a.real

    @property
    def tilt(self) -> float:
        """|Re(b)|, the genuine (non-translation) tilt magnitude."""
        return float(np.linalg.norm(self.b.real))

    @property
    def admissible(self) -> bool:
        """Finiteness of the weighted right-hand sides.

        Wave profiles need |Re(b)| < -Re(a); Gaussian profiles are always
        admissible once Re(a) < 0.
        """
        if self.family == SCHRODINGER:
            return True
        return self.tilt < self.decay

    @property
    def center(self) -> np.ndarray:
        """Spatial center -Im(b) induced by the imaginary tilt."""
        return -self.b.imag

    def freq_amplitude(self, rho):
        """Radial frequency amplitude with the translation stripped.

        Wave: exp(a rho + c) (this is |xi| fhat); Schrodinger:
        exp(a rho^2 + c) (this is fhat).  Real tilts are not radial and
        are handled by the norm/RHS integrators, never here.
        """
        if self.tilt != 0.0:
            raise ValueError("radial amplitude undefined for Re(b) != 0")
        rho = np.asarray(rho, dtype=float)
        if self.family == WAVE:
            return np.exp(self.a * rho + self.c)
        return np.exp(self.a * rho * rho + self.c)


def wave_profile(d, a, b=None, c=0.0, sign=1) -> ExtremalProfile:
    return ExtremalProfile(WAVE, d, a, b, c, sign)


def schrodinger_profile(d, a, b=None, c=0.0) -> ExtremalProfile:
    return ExtremalProfile(SCHRODINGER, d, a, b, c)


# ---------------------------------------------------------------------------
# Sobolev norms


def sobolev_norm_sq(p: ExtremalProfile, s: float, n_quad: int = 200) -> float:
    """Squared homogeneous Sobolev norm (2pi)^{-d} int |xi|^{2s} |fhat|^2.

    Wave family: the polar reduction collapses to an analytic radial
    Gamma integral against a 1-D angular quadrature in u = cos(theta),

        (2pi)^{-d} |S^{d-2}| Gamma(m+1)
            * int_{-1}^{1} (1-u^2)^{(d-3)/2} (2(sigma - beta u))^{-(m+1)} du,

    with m = 2s + d - 3, sigma = -Re(a), beta = |Re(b)|.  Divergent
    profiles (beta >= sigma) return math.inf as a deliberate tag -- the
    admissibility predicate, not an overflow.
    """
    if p.family == WAVE:
        if s < 0.5:
            raise ValueError("wave-family norms need s >= 1/2")
        if not p.admissible:
            return math.inf
        sigma, beta = p.decay, p.tilt
        d, m = p.d, 2.0 * s + p.d - 3.0
        amp = math.exp(2.0 * p.c.real)
        if beta == 0.0:
            return (
                amp
                * sphere_area(d)
                * math.exp(math.lgamma(m + 1.0) - (m + 1.0) * math.log(2.0 * sigma))
                / (2.0 * math.pi) ** d
            )
        u, w = _angular_nodes(d, n_quad)
        vals = (2.0 * (sigma - beta * u)) ** (-(m + 1.0))
        ang = float(np.dot(w, vals))
        return amp * sphere_area(d - 1) * math.gamma(m + 1.0) * ang / (2.0 * math.pi) ** d

    # Gaussian family: finite for every s >= 0.
    if s < 0:
        raise ValueError("need s >= 0")
    sigma, beta = p.decay, p.tilt
    d = p.d
    amp = math.exp(2.0 * p.c.real)
    if s == 0.0:
        val = (math.pi / (2.0 * sigma)) ** (d / 2.0) * math.exp(beta * beta / (2.0 * sigma))
        return amp * val / (2.0 * math.pi) ** d
    if s == 1.0:
        mlen = beta / (2.0 * sigma)
        val = (
            (math.pi / (2.0 * sigma)) ** (d / 2.0)
            * math.exp(beta * beta / (2.0 * sigma))
            * (d / (4.0 * sigma) + mlen * mlen)
        )
        return amp * val / (2.0 * math.pi) ** d
    return _schro_norm_quad(p, s, n_quad)


def _angular_nodes(d, n):
    """Nodes/weights for int_{-1}^1 (1-u^2)^{(d-3)/2} h(u) du.

    Written as int_0^pi sin^{d-2}(theta) h(cos theta) dtheta, which is
    smooth at the endpoints for every d >= 2, so Gauss-Legendre in theta
    converges spectrally (the raw u-form has endpoint singularities for
    even d).
    """
    theta, w = _gauss_legendre(n, 0.0, math.pi)
    return np.cos(theta), w * np.sin(theta) ** (d - 2)


def _schro_norm_quad(p, s, n_quad):
    sigma, beta, d = p.decay, p.tilt, p.d
    amp = math.exp(2.0 * p.c.real)
    rmax = math.sqrt((50.0 + beta * beta / sigma) / (2.0 * sigma)) + beta / sigma + 5.0
    r, wr = _gauss_legendre(8 * n_quad, 0.0, rmax)
    if d == 1:
        radial = r ** (2.0 * s) * np.exp(-2.0 * sigma * r * r) * (
            np.exp(2.0 * beta * r) + np.exp(-2.0 * beta * r)
        )
        return amp * float(np.dot(wr, radial)) / (2.0 * math.pi)
    u, wu = _angular_nodes(d, n_quad)
    ang = np.exp(2.0 * beta * np.outer(r, u))
    radial = r ** (2.0 * s + d - 1.0) * np.exp(-2.0 * sigma * r * r)
    total = float(np.dot(radial * wr, ang @ wu))
    return amp * sphere_area(d - 1) * total / (2.0 * math.pi) ** d


# ---------------------------------------------------------------------------
# Cauchy data and the f_+/f_- split


@dataclass
class CauchyData:
    """Radial wave Cauchy data on the Fourier side.

    u0_hat and udot0_hat map a radial grid |xi| -> complex values.
    """

    u0_hat: callable
    udot0_hat: callable
    d: int


def data_split(cd: CauchyData):
    """fhat_{+/-} = (u0_hat -/+ i udot0_hat/|xi|) / 2.

    Inverse of u(0) = f_+ + f_-, d/dt u(0) = i sqrt(-Lap)(f_+ - f_-);
    reconstruction from the returned handles is exact.
    """

    def f_plus(rho):
        rho = np.asarray(rho, dtype=float)
        return 0.5 * (cd.u0_hat(rho) - 1j * cd.udot0_hat(rho) / rho)

    def f_minus(rho):
        rho = np.asarray(rho, dtype=float)
        return 0.5 * (cd.u0_hat(rho) + 1j * cd.udot0_hat(rho) / rho)

    return f_plus, f_minus


def reconstruct(f_plus, f_minus, d: int) -> CauchyData:
    """Rebuild (u0_hat, udot0_hat) from the split handles."""

    def u0(rho):
        return f_plus(rho) + f_minus(rho)

    def udot0(rho):
        rho = np.asarray(rho, dtype=float)
        return 1j * rho * (f_plus(rho) - f_minus(rho))

    return CauchyData(u0, udot0, d)


def canonical_energy_pair(d: int = 5, c0: float = 1.0):
    """Extremal split pair of the data (0, (1+|x|^2)^{-(d+1)/2}).

    On the Fourier side the data are (0, c0 exp(-|xi|)), whence
    |xi| fhat_{+/-} = +/- c0 exp(-|xi|)/(2i).  c0 is an opaque positive
    normalisation (tests use 1; the quotient is invariant).
    """
    cplus = complex(math.log(c0 / 2.0), -math.pi / 2.0)
    cminus = complex(math.log(c0 / 2.0), math.pi / 2.0)
    fp = ExtremalProfile(WAVE, d, -1.0, None, cplus, sign=1)
    fm = ExtremalProfile(WAVE, d, -1.0, None, cminus, sign=-1)
    return fp, fm


# ---------------------------------------------------------------------------
# Symmetry group actions, parameter level


@dataclass(frozen=True)
class Translate:
    """Space-time translation u(t,x) -> u(t + t0, x + x0)."""

    t0: float = 0.0
    x0: tuple = ()


@dataclass(frozen=True)
class Scaling:
    """Rescaling u -> lam1 u(lam2 t, lam2 x) (wave) / u(lam2^2 t, lam2 x)."""

    lam1: float = 1.0
    lam2: float = 1.0


@dataclass(frozen=True)
class Phase:
    """Phase rotation of one propagator component by exp(i theta)."""

    theta: float = 0.0


@dataclass(frozen=True)
class GalileanBoost:
    """Galilean boost u(t,x) -> exp(-i(x.v + |v|^2 t)) u(t, x + 2vt)."""

    v: tuple = ()


def compose(g1, g2):
    """Group law for two elements of the same one-parameter family."""
    if type(g1) is not type(g2):
        raise ValueError("can only compose elements of the same family")
    if isinstance(g1, Translate):
        x1 = np.asarray(g1.x0, dtype=float) if len(g1.x0) else 0.0
        x2 = np.asarray(g2.x0, dtype=float) if len(g2.x0) else 0.0
        return Translate(g1.t0 + g2.t0, tuple(np.atleast_1d(x1 + x2)))
    if isinstance(g1, Scaling):
        return Scaling(g1.lam1 * g2.lam1, g1.lam2 * g2.lam2)
    if isinstance(g1, Phase):
        return Phase(g1.theta + g2.theta)
    if isinstance(g1, GalileanBoost):
        return GalileanBoost(tuple(np.asarray(g1.v) + np.asarray(g2.v)))
    raise ValueError(f"unsupported group element {g1!r}")


def symmetry_apply(g, p: ExtremalProfile) -> ExtremalProfile:
    """Closed-form action on profile parameters.

    Derived once from the Fourier-side transformation rules: translation
    sends fhat_{+/-} to exp(+/- i t0 |xi| + i x0 . xi) fhat_{+/-},
    rescaling to lam1 lam2^{-d} fhat(xi/lam2), a phase to
    exp(i theta) fhat.
    """
    d = p.d
    if isinstance(g, Translate):
        x0 = np.zeros(d) if len(g.x0) == 0 else np.asarray(g.x0, dtype=float)
        if x0.size != d:
            raise ValueError("translation vector has wrong dimension")
        if p.family == WAVE:
            return replace(p, a=p.a + 1j * p.sign * g.t0, b=p.b + 1j * x0)
        return replace(p, a=p.a - 1j * g.t0, b=p.b + 1j * x0)
    if isinstance(g, Scaling):
        if g.lam1 <= 0 or g.lam2 <= 0:
            raise ValueError("scaling parameters must be positive")
        if p.family == WAVE:
            # |xi| fhat'(xi) = lam1 lam2^{1-d} exp(a|xi|/lam2 + b.xi/lam2 + c)
            c = p.c + math.log(g.lam1) + (1 - d) * math.log(g.lam2)
            return replace(p, a=p.a / g.lam2, b=p.b / g.lam2, c=c)
        c = p.c + math.log(g.lam1) - d * math.log(g.lam2)
        return replace(p, a=p.a / g.lam2 ** 2, b=p.b / g.lam2, c=c)
    if isinstance(g, Phase):
        return replace(p, c=p.c + 1j * g.theta)
    if isinstance(g, GalileanBoost):
        if p.family != SCHRODINGER:
            raise ValueError("Galilean boosts act on the Schrodinger family only")
        v = np.asarray(g.v, dtype=float)
        if v.size != d:
            raise ValueError("boost vector has wrong dimension")
        c = p.c + p.a * float(np.dot(v, v)) + complex(np.dot(p.b, v))
        return replace(p, b=p.b + 2.0 * p.a * v, c=c)
    raise ValueError(f"unsupported group element {g!r}")


# ---------------------------------------------------------------------------
# The amplitude Lambda_{a,b,c} and its uniqueness diagnostics


def lambda_amplitude(p: ExtremalProfile, t: float, x) -> float:
    """|u(t,x)| for a wave profile with imaginary tilt.

    This is the amplitude whose argmax and center-line law determine
    (a, b, Re c); evaluation is delegated to the propagator module.
    """
    from . import propagators

    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = float(np.linalg.norm(x - p.center))
    return abs(propagators.wave_eval(p, t, r))


def center_line_constant(d: int) -> float:
    """C0 = Gamma(d-1) |S^{d-1}|: |u(t, center)| = C0 e^{Re c} / ((2pi)^d |Re a + i t~|^{d-1})."""
    return math.exp(math.lgamma(d - 1) + log_sphere_area(d))


def lambda_diagnostics(p: ExtremalProfile, t_grid=None, n_fit: int = 9):
    """Numeric uniqueness diagnostics of the amplitude.

    Returns dict with the coarse-grid argmax over (t, x_axis), and the
    polynomial fit of C0 exp(-Re c) / Lambda on the center line: for
    d = 5 it is (Re(a)^2 + t~^2)^2, a monic quartic in shifted time with
    constant term Re(a)^4.
    """
    if p.family != WAVE or p.d != 5:
        raise ValueError("diagnostics implemented for d = 5 wave profiles")
    t_star = -p.a.imag
    if t_grid is None:
        t_grid = t_star + np.linspace(-2.0, 2.0, 41)
    center = p.center
    axis = np.zeros(p.d)
    axis[0] = 1.0
    x_offsets = np.linspace(-2.0, 2.0, 41)
    vals = np.array(
        [[lambda_amplitude(p, t, center + s * axis) for s in x_offsets] for t in t_grid]
    )
    it, ix = np.unravel_index(np.argmax(vals), vals.shape)
    # Center-line polynomial: sample and fit degree 4 in shifted time.
    # On the line, Lambda = C0 e^{Re c} / ((2pi)^d |Re a + i t~|^{d-1}), so
    # C0 e^{Re c} / ((2pi)^d Lambda) is the monic quartic (Re a^2 + t~^2)^2.
    ts = np.linspace(-1.5, 1.5, n_fit)
    lam = np.array([lambda_amplitude(p, t_star + t, center) for t in ts])
    target = center_line_constant(p.d) * math.exp(p.c.real) / ((2.0 * math.pi) ** p.d) / lam
    coeffs = np.polyfit(ts, target, 4)
    return {
        "argmax_t": float(t_grid[it]),
        "argmax_x": center + x_offsets[ix] * axis,
        "lead_coeff": float(coeffs[0]),
        "const_term": float(coeffs[4]),
        "expected_argmax_t": t_star,
        "expected_argmax_x": center,
        "expected_const_term": p.a.real ** 4,
    }


# ---------------------------------------------------------------------------
# Flat-record (de)serialisation


def profile_to_record(p: ExtremalProfile) -> str:
    """One-line key=value record (family, d, a, b, c, sign)."""
    def vec(v):
        return ",".join("%.17g" % x for x in v)

    return " ".join(
        [
            f"family={p.family}",
            f"d={p.d}",
            "a_re=%.17g" % p.a.real,
            "a_im=%.17g" % p.a.imag,
            f"b_re={vec(p.b.real)}",
            f"b_im={vec(p.b.imag)}",
            "c_re=%.17g" % p.c.real,
            "c_im=%.17g" % p.c.imag,
            f"sign={p.sign}",
        ]
    )


def profile_from_record(line: str) -> ExtremalProfile:
    fields = dict(item.split("=", 1) for item in line.split())
    d = int(fields["d"])
    b_re = np.array([float(x) for x in fields["b_re"].split(",")])
    b_im = np.array([float(x) for x in fields["b_im"].split(",")])
    return ExtremalProfile(
        family=fields["family"],
        d=d,
        a=complex(float(fields["a_re"]), float(fields["a_im"])),
        b=b_re + 1j * b_im,
        c=complex(float(fields["c_re"]), float(fields["c_im"])),
        sign=int(fields.get("sign", 1)),
    )

"""Propagator evaluation: oscillatory quadrature, closed forms, FFT grid."""

import math

import numpy as np
import pytest
from scipy import integrate, special

from strichartz_lab import profiles as P
from strichartz_lab import propagators as PR
from strichartz_lab.constants import sphere_area


def test_angular_kernel_values():
    for d in (2, 3, 4, 5, 6):
        assert PR.angular_kernel(d, np.array([0.0]))[0] == pytest.approx(
            sphere_area(d), rel=1e-12
        )
        # Against the Bessel formula at generic arguments.
        s = np.array([0.7, 3.3, 11.0])
        nu = 0.5 * (d - 2)
        want = (2 * math.pi) ** (d / 2.0) * special.jv(nu, s) / s ** nu
        assert np.allclose(PR.angular_kernel(d, s), want, rtol=1e-11)


def test_angular_kernel_series_and_elementary_branches_agree():
    # Both branches against |S^{d-1}| 0F1(d/2; -s^2/4) around the cutoff.
    import mpmath

    mpmath.mp.dps = 30
    for d in (2, 3, 4, 5):
        for s in (0.049, 0.051, 0.2):
            want = sphere_area(d) * float(mpmath.hyp0f1(d / 2.0, -(s * s) / 4.0))
            got = PR.angular_kernel(d, np.array([s]))[0]
            assert got == pytest.approx(want, rel=1e-11)


def test_quadrature_matches_closed_kernel():
    for d in (2, 3, 4, 5):
        p = P.wave_profile(d, -1.0 + 0.3j, c=0.2 - 0.5j)
        ev_q = PR.RadialEvaluator(p, method="quadrature")
        ev_c = PR.RadialEvaluator(p)
        ts = np.array([0.0, 0.7, -2.3, 5.0])
        rs = np.array([0.0, 0.5, 1.7, 4.0, 9.0])
        q = ev_q.eval_grid(ts, rs)
        c = ev_c.eval_grid(ts, rs)
        assert np.max(np.abs(q - c) / np.maximum(np.abs(c), 1e-14)) < 1e-9


def test_center_value_formula_and_centerline_law():
    p = P.wave_profile(5, -1.0)
    # u(t, 0) = (2pi)^{-d} |S^{d-1}| Gamma(d-1) / (-(a+it))^{d-1}, checked
    # against quadrature at r = 1e-6.
    for t in (0.0, 0.8, -3.0):
        want = PR.wave_center_value(p, t)
        got = PR.wave_eval(p, t, 1e-6, method="quadrature")
        assert got == pytest.approx(want, rel=1e-8)
    # d = 5 center-line law to 1e-8 relative on t in [-10, 10].
    c0 = 6 * sphere_area(5) / (2 * math.pi) ** 5
    for t in np.linspace(-10, 10, 9):
        got = abs(PR.wave_eval(p, float(t), 0.0, method="quadrature"))
        want = c0 / abs(1.0 - 1j * t) ** 4
        assert got == pytest.approx(want, rel=1e-8)


def test_time_symmetry_real_parameters():
    p = P.wave_profile(5, -1.0)
    for t, r in [(1.3, 0.8), (4.0, 2.0)]:
        a = PR.wave_eval(p, t, r, method="quadrature")
        b = PR.wave_eval(p, -t, r, method="quadrature")
        assert b == pytest.approx(np.conj(a), rel=1e-10)


def test_initial_slice_real_decreasing():
    p = P.wave_profile(5, -1.0)
    ev = PR.RadialEvaluator(p, method="quadrature")
    row = ev.eval_grid(np.array([0.0]), np.linspace(0.0, 5.0, 26))[0]
    assert np.max(np.abs(row.imag)) < 1e-12
    assert np.all(row.real > 0)
    assert np.all(np.diff(row.real) < 0)


def test_convergence_error_estimates():
    # Halving tolerance changes values by less than the reported error.
    p = P.wave_profile(3, -1.0 + 0.4j, c=0.1)
    loose = PR.RadialEvaluator(p, method="quadrature",
                               quad=PR.QuadSpec(rel_tol=1e-6, abs_tol=1e-10))
    tight = PR.RadialEvaluator(p, method="quadrature",
                               quad=PR.QuadSpec(rel_tol=5e-7, abs_tol=5e-11))
    ts = np.linspace(-3, 3, 10)
    rs = np.linspace(0, 6, 10)
    vl, el = loose.eval_grid(ts, rs, with_error=True)
    vt = tight.eval_grid(ts, rs)
    assert np.all(np.abs(vl - vt) <= el + 1e-12)


def test_evaluator_validation():
    bad = P.wave_profile(5, -1.0, b=np.array([1.5, 0, 0, 0, 0]))
    with pytest.raises(ValueError):
        PR.RadialEvaluator(bad)
    tilted = P.wave_profile(5, -1.0, b=np.array([0.5, 0, 0, 0, 0]))
    with pytest.raises(ValueError):
        PR.RadialEvaluator(tilted)
    with pytest.raises(ValueError):
        PR.RadialEvaluator(radial_fn=lambda r: np.exp(-r))  # missing decay/d


def test_translated_profile_center():
    # Imaginary tilt is a pure translation: same radial values about -Im(b).
    base = P.wave_profile(5, -1.0)
    moved = P.wave_profile(5, -1.0, b=1j * np.array([0.7, 0, 0, 0, 0]))
    assert np.allclose(moved.center, [-0.7, 0, 0, 0, 0])
    va = PR.wave_eval(base, 0.9, 1.3)
    vb = PR.wave_eval(moved, 0.9, 1.3)
    assert vb == pytest.approx(va, rel=1e-12)


def test_schro_gaussian_eval_against_quadrature():
    # t = 0 is the plain inverse Fourier transform of the Gaussian data.
    p = P.schrodinger_profile(3, -1.0, c=0.2)
    for x1 in (0.0, 0.9):
        def fn_re(rho):
            val = rho * np.sin(rho * x1) if x1 else rho * rho
            return float(np.exp(-rho * rho + 0.2) * val)

        if x1:
            val, _ = integrate.quad(fn_re, 0, 10, epsabs=1e-13)
            want = 4 * math.pi * val / x1 / (2 * math.pi) ** 3
        else:
            val, _ = integrate.quad(fn_re, 0, 10, epsabs=1e-13)
            want = 4 * math.pi * val / (2 * math.pi) ** 3
        got = PR.schro_gaussian_eval(p, 0.0, [x1, 0.0, 0.0])
        assert got.real == pytest.approx(want, rel=1e-10)
        assert abs(got.imag) < 1e-13


def test_schro_gaussian_mass_conservation():
    p = P.schrodinger_profile(3, -0.7, c=-0.1)

    def mass(t):
        # Packet spread grows like |it - a|, so the radial cut must track t.
        rmax = 30.0 + 12.0 * abs(t)
        fn = lambda r: abs(PR.schro_gaussian_eval(p, t, [r, 0, 0])) ** 2 * r * r
        val, _ = integrate.quad(fn, 0, rmax, epsabs=0, epsrel=1e-13, limit=300)
        return 4 * math.pi * val

    m0, m1, m2 = mass(0.0), mass(1.1), mass(5.0)
    assert m1 == pytest.approx(m0, rel=1e-12)
    assert m2 == pytest.approx(m0, rel=1e-12)


def test_schro_gaussian_branch_continuity_in_time():
    # (pi/(it-a))^{d/2} stays on the principal branch: u(t, 0) is smooth
    # in t (a branch flip would show as an O(|u|) second difference).
    p = P.schrodinger_profile(5, -0.5)
    ts = np.linspace(-8, 8, 400)
    vals = np.array([PR.schro_gaussian_eval(p, float(t), [0.0] * 5) for t in ts])
    second = np.abs(vals[2:] - 2 * vals[1:-1] + vals[:-2])
    # Smooth curvature at this step is ~6e-4 |u|_max; a sign flip jumps by
    # ~2 |u|_max in a single step, two decades above this threshold.
    assert np.max(second) < 0.1 * np.max(np.abs(vals))


def test_grid1d_invariants_and_identity():
    with pytest.raises(ValueError):
        PR.Grid1D(100, 10.0)
    with pytest.raises(ValueError):
        PR.Grid1D(1000, 10.0)  # not a power of two
    g = PR.grid_from_freq_data(lambda k: np.exp(-((k - 3.0) ** 2)), 1024, 40.0)
    out = PR.schro_fft_1d(g, 0.0)
    assert np.allclose(out.values, g.values)


def test_grid1d_plane_wave_eigenphase():
    n, L = 1024, 20.0
    g = PR.Grid1D(n, L)
    k0 = g.k[37]
    g.values = np.exp(1j * k0 * g.x)
    out = PR.schro_fft_1d(g, 0.63, check_boundary=False)
    want = np.exp(-1j * 0.63 * k0 ** 2) * g.values
    assert np.max(np.abs(out.values - want)) < 1e-10


def test_grid1d_vs_gaussian_closed_form():
    n, L = 4096, 60.0
    p = P.schrodinger_profile(1, -1.0)
    g = PR.grid_from_freq_data(lambda k: np.exp(-(k ** 2)), n, L)
    out = PR.schro_fft_1d(g, 0.7)
    inner = slice(n // 4, 3 * n // 4)
    want = np.array([PR.schro_gaussian_eval(p, 0.7, [x]) for x in out.x[inner]])
    assert np.max(np.abs(out.values[inner] - want)) < 1e-8


def test_grid1d_mass_conservation_and_boundary_guard():
    n, L = 1024, 30.0
    g = PR.grid_from_freq_data(lambda k: np.exp(-((k - 2.0) ** 2)), n, L)
    m0 = g.l2_mass()
    out = PR.schro_fft_1d(g, 2.2, check_boundary=False)
    assert out.l2_mass() == pytest.approx(m0, rel=1e-12)
    bad = PR.Grid1D(256, 5.0, values=np.ones(256))
    with pytest.raises(ValueError):
        PR.schro_fft_1d(bad, 0.1)


def test_dump_samples_csv(tmp_path):
    p = P.wave_profile(3, -1.0)
    ev = PR.RadialEvaluator(p)
    path = tmp_path / "field.csv"
    PR.dump_samples_csv(path, ev, [0.0, 1.0], [0.0, 0.5])
    lines = path.read_text().splitlines()
    assert lines[0] == "t,r,re_u,im_u"
    assert len(lines) == 5

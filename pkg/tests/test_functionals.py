"""Space-time norms, multilinear right-hand sides, quotients, residuals."""

import json
import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from strichartz_lab import constants as C
from strichartz_lab import functionals as FN
from strichartz_lab import profiles as P
from strichartz_lab import propagators as PR
from strichartz_lab.constants import sphere_area

QUARTIC_D5 = 1.0 / (6144.0 * math.pi ** 8)


@pytest.fixture(scope="module")
def ev5():
    return PR.RadialEvaluator(P.wave_profile(5, -1.0))


def test_lp_norm_frozen_values(ev5):
    val, err = FN.product_l2_sq([ev5, ev5], rel_tol=1e-8)
    assert val == pytest.approx(QUARTIC_D5, rel=1e-7)
    assert abs(val - QUARTIC_D5) <= max(err, 1e-7 * QUARTIC_D5)
    ev3 = PR.RadialEvaluator(P.wave_profile(3, -1.0))
    n6, _ = FN.lp_norm_radial(ev3, 6)
    assert n6 ** 6 == pytest.approx(3.0 / (8192.0 * math.pi ** 9), rel=1e-7)
    ev2 = PR.RadialEvaluator(P.wave_profile(2, -1.0))
    n10, _ = FN.lp_norm_radial(ev2, 10)
    assert n10 ** 10 == pytest.approx(5.0 / (49152.0 * math.pi ** 8), rel=1e-6)
    with pytest.raises(ValueError):
        FN.lp_norm_radial(ev3, 5)


def test_lp_norm_insufficient_decay_guard(ev5):
    # Below the admissible exponent the space-time norm diverges: L^4 of a
    # single wave field in d = 2, and L^2 of anything.
    ev2 = PR.RadialEvaluator(P.wave_profile(2, -1.0))
    with pytest.raises(ValueError):
        FN.lp_norm_radial(ev2, 4)
    with pytest.raises(ValueError):
        FN.lp_norm_radial(ev5, 2)


def test_d3_sextic_equals_sobolev_product():
    # ||u||_6^6 = (3/(16 pi^3)) H E^2 with H, E the data norms.
    p = P.wave_profile(3, -1.3, c=0.2)
    ev = PR.RadialEvaluator(p)
    n6, _ = FN.lp_norm_radial(ev, 6)
    H = P.sobolev_norm_sq(p, 0.5)
    E = P.sobolev_norm_sq(p, 1.0)
    assert n6 ** 6 == pytest.approx(3.0 / (16.0 * math.pi ** 3) * H * E * E, rel=1e-6)


def test_quadrature_method_matches_closed_kernel_route(ev5):
    win = FN.default_window([ev5], tail_factor=4.0)
    ref, _ = FN.product_l2_sq([ev5, ev5], window=win, rel_tol=1e-8,
                              mode="cone", check_window=False)
    evq = PR.RadialEvaluator(P.wave_profile(5, -1.0), method="quadrature",
                             quad=PR.QuadSpec(rel_tol=1e-6, abs_tol=1e-11))
    got, err = FN.product_l2_sq([evq, evq], window=win, rel_tol=3e-4,
                                mode="rect", check_window=False, max_levels=3)
    assert got == pytest.approx(ref, rel=2e-4)


def test_scaling_leaves_quotient_unchanged(ev5):
    rep0 = FN.onesided_quotient(P.wave_profile(5, -1.0))
    rep1 = FN.onesided_quotient(P.symmetry_apply(P.Scaling(2.0, 2.0), P.wave_profile(5, -1.0)))
    assert rep1.ratio == pytest.approx(rep0.ratio, rel=1e-6)


def test_onesided_quotient_extremal_all_dims():
    for d in (2, 3, 5):
        rep = FN.onesided_quotient(P.wave_profile(d, -1.0))
        assert abs(rep.deficit) < 5e-3
        assert rep.meta["k"] == C.WAVE_ALPHA1_DEGREE[d]


def test_wave_fiber_route_cross_validation():
    ga = lambda rho: np.exp((-1.0 + 0.4j) * rho + 0.3)
    gb = lambda rho: np.exp(-1.6 * rho - 0.2)
    pa = P.wave_profile(5, -1.0 + 0.4j, c=0.3)
    pb = P.wave_profile(5, -1.6, c=-0.2)
    fiber = FN.wave_bilinear_lhs_fiber(ga, gb, 5, 1.0)
    tr, _ = FN.product_l2_sq([PR.RadialEvaluator(pa), PR.RadialEvaluator(pb)],
                             rel_tol=1e-7)
    assert fiber == pytest.approx(tr, rel=1e-4)


def test_schro_fiber_route_cross_validation():
    g = lambda rho: np.exp(-rho ** 2)
    want4 = 1.0 / (131072.0 * math.pi ** 5)
    assert FN.schro_quartic_norm4(g, 4, 1.0, n_q=120, n_u=64) == pytest.approx(
        want4, rel=1e-5
    )


def test_multilinear_rhs_alpha0_factorization():
    # (3,2) extremal with b = 0: K^0 = 1 and the weights are constant, so
    # the estimate equals ((2pi)^3 H)^2 = pi^2 with vanishing variance.
    p = P.wave_profile(3, -1.0)
    est = FN.multilinear_rhs([p, p], n_samples=10 ** 4, seed=1)
    assert est.mean == pytest.approx(math.pi ** 2, rel=1e-12)
    # Constant weights: stderr is pure floating-point noise in the
    # one-pass variance, many orders below any genuine MC error.
    assert est.stderr < 1e-6 * est.mean


def test_multilinear_rhs_equality_case(ev5):
    p = P.wave_profile(5, -1.0)
    lhs, lerr = FN.product_l2_sq([ev5, ev5])
    rhs = FN.multilinear_rhs([p, p], n_samples=3 * 10 ** 5, seed=2)
    const = C.wave_sharp_constant(5, 2)
    band = 3.0 * (rhs.stderr / rhs.mean + lerr / lhs)
    assert abs(lhs / (const * rhs.mean) - 1.0) <= band


def test_multilinear_rhs_tilt_and_divergence():
    tilted = P.wave_profile(5, -1.0, b=np.array([0.5, 0, 0, 0, 0]))
    est = FN.multilinear_rhs([tilted, tilted], n_samples=10 ** 4, seed=3)
    assert math.isfinite(est.mean) and est.mean > 0
    bad = P.wave_profile(5, -1.0, b=np.array([1.1, 0, 0, 0, 0]))
    with pytest.raises(ValueError):
        FN.multilinear_rhs([bad, bad], n_samples=10 ** 4, seed=3)
    with pytest.raises(ValueError):
        FN.multilinear_rhs([P.wave_profile(3, -1.0)], n_samples=10 ** 4)
    with pytest.raises(ValueError):
        FN.multilinear_rhs([P.wave_profile(3, -1.0), P.wave_profile(2, -1.0)])


def test_multilinear_rhs_schrodinger_closed_form():
    # d = 4, k = 2 Gaussians, b = 0: int int e^{-2|x|^2 - 2|y|^2} |x - y|^2
    # = (pi/2)^4 * 2 (the difference of two N(0, I/4) draws has E|.|^2 = 2).
    p = P.schrodinger_profile(4, -1.0)
    est = FN.multilinear_rhs([p, p], n_samples=2 * 10 ** 5, seed=4)
    want = (math.pi / 2.0) ** 4 * 2.0
    assert abs(est.mean - want) <= 3.0 * est.stderr
    assert est.stderr < 0.01 * want


def test_term_II_zero_and_positive():
    p = P.wave_profile(5, -1.0)
    out = FN.term_II(p)
    assert out["II"] < 1e-12
    assert out["I"] > 0 and out["k"] == 2
    tilted = P.wave_profile(5, -1.0, b=np.array([0.3, 0, 0, 0, 0]))
    out_t = FN.term_II(tilted)
    assert out_t["II"] > 1e-3 * out_t["I"]
    assert out_t["rhs"] == pytest.approx(out_t["I"] - out_t["II"])


def test_term_II_polar_quadrature_oracle():
    # V = |S^{d-2}| Gamma(d) int u (1-u^2)^{(d-3)/2} (2(sigma - beta u))^{-d} du
    # against a plain 2-D (r, u) quadrature of the defining integral.
    sigma, beta, d = 1.0, 0.3, 5
    tilted = P.wave_profile(d, -sigma, b=np.array([beta, 0, 0, 0, 0]))

    def inner(u):
        fn = lambda r: math.exp(2 * (-sigma + beta * u) * r) * r ** (d - 1)
        val, _ = integrate.quad(fn, 0, 120, epsabs=1e-14, epsrel=1e-12)
        return val * u * (1 - u * u) ** ((d - 3) / 2)

    val, _ = integrate.quad(inner, -1, 1, epsabs=1e-13, epsrel=1e-11)
    want_V = sphere_area(d - 1) * val
    assert FN.term_II(tilted)["V"] == pytest.approx(want_V, rel=1e-8)


def test_term_II_rotation_invariance():
    b1 = np.zeros(5)
    b1[0] = 0.4
    rot = np.zeros(5)
    rot[1], rot[3] = 0.4 * math.cos(0.3), 0.4 * math.sin(0.3)
    a = FN.term_II(P.wave_profile(5, -1.0, b=b1))
    b = FN.term_II(P.wave_profile(5, -1.0, b=rot))
    assert a["II"] == pytest.approx(b["II"], rel=1e-10)


def test_term_II_matches_monte_carlo():
    tilted = P.wave_profile(5, -1.0, b=np.array([0.3, 0, 0, 0, 0]))
    out = FN.term_II(tilted)
    mc = FN.multilinear_rhs([tilted, tilted], n_samples=4 * 10 ** 5, seed=8)
    assert abs(out["rhs"] - mc.mean) <= 3.0 * mc.stderr


def test_energy_quotient_canonical_and_symmetries():
    fp, fm = P.canonical_energy_pair()
    rep = FN.energy_quotient(fp, fm)
    assert abs(rep.deficit) < 5e-3
    assert rep.constant == pytest.approx(1.0 / math.sqrt(8.0 * math.pi))
    # c0 normalisation is immaterial.
    fp2, fm2 = P.canonical_energy_pair(c0=2.7)
    rep2 = FN.energy_quotient(fp2, fm2)
    assert rep2.ratio == pytest.approx(rep.ratio, rel=1e-9)
    # Phase rotations on both components leave the ratio unchanged.
    fp3 = P.symmetry_apply(P.Phase(0.9), fp)
    fm3 = P.symmetry_apply(P.Phase(-1.7), fm)
    rep3 = FN.energy_quotient(fp3, fm3)
    assert rep3.ratio == pytest.approx(rep.ratio, rel=1e-6)


def test_energy_quotient_conjugate_condition():
    fp, fm = P.canonical_energy_pair()
    broken = FN.energy_quotient(fp, replace(fm, a=-1.3))
    assert broken.ratio < 1.0
    assert broken.strict()
    imag_broken = FN.energy_quotient(fp, replace(fm, a=-1.0 - 0.3j))
    assert imag_broken.strict()


def test_energy_quotient_validation():
    fp, fm = P.canonical_energy_pair()
    with pytest.raises(ValueError):
        FN.energy_quotient(fm, fp)  # wrong propagator signs
    with pytest.raises(ValueError):
        FN.energy_quotient(P.wave_profile(3, -1.0), P.wave_profile(3, -1.0, sign=-1))


def test_orthogonal_split_identity_and_basic_inequality():
    fp, fm = P.canonical_energy_pair()
    out = FN.orthogonal_split_check(fp, fm)
    assert out["residual"] < 1e-4
    X, Y = out["X"], out["Y"]
    assert X == pytest.approx(Y, rel=1e-6)  # conjugate pair has |u_+| = |u_-|
    assert 2 * (X ** 2 + Y ** 2 + 4 * X * Y) <= 3 * (X + Y) ** 2 + 1e-18
    # Single-sheet control: u_- = 0 reduces the identity to ||u_+||_4^4.
    ev_p = PR.RadialEvaluator(fp)
    solo, _ = FN.product_l2_sq([ev_p, ev_p])
    assert out["lhs"] == pytest.approx(
        out["X"] ** 2 + out["Y"] ** 2 + 4 * out["cross"], rel=1e-4
    )
    assert solo == pytest.approx(out["X"] ** 2, rel=1e-6)


def test_basic_inequality_strict_off_diagonal():
    fp, fm = P.canonical_energy_pair()
    out = FN.orthogonal_split_check(fp, replace(fm, a=-1.5))
    X, Y = out["X"], out["Y"]
    assert X != pytest.approx(Y, rel=1e-3)
    assert 2 * (X ** 2 + Y ** 2 + 4 * X * Y) < 3 * (X + Y) ** 2


def test_cross_term_gap_modes():
    gap = FN.cross_term_gap("paper")
    assert gap["ratio"] < 1.0 - 10.0 * gap["err"]
    coin = FN.cross_term_gap("coincident")
    assert coin["ratio"] == pytest.approx(1.0, abs=1e-6)
    neg = FN.cross_term_gap("negated")
    assert neg["ratio"] == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        FN.cross_term_gap("sideways")


def test_functional_equation_residual_cases():
    b = np.array([0.2, -0.1, 0.3 + 0.2j])
    g_exp = lambda eta: np.exp((-1.0 + 0.5j) * np.linalg.norm(eta, axis=1) + eta @ b)
    assert FN.functional_eq_residual(g_exp, 3, seed=2) < 1e-10
    g_gauss = lambda eta: np.exp(-np.einsum("nd,nd->n", eta, eta))
    assert FN.functional_eq_residual(g_gauss, 3, seed=2) > 1e-2
    g_one = lambda eta: np.ones(eta.shape[0])
    assert FN.functional_eq_residual(g_one, 3, seed=2) == 0.0
    g_vanish = lambda eta: np.exp(-200.0 * np.linalg.norm(eta, axis=1) ** 2)
    with pytest.raises(ValueError):
        FN.functional_eq_residual(g_vanish, 3, seed=2, cone_scale=3.0)


def test_schro_identity_grid():
    res = FN.schro_identity_check()
    assert res["rel_err"] < 0.01


def test_mixed_norm_quotient_gaussian_and_tilted():
    rep = FN.mixed_norm_quotient(P.schrodinger_profile(4, -1.0))
    assert rep.ratio == pytest.approx(1.0, rel=1e-10)
    assert rep.constant == pytest.approx((32.0 * math.pi) ** -0.25, rel=1e-13)
    beta = 0.5
    rep_t = FN.mixed_norm_quotient(P.schrodinger_profile(4, -1.0, b=np.array([beta, 0, 0, 0])))
    want = (1.0 / (1.0 + beta * beta / 4.0)) ** 0.25
    assert rep_t.ratio == pytest.approx(want, rel=1e-10)
    with pytest.raises(ValueError):
        FN.mixed_norm_quotient(P.schrodinger_profile(3, -1.0))


def test_gaussian_l4_against_spacetime_quadrature():
    p = P.schrodinger_profile(4, -1.0)
    want = FN.gaussian_l4_norm(p)
    ev = PR.RadialEvaluator(p)  # Gaussian closed-form grid
    win = FN.default_window([ev], tail_factor=6.0, core=10.0)
    got, _ = FN.lp_norm_radial(ev, 4, window=win, rel_tol=1e-7, mode="rect")
    assert got == pytest.approx(want, rel=1e-6)


def test_schro_ansatz_routes_agree():
    g = lambda rho: np.exp(-rho ** 2)
    fast = FN.schro_ansatz_quotient(g, decay=1.0)
    assert fast.ratio == pytest.approx(1.0, abs=3e-4)
    slow = FN.schro_ansatz_quotient(g, decay=1.0, route="propagator")
    assert slow.ratio == pytest.approx(fast.ratio, abs=2e-3)
    with pytest.raises(ValueError):
        FN.schro_ansatz_quotient(g, decay=1.0, route="warp")


def test_schro_perturbed_quotient_drops():
    gd = lambda rho: np.exp(-rho ** 2) + 0.45 * np.exp(-4.0 * (rho - 1.6) ** 2)
    rep = FN.schro_ansatz_quotient(gd, decay=0.3)
    assert rep.ratio < 0.99
    assert rep.ratio > 0.8


def test_quotient_report_serialization():
    rep = FN.QuotientReport(lhs=1.0 / 3.0, lhs_err=1e-9, rhs=2.0, rhs_err=0.0,
                            constant=0.25, meta={"case": "demo", "seed": 7})
    line = rep.to_json()
    payload = json.loads(line)
    assert payload["ratio"] == pytest.approx(rep.ratio, rel=1e-14)
    assert payload["meta"]["seed"] == 7
    assert FN.json_line({"b": 1.0, "a": math.pi}) == FN.json_line({"a": math.pi, "b": 1.0})
    # 15 significant digits
    assert "3.14159265358979" in FN.json_line({"x": math.pi})


def test_quotient_report_strictness_threshold():
    rep = FN.QuotientReport(lhs=0.9, lhs_err=0.0005, rhs=1.0, rhs_err=0.0, constant=1.0)
    assert rep.deficit == pytest.approx(0.1)
    assert rep.strict()
    noisy = FN.QuotientReport(lhs=0.9, lhs_err=0.05, rhs=1.0, rhs_err=0.0, constant=1.0)
    assert not noisy.strict()

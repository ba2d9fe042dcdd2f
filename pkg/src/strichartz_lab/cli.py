"""Command-line verification suites.

Each subcommand runs one named suite at desk scale, prints a human
summary, optionally writes machine-readable JSON-lines reports (one
object per case, schema: suite, case_id, lhs, rhs, constant, ratio,
deficit, stderr, seed, pass), and exits 0 iff every case passed.
Reports are byte-deterministic for fixed seeds; wall-clock metadata
goes to a separate --meta-out file, never into the report stream.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import replace

import numpy as np

from . import constants as C
from . import functionals as FN
from . import profiles as P
from . import propagators as PR
from .search import SearchConfig, search as run_search, trace_to_csv
from . import shells as SH
from .geometry import ConePoint, boost_matrix, galilean_map, lorentz_boost, minkowski_form


def _case(suite, case_id, lhs, rhs, constant, ok, stderr=0.0, seed=0, **extra):
    ratio = lhs / (constant * rhs) if constant * rhs != 0 else math.inf
    row = {
        "suite": suite,
        "case_id": case_id,
        "lhs": float(lhs),
        "rhs": float(rhs),
        "constant": float(constant),
        "ratio": float(ratio),
        "deficit": float(1.0 - ratio),
        "stderr": float(stderr),
        "seed": int(seed),
        "pass": bool(ok),
    }
    row.update(extra)
    return row


def suite_constants(args):
    """Catalog W(d,k), S(d,k) plus the published-formula consistency checks."""
    ds = [args.d] if args.d else list(range(2, 7))
    ks = [args.k] if args.k else [2, 3, 4]
    fams = [args.family] if args.family else list(C.FAMILIES)
    cases = []
    for fam in fams:
        for d in ds:
            for k in ks:
                try:
                    scale = C.EstimateScale(d, k, fam)
                except ValueError:
                    continue
                const = scale.sharp_constant
                if fam == C.WAVE:
                    # k-linear formula evaluated at this k must match.
                    alt = math.exp(C.log_wave_sharp_constant(d, k))
                else:
                    alt = math.exp(C.log_schrodinger_sharp_constant_klinear(d, k))
                ok = abs(const - alt) <= 1e-12 * const
                cases.append(
                    _case("constants", f"{fam}_d{d}_k{k}", const, alt, 1.0, ok,
                          exponent=float(scale.exponent), attained=scale.attained)
                )
    s12 = C.schrodinger_sharp_constant(1, 2)
    cases.append(
        _case("constants", "schro_identity_factor_2", s12,
              C.schro_identity_constant(), 2.0,
              abs(s12 - 2.0 * C.schro_identity_constant()) < 1e-15 * s12)
    )
    if args.out_csv:
        C.write_constants_csv(args.out_csv, ds, ks, fams)
    return cases


def suite_shells(args):
    """Closed form vs recursion vs Monte Carlo for the cone shell."""
    d, k = args.d or 3, args.k or 2
    if args.point:
        vals = [float(x) for x in args.point.split(",")]
        pt = ConePoint(vals[0], np.array(vals[1:]))
    else:
        pt = ConePoint(1.0, np.zeros(d))
    closed = SH.itilde_closed(d, k, pt)
    rec = SH.itilde_recursive(d, k, pt, tol=1e-10)
    mc = SH.itilde_montecarlo(d, k, pt, epsilon=args.epsilon, n_samples=args.samples,
                              seed=args.seed)
    ok_rec = abs(rec.value - closed.value) <= 1e-8 * closed.value
    ok_mc = abs(mc.value - closed.value) <= 3.0 * mc.stderr
    return [
        _case("shells", f"recursion_d{d}_k{k}", rec.value, closed.value, 1.0, ok_rec),
        _case("shells", f"montecarlo_d{d}_k{k}", mc.value, closed.value, 1.0, ok_mc,
              stderr=mc.stderr, seed=args.seed),
    ]


def suite_bilinear(args):
    """Sharp k-linear wave inequality: extremal ratio 1, random ratios < 1."""
    d, k = args.d or 5, args.k or 2
    rng = np.random.Generator(np.random.Philox(key=np.array([np.uint64(args.seed), np.uint64(1)])))
    cases = []
    const = C.wave_sharp_constant(d, k)
    profiles = [P.wave_profile(d, -1.0, c=0.1 * j) for j in range(k)]
    evs = [PR.RadialEvaluator(p) for p in profiles]
    lhs, lerr = FN.product_l2_sq(evs)
    rhs = FN.multilinear_rhs(profiles, n_samples=args.samples, seed=args.seed)
    band = 3.0 * (rhs.stderr / rhs.mean + lerr / lhs)
    ratio = lhs / (const * rhs.mean)
    cases.append(
        _case("bilinear", f"extremal_d{d}_k{k}", lhs, rhs.mean, const,
              abs(ratio - 1.0) <= band, stderr=rhs.stderr, seed=args.seed)
    )
    for trial in range(args.random_cases):
        profs = [
            P.wave_profile(
                d,
                complex(-math.exp(rng.normal(scale=0.4)), 0.4 * rng.normal()),
                c=complex(0.3 * rng.normal(), math.pi * rng.random()),
            )
            for _ in range(k)
        ]
        evs = [PR.RadialEvaluator(p) for p in profs]
        lhs, lerr = FN.product_l2_sq(evs)
        rhs = FN.multilinear_rhs(profs, n_samples=args.samples, seed=args.seed + trial + 1)
        band = 3.0 * (rhs.stderr / rhs.mean + lerr / lhs)
        ratio = lhs / (const * rhs.mean)
        cases.append(
            _case("bilinear", f"random{trial}_d{d}_k{k}", lhs, rhs.mean, const,
                  ratio <= 1.0 + band, stderr=rhs.stderr, seed=args.seed + trial + 1)
        )
    return cases


def suite_corollary(args):
    """One-function sharp estimates and the d = 5 energy quotient."""
    cases = []
    d = args.d or 5
    prof = P.wave_profile(d, -1.0)
    rep = FN.onesided_quotient(prof)
    cases.append(
        _case("corollary", f"onesided_extremal_d{d}", rep.lhs, rep.rhs, rep.constant,
              abs(rep.deficit) < 5e-3)
    )
    if d == 5:
        ev = PR.RadialEvaluator(prof)
        val, err = FN.product_l2_sq([ev, ev])
        target = 1.0 / (6144.0 * math.pi ** 8)
        cases.append(
            _case("corollary", "quartic_norm_d5", val, target, 1.0,
                  abs(val - target) <= 5e-3 * target)
        )
        fp, fm = P.canonical_energy_pair()
        erep = FN.energy_quotient(fp, fm)
        cases.append(
            _case("corollary", "energy_quotient_canonical", erep.lhs, erep.rhs,
                  erep.constant, abs(erep.deficit) < 5e-3)
        )
        broken = FN.energy_quotient(fp, replace(fm, a=-1.3))
        cases.append(
            _case("corollary", "energy_quotient_broken", broken.lhs, broken.rhs,
                  broken.constant, broken.strict())
        )
        gap = FN.cross_term_gap("paper")
        cases.append(
            _case("corollary", "cross_term_gap_d2", gap["numerator"], gap["denominator"],
                  1.0, (1.0 - gap["ratio"]) > 10.0 * gap["err"])
        )
    return cases


def suite_schro_identity(args):
    res = FN.schro_identity_check(n=args.grid, t_half=3.0)
    ok = res["rel_err"] < 0.01
    case = _case("schrodinger-identity", f"grid{args.grid}", res["lhs"], res["rhs"], 1.0, ok)
    mixed = FN.mixed_norm_quotient(P.schrodinger_profile(4, -1.0))
    case2 = _case("schrodinger-identity", "mixed_norm_gaussian_d4", mixed.lhs, mixed.rhs,
                  mixed.constant, abs(mixed.deficit) < 1e-4)
    return [case, case2]


def suite_search(args):
    d, k, family = args.d or 4, args.k or 2, args.family or C.SCHRODINGER
    cfg = SearchConfig(budget=args.budget, seed=args.seed, restarts=args.restarts)
    prof, trace, diag = run_search(d, k, family, cfg)
    qs = trace.quotients
    monotone = all(qs[i] <= qs[i + 1] + 1e-12 for i in range(len(qs) - 1))
    no_super = max(qs) <= 1.0 + 5e-3
    ok = diag["best_quotient"] >= 0.99 and monotone and no_super
    if args.trace_csv:
        trace_to_csv(trace, args.trace_csv)
    return [
        _case("search", f"{family}_d{d}_k{k}", diag["best_quotient"], 1.0, 1.0, ok,
              seed=args.seed, fit_residual=diag["fit_residual"],
              evaluations=diag["evaluations"], terminated_by=trace.terminated_by)
    ]


def suite_audit(args):
    """Geometry invariances and the symmetry behaviour of the quotients."""
    rng = np.random.Generator(np.random.Philox(key=np.array([np.uint64(args.seed), np.uint64(2)])))
    cases = []
    worst_form, worst_det, worst_group = 0.0, 0.0, 0.0
    for d in (2, 3, 5):
        for _ in range(200):
            v = rng.normal(size=d)
            v *= rng.random() ** 0.5 * 0.95 / max(np.linalg.norm(v), 1e-12)
            p = ConePoint(rng.normal() * 3.0, rng.normal(size=d))
            q = lorentz_boost(v, p)
            rho0, rho1 = minkowski_form(p), minkowski_form(q)
            worst_form = max(worst_form, abs(rho1 - rho0) / max(abs(rho0), 1e-12))
            worst_det = max(worst_det, abs(abs(np.linalg.det(boost_matrix(v))) - 1.0))
            back = lorentz_boost(-v, q)
            worst_group = max(
                worst_group,
                abs(back.tau - p.tau) + float(np.max(np.abs(back.xi - p.xi))),
            )
    cases.append(_case("audit", "lorentz_form_invariance", worst_form, 1e-10, 1.0,
                       worst_form < 1e-10, seed=args.seed))
    cases.append(_case("audit", "boost_determinant", worst_det, 1e-10, 1.0,
                       worst_det < 1e-10, seed=args.seed))
    cases.append(_case("audit", "boost_group_inverse", worst_group, 1e-9, 1.0,
                       worst_group < 1e-9, seed=args.seed))
    worst_par = 0.0
    for _ in range(200):
        xi = rng.normal(size=3)
        pt = ConePoint(float(np.dot(xi, xi)), xi)
        img = galilean_map(rng.normal(size=3), pt)
        worst_par = max(worst_par, abs(img.tau - float(np.dot(img.xi, img.xi))))
    cases.append(_case("audit", "galilean_paraboloid", worst_par, 1e-12, 1.0,
                       worst_par < 1e-12, seed=args.seed))

    # Translations, rescalings and phases leave the d = 5 quotient
    # unchanged to quadrature noise.
    base = P.wave_profile(5, -1.0)
    q0 = FN.onesided_quotient(base).ratio
    elements = {
        "translate": P.Translate(t0=0.7, x0=(0.0,) * 5),
        "rescale": P.Scaling(lam1=1.3, lam2=2.0),
        "phase": P.Phase(theta=1.1),
    }
    worst_w = 0.0
    for name, g in elements.items():
        q1 = FN.onesided_quotient(P.symmetry_apply(g, base)).ratio
        worst_w = max(worst_w, abs(q1 - q0) / q0)
    cases.append(_case("audit", "wave_symmetry_invariance", worst_w, 1e-6, 1.0,
                       worst_w < 1e-6))

    # Translations, rescalings and phases preserve the mixed-norm
    # quotient; the Galilean boost does not.
    sbase = P.schrodinger_profile(4, -1.0)
    qs0 = FN.mixed_norm_quotient(sbase).ratio
    worst_s = 0.0
    for g in (P.Translate(t0=0.5, x0=(0.2, 0.0, 0.0, 0.0)), P.Scaling(1.2, 1.5),
              P.Phase(0.8)):
        worst_s = max(worst_s, abs(FN.mixed_norm_quotient(P.symmetry_apply(g, sbase)).ratio - qs0))
    galilean = abs(FN.mixed_norm_quotient(
        P.symmetry_apply(P.GalileanBoost((0.3, 0.0, 0.0, 0.0)), sbase)).ratio - qs0)
    cases.append(_case("audit", "schro_symmetry_invariance", worst_s, 1e-9, 1.0,
                       worst_s < 1e-9))
    cases.append(_case("audit", "galilean_breaks_mixed_quotient", galilean, 1e-3, 1.0,
                       galilean > 1e-3))
    return cases


SUITES = {
    "constants": suite_constants,
    "shells": suite_shells,
    "bilinear": suite_bilinear,
    "corollary": suite_corollary,
    "schrodinger-identity": suite_schro_identity,
    "search": suite_search,
    "audit": suite_audit,
}


def _load_config(path):
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def build_parser():
    ap = argparse.ArgumentParser(
        prog="strichartz-lab",
        description="Numerical verification suites for sharp wave/Schrodinger estimates",
    )
    ap.add_argument("command", choices=list(SUITES) + ["all"])
    ap.add_argument("--config", help="flat key=value file; flags override")
    ap.add_argument("--d", type=int)
    ap.add_argument("--k", type=int)
    ap.add_argument("--family", choices=list(C.FAMILIES))
    ap.add_argument("--point", help="cone point as tau,x1,...,xd")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--epsilon", type=float, default=1e-3)
    ap.add_argument("--grid", type=int, default=4096)
    ap.add_argument("--budget", type=int, default=300)
    ap.add_argument("--restarts", type=int, default=3)
    ap.add_argument("--random-cases", type=int, default=5)
    ap.add_argument("--trace-csv")
    ap.add_argument("--out", help="JSON-lines report path")
    ap.add_argument("--out-csv", help="CSV output (constants table)")
    ap.add_argument("--meta-out", help="separate metadata file (timestamps et al.)")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        actions = {a.dest: a for a in ap._actions}
        for key, val in _load_config(args.config).items():
            if key not in actions:
                ap.error(f"unknown config key {key!r}")
            if getattr(args, key) == ap.get_default(key):  # flag not explicitly set
                caster = actions[key].type or str
                setattr(args, key, caster(val))

    started = time.time()
    names = list(SUITES) if args.command == "all" else [args.command]
    cases = []
    for name in names:
        cases.extend(SUITES[name](args))

    failed = [c for c in cases if not c["pass"]]
    for c in cases:
        status = "PASS" if c["pass"] else "FAIL"
        print(f"[{status}] {c['suite']}/{c['case_id']}: ratio={c['ratio']:.6g} "
              f"deficit={c['deficit']:.3g}")
    print(f"{len(cases) - len(failed)}/{len(cases)} cases passed")

    if args.out:
        with open(args.out, "w") as fh:
            for c in cases:
                fh.write(FN.json_line(c) + "\n")
    if args.meta_out:
        with open(args.meta_out, "w") as fh:
            fh.write(FN.json_line({
                "elapsed_seconds": time.time() - started,
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
                "argv": list(sys.argv[1:]),
            }) + "\n")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

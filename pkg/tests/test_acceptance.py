"""Acceptance criteria 1-11.  Each test prints one PASS/FAIL line."""
import json
import time

import numpy as np
import pytest
import sympy as sym

from robin_torsion.analysis import (monotonicity_report, overdetermined_residual,
                                    reflected_difference, symmetry_residual,
                                    tangential_identity_residual)
from robin_torsion import analysis
from robin_torsion.cli import main
from robin_torsion.corners import CornerFrame, fit_corner, fit_samples, synthetic_field
from robin_torsion.geometry import Disk, Ellipse, RoundedCrossPolygon, build_family
from robin_torsion.mesh import mesh_domain, refine
from robin_torsion.solver import RobinProblem, exact_disk_solution, solve
from robin_torsion.sweep import atlas, certify_path, cross_grid, rounding_study

from conftest import solve_on


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def orders(h, err):
    h, err = np.asarray(h), np.asarray(err)
    return np.log(err[:-1] / err[1:]) / np.log(h[:-1] / h[1:])


def test_criterion_01_disk_convergence(report):
    t0 = time.perf_counter()
    ex = exact_disk_solution(1.0)
    mesh = mesh_domain(Disk(), 0.2)
    hs, eu, ej, eg = [], [], [], []
    for level in range(5):
        sol = solve(RobinProblem(mesh, 1.0))
        b = mesh.boundary_nodes()
        hs.append(mesh.h)
        eu.append(np.max(np.abs(sol.u - ex(mesh.nodes))))
        ej.append(abs(sol.energy - ex.energy))
        eg.append(np.max(np.hypot(*(sol.gradient[b] - ex.gradient(mesh.nodes[b])).T)))
        if level < 4:
            mesh = refine(mesh)
    runtime = time.perf_counter() - t0
    ou, oj, og = orders(hs, eu), orders(hs, ej), orders(hs, eg)
    ok = (np.all(np.abs(ou - 2) <= 0.3) and np.all(np.abs(oj - 2) <= 0.3)
          and np.all(np.abs(og - 1) <= 0.3) and runtime < 60)
    report(1, ok, f"L-inf orders {np.round(ou, 3).tolist()}, energy {np.round(oj, 3).tolist()}, "
                  f"boundary gradient {np.round(og, 3).tolist()}, {runtime:.1f} s")


def test_criterion_02_symmetry(report, disk_fine, ellipse_05, peanut_05, cross_square,
                               cross_tall):
    sols = [disk_fine, ellipse_05, peanut_05, cross_square, cross_tall,
            solve_on(Ellipse(2, 1), 0.05, mode="neumann"),
            solve_on(RoundedCrossPolygon(1.5, 3, 0.1), 0.04, (0.5, 3))]
    worst = max(symmetry_residual(s) for s in sols)
    report(2, worst <= 1e-12, f"max symmetry residual over {len(sols)} solves = {worst:.2e}")


def test_criterion_03_positive_cases(report, tmp_path, capsys):
    lines, ok = [], True
    for name, cfg in (("ellipse", '{"kind":"ellipse","a":2,"b":1}'),
                      ("peanut", '{"kind":"peanut","min_curvature":-0.5}')):
        for h in (0.05, 0.025):
            out = tmp_path / f"{name}{h}"
            code = main(["check", "--domain", cfg, "--beta", "1", "--h", str(h),
                         "--out", str(out)])
            capsys.readouterr()
            doc = json.loads((out / "report.json").read_text())
            mono = doc["monotonicity"]
            bsc = doc["boundary_sign_checks"]
            good = (code == 0 and mono["verdict"] == "monotone"
                    and mono["margin"] > 2 * mono["threshold"]
                    and bsc["boundary_monotone"] and bsc["axis_concave"])
            ok &= good
            lines.append(f"{name} h={h}: exit {code} margin {mono['margin']:.3f} "
                         f"2tau {2 * mono['threshold']:.3f}")
    report(3, ok, "; ".join(lines))


def test_criterion_04_square_cross(report, cross_square):
    r2 = monotonicity_report(cross_square, direction=2)
    r1 = monotonicity_report(cross_square, direction=1)
    fit = fit_corner(cross_square)
    fine = solve(RobinProblem(refine(cross_square.mesh), 1.0))
    fit_fine = fit_corner(fine)
    ok = (r2.verdict == "monotone" and r1.verdict == "monotone" and abs(fit.c1) <= 1e-2
          and abs(fit_fine.c1) < abs(fit.c1))
    report(4, ok, f"verdicts x2 {r2.verdict} x1 {r1.verdict}; |c1| {abs(fit.c1):.2e} -> "
                  f"{abs(fit_fine.c1):.2e} after refinement")


def test_criterion_05_tall_cross(report, cross_tall):
    sol = cross_tall
    h = sol.mesh.h
    rep = monotonicity_report(sol)
    images = np.array([[1.0, 1.0], [-1.0, 1.0]])
    pts = np.array([[v["x"], v["y"]] for v in rep.violations])
    dist = np.min(np.hypot(pts[:, None, 0] - images[None, :, 0],
                           pts[:, None, 1] - images[None, :, 1]), axis=1)
    fit = fit_corner(sol)
    idx, _, _ = analysis.tested_elements(sol, axis_band=3 * h, direction=1)
    d1 = sol.element_gradients[idx, 0]
    rd = reflected_difference(sol)
    ok = (rep.verdict == "violated" and len(pts) > 0 and np.all(dist < 0.3)
          and fit.c1 < 0 and abs(fit.c1) > 3 * fit.stderr[1]
          and np.all(d1 < 0) and rd.max < 0)
    report(5, ok, f"{rep.verdict}, {len(pts)} violations all within {dist.max():.3f} of "
                  f"(+-1, 1); c1 {fit.c1:.4f} +- {fit.stderr[1]:.1e}; max d1u "
                  f"{d1.max():.2e} on {len(idx)} elements; max w {rd.max:.2e}")


def _rounded(rho):
    return rounding_study(1.5, 3.0, 1.0, [rho], h=0.0125)["rows"][0]


def test_criterion_06_rounded_cross(report):
    rhos = (0.2, 0.1, 0.05)
    rows = [_rounded(r) for r in rhos]
    shape_ok = all(RoundedCrossPolygon(1.5, 3.0, r).smooth for r in rhos)
    a1_ok = all(RoundedCrossPolygon(1.5, 3.0, r).check_A1() for r in rhos)
    a2_neg = all(r["margin_A2"] < 0 for r in rows)
    gaps = [r["gap"] for r in rows]
    ok = shape_ok and a1_ok and a2_neg and all(g is not None and g > 0 for g in gaps)
    report(6, ok, f"gaps at delta 0.1: {[round(g, 4) for g in gaps]}; smooth {shape_ok}; "
                  f"A1 {a1_ok}; A2 margins {[r['margin_A2'] for r in rows]}")


def test_criterion_07_certificate(report):
    t0 = time.perf_counter()
    fam = build_family(Disk(), Ellipse(2, 1), 1.0)
    cert = certify_path(fam, n_t=17, h=0.05)
    runtime = time.perf_counter() - t0
    a2 = all(p["A2_holds"] for p in cert.points)
    ok = cert.holds and a2 and len(cert.points) == 17 and runtime < 600
    report(7, ok, f"certificate {cert.status}, min margin {cert.min_margin:.3f}, "
                  f"A2 on all t {a2}, {runtime:.1f} s")


def test_criterion_08_overdetermined(report):
    disk = [overdetermined_residual(solve_on(Disk(), h)) for h in (0.05, 0.025, 0.0125)]
    sds = [r.stddev for r in disk]
    ell = [overdetermined_residual(solve_on(Ellipse(2, 1), h)).stddev for h in (0.05, 0.025)]
    ok = (sds[0] > sds[1] > sds[2] and sds[2] <= 1e-3
          and abs(disk[-1].mean + 0.5) <= 1e-3 and min(ell) > 1e-2)
    report(8, ok, f"disk stddev {[f'{s:.1e}' for s in sds]}, mean {disk[-1].mean:.6f}; "
                  f"ellipse stddev {[round(s, 4) for s in ell]}")


def test_criterion_09_identity_residual(report):
    maxes = [tangential_identity_residual(solve_on(Ellipse(2, 1), h)).max
             for h in (0.1, 0.05, 0.025, 0.0125)]
    x1, x2, beta = sym.symbols("x1 x2 beta", positive=True)
    t = sym.symbols("t", real=True)
    u = 1 / (2 * beta) + (1 - x1 ** 2 - x2 ** 2) / 4
    H = sym.hessian(u, (x1, x2))
    g = sym.Matrix([sym.diff(u, x1), sym.diff(u, x2)])
    tau = sym.Matrix([-sym.sin(t), sym.cos(t)])
    nu = sym.Matrix([sym.cos(t), sym.sin(t)])
    expr = (tau.T * H * nu)[0] + (1 + beta) * (g.T * tau)[0]
    exact = sym.simplify(expr.subs({x1: sym.cos(t), x2: sym.sin(t)}))
    ok = all(a > b for a, b in zip(maxes, maxes[1:])) and exact == 0
    report(9, ok, f"ellipse max residual {[f'{m:.2e}' for m in maxes]}; disk oracle "
                  f"symbolic residual {exact}")


def test_criterion_10_corner_fitter(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        c = rng.uniform(-10, 10, 4)
        beta = rng.uniform(0.2, 5.0)
        r = np.sqrt(rng.uniform(0.02 ** 2, 0.25 ** 2, 1200))
        th = rng.uniform(-1.5 * np.pi, 0, 1200)
        pts = CornerFrame().point(r, th)
        fit = fit_samples(pts, synthetic_field(c, beta)(pts), beta, 0.02, 0.25)
        worst = max(worst, float(np.max(np.abs(fit.coefficients - c))))
    report(10, worst <= 1e-8, f"max coefficient error over 100 trials {worst:.1e}")


def test_criterion_11_determinism(report, tmp_path):
    grid = cross_grid([1.25, 1.5, 2.0], [1.5, 2.0, 3.0], betas=(0.5, 1.0), h=0.1,
                      grading=(0.5, 3))
    a, b = tmp_path / "w1.jsonl", tmp_path / "w8.jsonl"
    atlas(grid, a, workers=1)
    atlas(grid, b, workers=8)
    same = a.read_bytes() == b.read_bytes()
    same_csv = a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()
    report(11, same and same_csv, f"{len(grid)} records; store identical {same}, "
                                  f"CSV identical {same_csv}")

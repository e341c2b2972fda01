"""Command line front end.

Exit codes: 0 success or monotone, 2 configuration error, 3 solver
failure, 4 corner-fit mismatch, 5 meshing failure, 6 patch failure,
10 violated, 11 inconclusive.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, corners, geometry, sweep
from .geometry import (CrossPolygon, DomainError, build_family, build_radial_family,
                       domain_from_config)
from .mesh import Grading, MeshError, mesh_domain, refine, write_mesh
from .solver import PatchError, RobinProblem, SolverError, exact_disk_solution, solve

EXIT_CONFIG, EXIT_SOLVER, EXIT_FIT, EXIT_MESH, EXIT_PATCH = 2, 3, 4, 5, 6
EXIT_VERDICT = {"monotone": 0, "holds": 0, "violated": 10, "fails": 10, "inconclusive": 11}


class ConfigError(ValueError):
    pass


def _pair(text, name, cast=float):
    try:
        a, b = text.split(",")
        return cast(a), cast(b)
    except ValueError:
        raise ConfigError(f"--{name} expects two comma-separated values, got {text!r}")


def _domain(text) -> dict:
    if text is None:
        raise ConfigError("--domain is required")
    p = Path(text)
    try:
        raw = p.read_text() if not text.lstrip().startswith("{") and p.exists() else text
        cfg = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--domain is neither a JSON object nor a readable file: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("--domain must describe a JSON object")
    return cfg


def resolve(args) -> dict:
    """Fully resolved run configuration (echoed into the manifest)."""
    cfg = {"command": args.command}
    if hasattr(args, "beta"):
        if not args.beta > 0:
            raise ConfigError("beta must satisfy beta > 0")
        cfg["beta"] = args.beta
    if getattr(args, "h", None) is not None:
        if not args.h > 0:
            raise ConfigError("h must be positive")
        cfg["h"] = args.h
    if hasattr(args, "domain") and args.command not in ("convergence", "sweep", "atlas"):
        cfg["domain"] = _domain(args.domain)
    if getattr(args, "grading", None):
        q, L = _pair(args.grading, "grading")
        if L != int(L):
            raise ConfigError("--grading levels must be an integer")
        cfg["grading"] = [q, int(L)]
    for name in ("axis_band", "corner_radius", "mode", "workers", "levels", "family", "nt",
                 "grid", "delta", "resume"):
        if hasattr(args, name):
            cfg[name] = getattr(args, name)
    if getattr(args, "annulus", None):
        cfg["annulus"] = list(_pair(args.annulus, "annulus"))
    return cfg


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out: Path, cfg: dict, files) -> None:
    man = {"config": cfg,
           "outputs": {Path(f).name: _sha256(f) for f in sorted(files, key=str)}}
    (out / "manifest.json").write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")


def _grading(cfg):
    return Grading(*cfg["grading"]) if cfg.get("grading") else None


def _solve(cfg):
    dom = domain_from_config(cfg["domain"])
    mesh = mesh_domain(dom, cfg["h"], _grading(cfg))
    sol = solve(RobinProblem(mesh, cfg["beta"], cfg.get("mode", "robin")))
    return dom, mesh, sol


def _json(obj):
    if isinstance(obj, dict):
        return {k: _json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _dump(path, obj):
    Path(path).write_text(json.dumps(_json(obj), indent=2, sort_keys=True) + "\n")


# -- subcommands --------------------------------------------------------------

def cmd_solve(args, cfg, out):
    dom, mesh, sol = _solve(cfg)
    field_path, mesh_path = out / "field.csv", out / "mesh.txt"
    sol.write_field(field_path)
    write_mesh(mesh, mesh_path)
    write_manifest(out, cfg, [field_path, mesh_path])
    print(f"J = {sol.energy:.17g}")
    print(f"nodes {mesh.n_nodes}  triangles {mesh.n_tris}  h {mesh.h:.6g}  "
          f"iterations {sol.iterations}  residual {sol.residual:.3e}")
    print(f"min u {sol.u.min():.17g}  max u {sol.u.max():.17g}  "
          f"symmetry {analysis.symmetry_residual(sol):.3e}")
    return 0


def cmd_check(args, cfg, out):
    dom, mesh, sol = _solve(cfg)
    rep = analysis.monotonicity_report(sol, cfg.get("axis_band"), cfg.get("corner_radius"))
    doc = {"monotonicity": rep.to_dict(),
           "symmetry_residual": analysis.symmetry_residual(sol),
           "energy": sol.energy}
    if isinstance(dom, CrossPolygon):
        doc["condition_A2"] = {"holds": False, "margin": None,
                               "note": "reentrant vertices have unbounded negative curvature"}
        doc["monotonicity_x1"] = analysis.monotonicity_report(
            sol, cfg.get("axis_band"), cfg.get("corner_radius"), direction=1).to_dict()
    else:
        a2 = geometry.check_condition_A2(cfg["beta"], geometry.boundary_trace(dom, 2048))
        doc["condition_A2"] = {"holds": a2.holds, "margin": a2.margin}
    if getattr(dom, "smooth", False):
        doc["boundary_sign_checks"] = analysis.boundary_sign_checks(sol)
        doc["overdetermined"] = analysis.overdetermined_residual(sol).summary()
        doc["tangential_identity"] = analysis.tangential_identity_residual(sol).summary()
    path = out / "report.json"
    _dump(path, doc)
    write_manifest(out, cfg, [path])
    print(f"verdict {rep.verdict}  worst {rep.worst:.6g} at ({rep.worst_at[0]:.6g}, "
          f"{rep.worst_at[1]:.6g})  margin {rep.margin:.6g}  threshold {rep.threshold:.6g}")
    for v in rep.violations[:10]:
        print(f"  violation at ({v['x']:.6g}, {v['y']:.6g}) value {v['value']:.6g}")
    return EXIT_VERDICT[rep.verdict]


def cmd_corner_fit(args, cfg, out):
    dom, mesh, sol = _solve(cfg)
    fit = corners.fit_corner(sol, annulus=cfg.get("annulus"))
    fit_path, cmp_path = out / "corner_fit.json", out / "asymptote.csv"
    _dump(fit_path, fit.to_dict())
    radii = np.geomspace(max(fit.r_min, 3 * mesh.local_size(corners.VERTEX)), fit.r_max, 9)
    table = corners.asymptote_vs_field(sol, fit, radii)
    corners.write_comparison(table, cmp_path)
    write_manifest(out, cfg, [fit_path, cmp_path])
    c, e = fit.coefficients, fit.stderr
    for i in range(4):
        print(f"c{i} = {c[i]: .10f} +- {e[i]:.2e}")
    print(f"annulus [{fit.r_min:g}, {fit.r_max:g}]  samples {fit.n_samples}  "
          f"residual {fit.residual:.3e}  deviation order {table['order']:.3f}")
    return 0


FAMILIES = {
    "disk-to-ellipse": lambda beta: build_family(geometry.Disk(), geometry.Ellipse(2, 1), beta),
    "disk-to-peanut": lambda beta: build_radial_family(
        geometry.Disk(), geometry.Peanut.with_min_curvature(-0.5), beta),
    "constant-disk": lambda beta: sweep.ConstantFamily(geometry.Disk(), beta),
}


def cmd_sweep(args, cfg, out):
    if cfg["family"] not in FAMILIES:
        raise ConfigError(f"unknown family {cfg['family']!r}; choose from {sorted(FAMILIES)}")
    fam = FAMILIES[cfg["family"]](cfg["beta"])
    cert = sweep.certify_path(fam, cfg["nt"], cfg.get("h") or 0.05, cfg["beta"], _grading(cfg))
    doc = cert.to_dict()
    for p in doc["points"]:
        p.pop("runtime", None)
    path = out / "certificate.json"
    _dump(path, doc)
    write_manifest(out, cfg, [path])
    for p in cert.points:
        print(f"t={p['t']:.4f}  {p['verdict']:<12}  margin {p['margin']:.6g}  "
              f"threshold {p['threshold']:.6g}  A2 {p['A2_margin']:.4g}")
    print(f"certificate {cert.status.upper()}  min margin {cert.min_margin:.6g}")
    return EXIT_VERDICT[cert.status]


GRIDS = {
    "ab_default": ([1.25, 1.5, 2.0], [1.25, 1.5, 2.0, 3.0]),
    "ab_small": ([1.5, 2.0], [1.5, 2.0]),
}


def cmd_atlas(args, cfg, out):
    if cfg["grid"] not in GRIDS:
        raise ConfigError(f"unknown grid {cfg['grid']!r}; choose from {sorted(GRIDS)}")
    a_vals, b_vals = GRIDS[cfg["grid"]]
    grading = cfg.get("grading", [0.5, 8])
    grid = sweep.cross_grid(a_vals, b_vals, args.betas, cfg.get("h") or 0.02, grading,
                            cfg.get("delta", 0.1))
    cfg["betas"] = list(args.betas)
    store = out / "records.jsonl"
    recs = sweep.atlas(grid, store, workers=cfg["workers"], resume=cfg["resume"],
                       timings=args.timings)
    write_manifest(out, cfg, [store, store.with_suffix(".csv")])
    for r in recs:
        d = r.params["domain"]
        print(f"a={d['a']:g} b={d['b']:g} beta={r.params['beta']:g}  {r.status}  "
              f"{r.verdict}  c1={r.c1}")
    return 0


def cmd_convergence(args, cfg, out):
    beta = cfg["beta"]
    ex = exact_disk_solution(beta)
    mesh = mesh_domain(geometry.Disk(), cfg.get("h") or 0.2)
    rows = []
    for level in range(cfg["levels"] + 1):
        sol = solve(RobinProblem(mesh, beta))
        b = mesh.boundary_nodes()
        rows.append([mesh.h, float(np.max(np.abs(sol.u - ex(mesh.nodes)))),
                     abs(sol.energy - ex.energy),
                     float(np.max(np.hypot(*(sol.gradient[b] - ex.gradient(mesh.nodes[b])).T)))])
        if level < cfg["levels"]:
            mesh = refine(mesh)
    rows = np.array(rows)
    orders = np.log(rows[:-1, 1:] / rows[1:, 1:]) / np.log(rows[:-1, :1] / rows[1:, :1])
    path = out / "convergence.csv"
    np.savetxt(path, rows, fmt="%.17g", delimiter=",", header="h,err_u,err_J,err_grad_bdry",
               comments="")
    write_manifest(out, cfg, [path])
    print("h          err_u        err_J        err_grad")
    for r in rows:
        print(f"{r[0]:.5f}  {r[1]:.4e}  {r[2]:.4e}  {r[3]:.4e}")
    for name, col in zip(("L-inf", "energy", "boundary gradient"), orders.T):
        print(f"{name} orders: " + " ".join(f"{o:.3f}" for o in col))
    return 0


COMMANDS = {"solve": cmd_solve, "check": cmd_check, "corner-fit": cmd_corner_fit,
            "sweep": cmd_sweep, "atlas": cmd_atlas, "convergence": cmd_convergence}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robin-torsion",
                                 description="Robin torsion monotonicity laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, domain=True, h=None):
        if domain:
            p.add_argument("--domain", help="inline JSON or path to a JSON file")
        p.add_argument("--beta", type=float, default=1.0)
        p.add_argument("--h", type=float, default=h)
        p.add_argument("--grading", help="q,L geometric corner grading")
        p.add_argument("--out", default=".", help="output directory")

    for name in ("solve", "check", "corner-fit"):
        p = sub.add_parser(name)
        common(p, h=0.05)
        p.add_argument("--mode", choices=("robin", "neumann"), default="robin")
        if name == "check":
            p.add_argument("--axis-band", type=float, default=None)
            p.add_argument("--corner-radius", type=float, default=None)
        if name == "corner-fit":
            p.add_argument("--annulus", help="rmin,rmax")
    p = sub.add_parser("sweep")
    common(p, domain=False, h=0.05)
    p.add_argument("--family", default="disk-to-ellipse")
    p.add_argument("--nt", type=int, default=17)
    p = sub.add_parser("atlas")
    common(p, domain=False, h=0.02)
    p.add_argument("--grid", default="ab_default")
    p.add_argument("--betas", type=float, nargs="+", default=[1.0])
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--timings", default=None, help="optional run-time sidecar file")
    p = sub.add_parser("convergence")
    common(p, domain=False, h=0.2)
    p.add_argument("--levels", type=int, default=4)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = resolve(args)
        if getattr(args, "command") == "corner-fit" and cfg["domain"].get("kind") != "cross":
            raise ConfigError("corner-fit needs a cross domain")
        if args.command == "convergence" and cfg["levels"] < 3:
            raise ConfigError("convergence needs at least 3 refinements")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, cfg, out)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except corners.CornerFitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except SolverError as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except MeshError as exc:
        print(f"error: meshing failed: {exc}", file=sys.stderr)
        return EXIT_MESH
    except PatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PATCH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

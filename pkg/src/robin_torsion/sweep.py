"""Deformation certificates, parameter atlases and the corner-rounding study.

Atlas records are keyed by their parameter tuple and written sorted by
key, so the record file does not depend on the number of workers or on
completion order.  Wall-clock times can go to an optional sidecar file.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import boundary_sign_checks, counterexample_probe, monotonicity_report
from .corners import CornerFitError, fit_corner
from .geometry import (CrossPolygon, DomainError, RoundedCrossPolygon, boundary_trace,
                       check_condition_A2, domain_from_config)
from .mesh import Grading, MeshError, mesh_domain
from .solver import RobinProblem, SolverError, solve

CSV_COLUMNS = ["domain", "a", "b", "beta", "rho", "t", "h", "verdict", "worst", "x", "y",
               "c1", "c1_err", "margin_A2", "gap", "status"]


def record_key(params: dict) -> str:
    return json.dumps(params, sort_keys=True, separators=(",", ":"))


def a2_margin(domain, beta: float):
    """``beta + min kappa``; ``None`` for polygons, whose reentrant vertices
    have unbounded negative curvature."""
    if isinstance(domain, CrossPolygon):
        return None
    return check_condition_A2(beta, boundary_trace(domain, 2048)).margin


@dataclass
class SweepRecord:
    key: str
    params: dict
    status: str = "ok"
    verdict: str | None = None
    worst: float | None = None
    worst_at: list | None = None
    margin: float | None = None
    threshold: float | None = None
    n_violations: int | None = None
    verdict_x1: str | None = None
    c1: float | None = None
    c1_err: float | None = None
    margin_A2: float | None = None
    gap: float | None = None
    iterations: int | None = None
    residual: float | None = None
    n_nodes: int | None = None
    n_tris: int | None = None
    error: str | None = None
    runtime: float = field(default=0.0, repr=False)

    def to_json(self) -> str:
        d = {k: v for k, v in self.__dict__.items() if k != "runtime"}
        return json.dumps(d, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "SweepRecord":
        return cls(**json.loads(line))

    def csv_row(self) -> list:
        dom = self.params.get("domain", {})
        x, y = (self.worst_at or [None, None])
        vals = [dom.get("kind"), dom.get("a"), dom.get("b"), self.params.get("beta"),
                dom.get("rho"), self.params.get("t"), self.params.get("h"), self.verdict,
                self.worst, x, y, self.c1, self.c1_err, self.margin_A2, self.gap,
                self.status]
        return ["" if v is None else (f"{v:.17g}" if isinstance(v, float) else str(v))
                for v in vals]


def _grading(params):
    g = params.get("grading")
    return None if g is None else Grading(*g)


def evaluate(params: dict, domain=None) -> SweepRecord:
    """Solve one parameter point and summarise it; failures become records."""
    key = record_key(params)
    t0 = time.perf_counter()
    rec = SweepRecord(key=key, params=params)
    try:
        dom = domain if domain is not None else domain_from_config(params["domain"])
        beta = float(params["beta"])
        mesh = mesh_domain(dom, float(params["h"]), _grading(params))
        sol = solve(RobinProblem(mesh, beta))
        rep = monotonicity_report(sol)
        rec.verdict, rec.worst, rec.worst_at = rep.verdict, rep.worst, list(rep.worst_at)
        rec.margin, rec.threshold = rep.margin, rep.threshold
        rec.n_violations = len(rep.violations)
        rec.iterations, rec.residual = sol.iterations, sol.residual
        rec.n_nodes, rec.n_tris = mesh.n_nodes, mesh.n_tris
        rec.margin_A2 = a2_margin(dom, beta)
        if isinstance(dom, (CrossPolygon, RoundedCrossPolygon)):
            rec.verdict_x1 = monotonicity_report(sol, direction=1).verdict
            delta = float(params.get("delta", 0.1))
            if 3.0 * mesh.h < delta < 0.3:
                rec.gap = counterexample_probe(sol, delta)["gap"]
        if isinstance(dom, CrossPolygon):
            try:
                fit = fit_corner(sol)
                rec.c1, rec.c1_err = fit.c1, float(fit.stderr[1])
            except CornerFitError as exc:
                rec.error = f"corner fit: {exc}"
    except (DomainError, MeshError, SolverError, ValueError) as exc:
        rec.status = "failed"
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.runtime = time.perf_counter() - t0
    return rec


# -- record store -------------------------------------------------------------

def read_store(path) -> dict:
    """Records by key; a truncated final line is ignored."""
    out = {}
    p = Path(path)
    if not p.exists():
        return out
    for line in p.read_text().splitlines():
        if not line.strip():
            continue
        try:
            rec = SweepRecord.from_json(line)
        except (json.JSONDecodeError, TypeError):
            continue
        out[rec.key] = rec
    return out


def write_store(path, records) -> None:
    recs = sorted(records, key=lambda r: r.key)
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w") as fh:
        for r in recs:
            fh.write(r.to_json() + "\n")
    os.replace(tmp, path)


def csv_projection(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(records, key=lambda r: r.key):
        w.writerow(r.csv_row())
    return buf.getvalue()


def cross_grid(a_values, b_values, betas=(1.0,), h: float = 0.02, grading=(0.5, 8),
               delta: float = 0.1) -> list:
    grid = []
    for a, b, beta in itertools.product(a_values, b_values, betas):
        grid.append({"domain": {"kind": "cross", "a": float(a), "b": float(b)},
                     "beta": float(beta), "h": float(h),
                     "grading": None if grading is None else list(grading),
                     "delta": float(delta)})
    return grid


def atlas(grid, out, workers: int = 1, resume: bool = True, timings=None) -> list:
    """Evaluate every grid point and store the records at ``out`` (JSON lines).

    A CSV projection is written next to the store.  Run times are appended
    to ``timings`` when given.  Existing keys are skipped when ``resume``.
    """
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    done = read_store(out) if resume else {}
    if not resume and out.exists():
        out.unlink()
    todo, seen = [], set(done)
    for p in grid:
        k = record_key(p)
        if k not in seen:
            todo.append(p)
            seen.add(k)
    times = {}
    with open(out, "a") as journal:
        if workers <= 1 or len(todo) <= 1:
            results = map(evaluate, todo)
            ex = None
        else:
            ex = ProcessPoolExecutor(max_workers=workers)
            results = ex.map(evaluate, todo)
        try:
            for rec in results:
                done[rec.key] = rec
                times[rec.key] = rec.runtime
                journal.write(rec.to_json() + "\n")
                journal.flush()
        finally:
            if ex is not None:
                ex.shutdown()
    records = list(done.values())
    write_store(out, records)
    out.with_suffix(".csv").write_text(csv_projection(records))
    if timings is not None:
        with open(timings, "a") as fh:
            for k in sorted(times):
                fh.write(json.dumps({"key": k, "runtime": times[k]}) + "\n")
    return sorted(records, key=lambda r: r.key)


# -- continuity certificate ---------------------------------------------------

@dataclass
class PathCertificate:
    status: str                 # holds | fails | inconclusive
    min_margin: float
    points: list
    offending: list

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    def to_dict(self) -> dict:
        return {"status": self.status, "min_margin": self.min_margin,
                "points": self.points, "offending": self.offending}


def certify_path(family, n_t: int = 17, h: float = 0.05, beta: float | None = None,
                 grading=None) -> PathCertificate:
    """Check the monotonicity certificate at ``n_t`` equispaced family members."""
    if n_t < 9:
        raise ValueError("a path certificate needs at least 9 t-points")
    beta = family.beta if beta is None else beta
    points, offending = [], []
    status = "holds"
    for t in np.linspace(0.0, 1.0, n_t):
        t0 = time.perf_counter()
        dom = family(float(t))
        a2 = check_condition_A2(beta, boundary_trace(dom, 2048))
        mesh = mesh_domain(dom, h, grading)
        sol = solve(RobinProblem(mesh, beta))
        rep = monotonicity_report(sol)
        bsc = boundary_sign_checks(sol)
        ok = rep.verdict == "monotone" and rep.margin > 2 * rep.threshold
        points.append({"t": float(t), "verdict": rep.verdict, "margin": rep.margin,
                       "threshold": rep.threshold, "worst": rep.worst,
                       "A2_margin": a2.margin, "A2_holds": a2.holds,
                       "boundary_monotone": bsc["boundary_monotone"],
                       "axis_concave": bsc["axis_concave"], "n_nodes": mesh.n_nodes,
                       "runtime": time.perf_counter() - t0})
        if not ok:
            offending.append(float(t))
            if rep.verdict == "violated":
                status = "fails"
            elif status == "holds":
                status = "inconclusive"
    min_margin = float(min(p["margin"] for p in points))
    return PathCertificate(status, min_margin, points, offending)


@dataclass(frozen=True)
class ConstantFamily:
    omega: object
    beta: float

    def __call__(self, t):
        return self.omega


# -- rounding study -----------------------------------------------------------

def rounding_study(a: float, b: float, beta: float, rhos, h: float, grading=(0.5, 4),
                   delta: float = 0.1) -> dict:
    """Counterexample probe on rounded crosses for a list of radii."""
    rows = []
    for rho in rhos:
        row = {"a": float(a), "b": float(b), "beta": float(beta), "rho": float(rho),
               "h": float(h), "delta": float(delta)}
        if rho < 4 * h:
            row.update(status="skipped", note=f"rho < 4h = {4 * h:g} is not resolved")
            rows.append(row)
            continue
        dom = RoundedCrossPolygon(a, b, rho)
        params = {"domain": dom.config(), "beta": float(beta), "h": float(h),
                  "grading": None if grading is None else list(grading),
                  "delta": float(delta)}
        rec = evaluate(params, dom)
        row.update(status=rec.status, gap=rec.gap, margin_A2=rec.margin_A2,
                   verdict=rec.verdict, smooth=bool(dom.smooth), error=rec.error)
        rows.append(row)
    gaps = [r["gap"] for r in rows if r.get("status") == "ok"]
    return {"rows": rows,
            "gap_positive_all": bool(gaps) and all(g is not None and g > 0 for g in gaps)}

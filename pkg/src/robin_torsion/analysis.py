"""Sign conditions, boundary identities and monotonicity verdicts."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import (BoundaryTrace, CrossPolygon, DomainError, RoundedCrossPolygon,
                       _ccw_normal, boundary_frame)
from .solver import PatchError, Solution, patch_fit


@dataclass
class MonotonicityReport:
    verdict: str
    direction: int
    worst: float
    worst_at: tuple
    margin: float
    threshold: float
    axis_band: float
    corner_radius: float
    n_tested: int
    violations: list = field(default_factory=list)
    companion: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def _corner_exclusion(solution: Solution, corner_radius):
    mesh = solution.mesh
    corners = mesh.domain.reentrant_corners if mesh.domain is not None else np.zeros((0, 2))
    if len(corners) == 0:
        return corners, np.zeros(0)
    if corner_radius is None:
        radii = np.array([3.0 * mesh.local_size(c) for c in corners])
    else:
        radii = np.full(len(corners), float(corner_radius))
        floor = np.array([3.0 * mesh.local_size(c) for c in corners])
        if np.any(radii < floor * (1 - 1e-12)):
            raise ValueError(f"corner_radius must be at least 3 local mesh sizes "
                             f"({floor.max():.3g})")
    return corners, radii


def tested_elements(solution: Solution, axis_band=None, corner_radius=None, direction=2):
    """Barycenters in the tested half with axis band and corner balls removed."""
    mesh = solution.mesh
    h = mesh.h
    band = 2.0 * h if axis_band is None else float(axis_band)
    if band < 2.0 * h * (1 - 1e-12):
        raise ValueError(f"axis_band must be at least 2h = {2 * h:.3g}")
    c = mesh.barycenters()
    coord = c[:, direction - 1]
    keep = coord > band
    corners, radii = _corner_exclusion(solution, corner_radius)
    for p, rad in zip(corners, radii):
        keep &= np.hypot(*(c - p).T) > rad
    if not keep.any():
        raise ValueError("exclusions cover the whole tested half-domain")
    rad = float(radii.max()) if len(radii) else 0.0
    return np.flatnonzero(keep), band, rad


def monotonicity_report(solution: Solution, axis_band: float | None = None,
                        corner_radius: float | None = None, direction: int = 2,
                        max_violations: int | None = None) -> MonotonicityReport:
    """Certify the sign of ``x_d * d_d u`` on element barycenters.

    The verdict uses the threshold ``tau = 5 h max|grad u|``.  A violation
    is certified when ``max x_d d_d u > 2 tau``.  Monotonicity is certified
    when the scale-free margin ``-max(d_d u / x_d) * max(x_d)^2`` exceeds
    ``2 tau``; the raw extremum cannot be used for this because it tends
    to 0 at the edge of the axis band.
    """
    if direction not in (1, 2):
        raise ValueError("direction must be 1 or 2")
    idx, band, rad = tested_elements(solution, axis_band, corner_radius, direction)
    mesh = solution.mesh
    c = mesh.barycenters()[idx]
    g = solution.element_gradients[idx]
    x = c[:, direction - 1]
    d = g[:, direction - 1]
    q = x * d
    tau = 5.0 * mesh.h * float(np.max(np.hypot(g[:, 0], g[:, 1])))
    i = int(np.argmax(q))
    worst = float(q[i])
    margin = float(-np.max(d / x) * np.max(x) ** 2)
    if worst > 2 * tau:
        verdict = "violated"
    elif margin > 2 * tau:
        verdict = "monotone"
    else:
        verdict = "inconclusive"
    bad = np.flatnonzero(q > tau)
    bad = bad[np.argsort(-q[bad], kind="stable")][:max_violations]
    violations = [{"x": float(c[j, 0]), "y": float(c[j, 1]), "value": float(q[j])}
                  for j in bad]
    other = 3 - direction
    oi, _, _ = tested_elements(solution, band, rad if rad > 0 else None, other)
    go = solution.element_gradients[oi, other - 1]
    companion = {"direction": other, "max_derivative": float(go.max()),
                 "n_positive": int(np.sum(go > 0)), "n_tested": int(len(oi))}
    return MonotonicityReport(verdict, direction, worst, (float(c[i, 0]), float(c[i, 1])),
                              margin, tau, band, rad, int(len(idx)), violations, companion)


def symmetry_residual(solution) -> float:
    if isinstance(solution, Solution):
        u, r = solution.u, solution.mesh.reflect
    else:
        u, r = solution
    return float(np.max(np.abs(u - u[r])))


# -- boundary data ----------------------------------------------------------

@dataclass
class BoundaryLoop:
    nodes: np.ndarray      # mesh node indices, counterclockwise
    points: np.ndarray
    s: np.ndarray          # cumulative chord length
    kappa: np.ndarray
    tangent: np.ndarray    # counterclockwise
    normal: np.ndarray     # outward
    tag: np.ndarray
    length: float


def boundary_loop(solution: Solution) -> BoundaryLoop:
    mesh = solution.mesh
    if mesh.domain is None:
        raise DomainError("boundary diagnostics need the mesh domain")
    b = mesh.boundary_nodes()
    pts = mesh.nodes[b]
    kappa, T, tag = boundary_frame(mesh.domain, mesh.node_param[b], pts)
    seg = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)
    s = np.concatenate([[0.0], np.cumsum(seg[:-1])])
    return BoundaryLoop(b, pts, s, kappa, T, _ccw_normal(T), tag, float(seg.sum()))


def tangential_derivative(loop: BoundaryLoop, f) -> np.ndarray:
    """Three-point nonuniform differences of ``f`` along the closed loop."""
    f = np.asarray(f, dtype=float)
    h1 = loop.s - np.roll(loop.s, 1)
    h1[0] += loop.length
    h2 = np.roll(h1, -1)
    fm, fp = np.roll(f, 1), np.roll(f, -1)
    return (-h2 / (h1 * (h1 + h2)) * fm + (h2 - h1) / (h1 * h2) * f
            + h1 / (h2 * (h1 + h2)) * fp)


def _require_smooth(solution):
    dom = solution.mesh.domain
    if dom is None or not getattr(dom, "smooth", False):
        raise DomainError("this diagnostic needs a smooth domain")


@dataclass
class BoundaryResidual:
    s: np.ndarray
    points: np.ndarray
    values: np.ndarray
    failures: list = field(default_factory=list)

    @property
    def stddev(self) -> float:
        return float(np.std(self.values))

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def max(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def l2(self) -> float:
        return float(np.sqrt(np.mean(self.values ** 2)))

    def summary(self) -> dict:
        return {"n": int(len(self.values)), "mean": self.mean, "stddev": self.stddev,
                "max": self.max, "l2": self.l2, "failures": len(self.failures)}

    def to_csv(self, path) -> None:
        np.savetxt(path, np.column_stack([self.s, self.values]), fmt="%.17g",
                   delimiter=",", header="s,value", comments="")


def overdetermined_residual(solution: Solution, trace: BoundaryTrace | None = None,
                            beta: float | None = None) -> BoundaryResidual:
    """``-b^2 u^2 + |grad u|^2 / 2 + (b/2) u^2 kappa - u`` at boundary nodes.

    On the boundary the normal derivative is ``-beta u``, so only the
    tangential derivative is differenced; the curvature is exact.
    """
    _require_smooth(solution)
    beta = solution.beta if beta is None else beta
    loop = boundary_loop(solution)
    u = solution.u[loop.nodes]
    du = tangential_derivative(loop, u)
    grad2 = (beta * u) ** 2 + du ** 2
    val = -beta ** 2 * u ** 2 + 0.5 * grad2 + 0.5 * beta * u ** 2 * loop.kappa - u
    ok = np.isfinite(val)
    return BoundaryResidual(loop.s[ok], loop.points[ok], val[ok])


def tangential_identity_residual(solution: Solution, trace: BoundaryTrace | None = None,
                                 radius: float | None = None,
                                 beta: float | None = None) -> BoundaryResidual:
    """``D^2u[tau, nu] + (kappa + beta) grad u . tau`` at boundary nodes.

    The Hessian comes from a quadratic patch of radius ``sqrt(h)`` (at
    least three mesh sizes), the tangential derivative from differences
    along the boundary.
    """
    _require_smooth(solution)
    mesh = solution.mesh
    beta = solution.beta if beta is None else beta
    h = mesh.h
    radius = max(np.sqrt(h), 3.0 * h) if radius is None else radius
    loop = boundary_loop(solution)
    du = tangential_derivative(loop, solution.u[loop.nodes])
    vals = np.full(len(loop.nodes), np.nan)
    failures = []
    for j, p in enumerate(loop.points):
        try:
            H = patch_fit(mesh, solution.u, p, radius).hessian
        except PatchError as exc:
            failures.append({"x": float(p[0]), "y": float(p[1]), "error": str(exc)})
            continue
        t, n = loop.tangent[j], loop.normal[j]
        vals[j] = t @ H @ n + (loop.kappa[j] + beta) * du[j]
    ok = np.isfinite(vals)
    return BoundaryResidual(loop.s[ok], loop.points[ok], vals[ok], failures)


def boundary_sign_checks(solution: Solution, trace: BoundaryTrace | None = None,
                         axis_band: float | None = None, radius: float | None = None,
                         n_axis: int = 41) -> dict:
    """Boundary monotonicity of ``d_2 u`` and concavity of ``u`` along the axis."""
    _require_smooth(solution)
    mesh = solution.mesh
    h = mesh.h
    band = 2.0 * h if axis_band is None else axis_band
    radius = 3.0 * h if radius is None else radius
    tau = 5.0 * h * float(np.max(np.hypot(*solution.element_gradients.T)))

    loop = boundary_loop(solution)
    g = solution.gradient[loop.nodes]
    sel = loop.points[:, 1] > band
    d2 = g[sel, 1]
    bad = np.flatnonzero(d2 >= tau)
    boundary_monotone = bool(len(bad) == 0)
    worst_b = int(np.argmax(d2))

    xs = mesh.nodes[mesh.n_upper: mesh.n_upper + mesh.n_axis, 0]
    xl, xr = float(xs.min()), float(xs.max())
    pts = np.stack([np.linspace(xl, xr, n_axis), np.zeros(n_axis)], -1)
    hess, failures = [], []
    for p in pts:
        try:
            hess.append(patch_fit(mesh, solution.u, p, radius).hessian[1, 1])
        except PatchError as exc:
            hess.append(np.nan)
            failures.append({"x": float(p[0]), "error": str(exc)})
    hess = np.array(hess)
    axis_concave = bool(len(failures) == 0 and np.all(hess < 0))
    details = {
        "threshold": tau, "axis_band": band, "patch_radius": radius,
        "n_boundary": int(sel.sum()),
        "max_boundary_d2u": float(d2[worst_b]),
        "max_boundary_at": [float(v) for v in loop.points[sel][worst_b]],
        "boundary_failures": [{"x": float(loop.points[sel][j, 0]),
                               "y": float(loop.points[sel][j, 1]),
                               "value": float(d2[j]), "tag": str(loop.tag[sel][j])}
                              for j in bad],
        "axis_x": pts[:, 0].tolist(), "axis_d22u": hess.tolist(),
        "max_axis_d22u": float(np.nanmax(hess)) if np.isfinite(hess).any() else float("nan"),
        "patch_failures": failures,
    }
    return {"boundary_monotone": boundary_monotone, "axis_concave": axis_concave,
            "details": details}


# -- cross polygon diagnostics ---------------------------------------------

@dataclass
class ReflectedDifference:
    points: np.ndarray
    w: np.ndarray
    skipped: int
    band: float

    @property
    def max(self) -> float:
        return float(np.max(self.w))

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.w)))


def reflected_difference(solution: Solution, n: int = 61,
                         band: float | None = None) -> ReflectedDifference:
    """``w = u(x1, x2) - u(x2, x1)`` on ``{0 < x2 < x1} inside the positive quadrant``.

    Samples within ``band`` (default ``h``) of the diagonal or of the
    boundary are dropped; reflected points that fall outside the mesh are
    skipped and counted.
    """
    dom = solution.mesh.domain
    if not isinstance(dom, (CrossPolygon, RoundedCrossPolygon)):
        raise DomainError("reflected difference is defined on cross polygons")
    if dom.a > dom.b:
        raise DomainError("reflected difference needs a <= b")
    band = solution.mesh.h if band is None else band
    g1 = np.linspace(0.0, dom.a, n)
    g2 = np.linspace(0.0, 1.0, max(3, int(np.ceil(n / dom.a))))
    X1, X2 = np.meshgrid(g1, g2)
    p = np.stack([X1.ravel(), X2.ravel()], -1)
    keep = (p[:, 0] - p[:, 1] > band) & (p[:, 1] < 1.0 - band) & (p[:, 0] < dom.a - band)
    keep &= p[:, 1] > 0
    p = p[keep & dom.contains(p)]
    q = p[:, ::-1]
    keep = dom.contains(q)
    up = solution.evaluate(p[keep])
    uq = solution.evaluate(q[keep])
    ok = np.isfinite(up) & np.isfinite(uq)
    skipped = int(len(p) - ok.sum())
    return ReflectedDifference(p[keep][ok], (up - uq)[ok], skipped, float(band))


def counterexample_probe(solution: Solution, delta: float = 0.1, anchor=None) -> dict:
    """Values at ``p = anchor + (-d, d)`` and ``q = anchor + (-d, -d)``.

    The anchor defaults to the reentrant corner ``(1, 1)``.  On other
    domains it is ``(d, H/2)`` with ``H`` the height above the origin, so
    ``p`` sits above ``q`` on the line ``x1 = 0``.
    """
    mesh = solution.mesh
    dom = mesh.domain
    h = mesh.h
    if not 3 * h < delta < 0.3:
        raise ValueError(f"delta must lie in (3h, 0.3) = ({3 * h:.3g}, 0.3)")
    if anchor is None:
        if isinstance(dom, (CrossPolygon, RoundedCrossPolygon)):
            anchor = (1.0, 1.0)
        else:
            top = float(np.max(mesh.nodes[np.abs(mesh.nodes[:, 0]) < h, 1]))
            anchor = (delta, 0.5 * top)
    a = np.asarray(anchor, dtype=float)
    p = a + np.array([-delta, delta])
    q = a + np.array([-delta, -delta])
    vals = solution.evaluate(np.stack([p, q]))
    if not np.all(np.isfinite(vals)):
        raise ValueError("probe point outside the domain")
    return {"p": p.tolist(), "q": q.tolist(), "u_p": float(vals[0]),
            "u_q": float(vals[1]), "gap": float(vals[0] - vals[1]), "delta": delta}

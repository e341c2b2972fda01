"""Asymptotics at the reentrant vertex (1, 1) of a cross polygon.

Near the vertex the Robin torsion function behaves like

    Phi = c0 B0 + c1 B1 + c2 B2 + c3 B3 - r^2 / 4,

with ``B1 = r^(2/3) cos(2t/3) + (3 sqrt2 / 5) beta r^(5/3) cos(5t/3 + 3 pi/4)``,
``B2 = r^(4/3) cos(4t/3)`` and ``B3 = r^2 cos 2t``.  The default
``B0 = (1 - beta y1)(1 - beta y2)`` is harmonic and satisfies both edge
conditions exactly; the ``-r^2/4`` term carries the unit source.  The
``quadratic`` variant uses ``B0 = 1 - beta (y1 + y2) + beta^2 |y|^2 / 2``
instead.  Its Laplacian is ``2 beta^2`` and its edge residual is of first
order, so it cannot represent the torsion function.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .geometry import CrossPolygon, DomainError, RoundedCrossPolygon

VERTEX = np.array([1.0, 1.0])
_K5 = 3.0 * np.sqrt(2.0) / 5.0


class CornerFitError(ValueError):
    pass


@dataclass(frozen=True)
class CornerFrame:
    vertex: tuple = (1.0, 1.0)

    def local(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) - np.asarray(self.vertex)

    def polar(self, x):
        """``(r, theta)`` with ``theta = arg(y) - 2 pi`` in ``(-3 pi/2, 0)``."""
        return polar(self.local(x))

    def point(self, r, theta) -> np.ndarray:
        r, theta = np.asarray(r, float), np.asarray(theta, float)
        return np.asarray(self.vertex) + np.stack([r * np.cos(theta), r * np.sin(theta)], -1)


def polar(y):
    y = np.asarray(y, dtype=float)
    r = np.hypot(y[..., 0], y[..., 1])
    if np.any(r == 0):
        raise ValueError("the corner expansion is singular at y = 0")
    arg = np.mod(np.arctan2(y[..., 1], y[..., 0]), 2 * np.pi)
    return r, arg - 2 * np.pi


def expansion_basis(y, beta: float, variant: str = "corrected") -> np.ndarray:
    """Basis values ``[B0, B1, B2, B3]`` at local points ``y`` (last axis 4)."""
    y = np.asarray(y, dtype=float)
    r, t = polar(y)
    y1, y2 = y[..., 0], y[..., 1]
    if variant == "corrected":
        b0 = (1.0 - beta * y1) * (1.0 - beta * y2)
    elif variant == "quadratic":
        b0 = 1.0 - beta * (y1 + y2) + 0.5 * beta ** 2 * (y1 ** 2 + y2 ** 2)
    else:
        raise ValueError(f"unknown basis variant {variant!r}")
    b1 = r ** (2 / 3) * np.cos(2 * t / 3) + _K5 * beta * r ** (5 / 3) * np.cos(
        5 * t / 3 + 0.75 * np.pi)
    b2 = r ** (4 / 3) * np.cos(4 * t / 3)
    b3 = r ** 2 * np.cos(2 * t)
    return np.stack([b0, b1, b2, b3], -1)


def particular(y, variant: str = "corrected") -> np.ndarray:
    """Fixed source term of the expansion (zero for the quadratic variant)."""
    y = np.asarray(y, dtype=float)
    if variant == "quadratic":
        return np.zeros(y.shape[:-1])
    return -0.25 * np.sum(y ** 2, axis=-1)


def synthetic_field(coef, beta: float, variant: str = "corrected"):
    coef = np.asarray(coef, dtype=float)

    def phi(x):
        y = np.asarray(x, dtype=float) - VERTEX
        return expansion_basis(y, beta, variant) @ coef + particular(y, variant)

    return phi


@dataclass
class CornerFit:
    coefficients: np.ndarray
    stderr: np.ndarray
    r_min: float
    r_max: float
    residual: float
    n_samples: int
    condition: float
    beta: float
    variant: str = "corrected"

    @property
    def c0(self) -> float:
        return float(self.coefficients[0])

    @property
    def c1(self) -> float:
        return float(self.coefficients[1])

    @property
    def truncation_constant(self) -> float:
        """``K`` with ``residual = K r_max^(7/3)``."""
        return self.residual / self.r_max ** (7 / 3)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coefficients"] = [float(c) for c in self.coefficients]
        d["stderr"] = [float(c) for c in self.stderr]
        return d

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def fit_samples(points, values, beta: float, r_min: float, r_max: float,
                weights="r^-2/3", variant: str = "corrected", min_samples: int = 200,
                max_condition: float = 1e10) -> CornerFit:
    """Weighted least squares of ``values`` against the corner basis."""
    y = np.asarray(points, dtype=float) - VERTEX
    r = np.hypot(y[:, 0], y[:, 1])
    sel = (r >= r_min) & (r <= r_max)
    n = int(sel.sum())
    if n < min_samples:
        raise CornerFitError(f"{n} samples in the annulus [{r_min:g}, {r_max:g}], "
                             f"need {min_samples}")
    y, r = y[sel], r[sel]
    X = expansion_basis(y, beta, variant)
    rhs = np.asarray(values, dtype=float)[sel] - particular(y, variant)
    if weights == "r^-2/3":
        w = r ** (-2 / 3)
    elif weights is None:
        w = np.ones(n)
    else:
        w = np.asarray(weights, dtype=float)[sel]
    sw = np.sqrt(w)
    N = (X * w[:, None]).T @ X
    cond = float(np.linalg.cond(N))
    if not cond <= max_condition:
        raise CornerFitError(f"normal equations are ill-conditioned (cond {cond:.2e}); "
                             "widen the annulus")
    coef, *_ = np.linalg.lstsq(X * sw[:, None], rhs * sw, rcond=None)
    res = (rhs - X @ coef) * sw
    dof = max(n - X.shape[1], 1)
    sigma2 = float(res @ res) / dof
    cov = sigma2 * np.linalg.inv(N)
    stderr = np.sqrt(np.maximum(np.diag(cov), 0.0))
    resid = float(np.sqrt(np.mean(res ** 2) / np.mean(w)))
    return CornerFit(coef, stderr, float(r_min), float(r_max), resid, n, cond,
                     float(beta), variant)


def default_annulus(mesh) -> tuple:
    h_local = mesh.local_size(VERTEX)
    return max(3.0 * h_local, 0.02), 0.25


def fit_corner(solution, beta: float | None = None, annulus=None, weights="r^-2/3",
               variant: str = "corrected") -> CornerFit:
    """Fit the expansion at ``(1, 1)`` to the nodal values of a cross solve."""
    mesh = solution.mesh
    if not isinstance(mesh.domain, CrossPolygon):
        raise DomainError("corner fits need a cross polygon")
    beta = solution.beta if beta is None else beta
    r_min, r_max = default_annulus(mesh) if annulus is None else annulus
    h_local = mesh.local_size(VERTEX)
    if r_min < 3.0 * h_local * (1 - 1e-12):
        raise CornerFitError(f"r_min must be at least 3 h_local = {3 * h_local:.3g}")
    if r_max > 0.3:
        raise CornerFitError("r_max must not exceed 0.3")
    return fit_samples(mesh.nodes, solution.u, beta, r_min, r_max, weights, variant)


def derivative_asymptote(fit, y) -> np.ndarray:
    """Leading behaviour of ``(d1 u, d2 u)`` at local points ``y``."""
    if isinstance(fit, CornerFit):
        c0, c1, beta = fit.c0, fit.c1, fit.beta
    else:
        c0, c1, beta = fit
    r, t = polar(y)
    s = (2.0 / 3.0) * c1 * r ** (-1.0 / 3.0)
    return np.stack([s * np.cos(t / 3) - c0 * beta, s * np.sin(t / 3) - c0 * beta], -1)


def asymptote_vs_field(field, fit, radii, theta: float = -0.75 * np.pi) -> dict:
    """Compare a gradient field with the asymptote along a ray from the vertex.

    ``field`` is a solution (its recovered gradient is interpolated) or a
    callable returning gradients at points.
    """
    radii = np.asarray(radii, dtype=float)
    pts = CornerFrame().point(radii, np.full_like(radii, theta))
    if callable(field):
        g = np.asarray(field(pts), dtype=float)
    else:
        g = field.mesh.interpolate(field.gradient, pts)
    pred = derivative_asymptote(fit, pts - VERTEX)
    dev = np.hypot(*(g - pred).T)
    rows = np.column_stack([radii, np.full_like(radii, theta), g, pred])
    ok = np.isfinite(dev) & (dev > 0)
    order = float(np.polyfit(np.log(radii[ok]), np.log(dev[ok]), 1)[0]) \
        if ok.sum() >= 2 else float("nan")
    return {"rows": rows, "deviation": dev, "order": order}


def write_comparison(table: dict, path) -> None:
    np.savetxt(path, table["rows"], fmt="%.17g", delimiter=",",
               header="r,theta,ux_fem,uy_fem,ux_pred,uy_pred", comments="")


def swap_parity(beta: float = 1.0, n: int = 64, seed: int = 0) -> np.ndarray:
    """+1 / -1 per basis term according to its behaviour under ``y1 <-> y2``."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.01, 0.3, n)
    t = rng.uniform(-1.5 * np.pi + 1e-3, -1e-3, n)
    y = np.stack([r * np.cos(t), r * np.sin(t)], -1)
    B = expansion_basis(y, beta)
    Bs = expansion_basis(y[:, ::-1], beta)
    out = np.zeros(4)
    for k in range(4):
        if np.allclose(Bs[:, k], B[:, k], atol=1e-12):
            out[k] = 1
        elif np.allclose(Bs[:, k], -B[:, k], atol=1e-12):
            out[k] = -1
    return out


def is_cross(domain) -> bool:
    return isinstance(domain, (CrossPolygon, RoundedCrossPolygon))

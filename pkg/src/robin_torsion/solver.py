"""P1 finite elements for the Robin and Neumann torsion problems.

The assembled operator is exactly equivariant under the mesh reflection:
every lower-half row is a column-relabelled copy of its mirror row, in the
same storage order.  Together with a deterministic CG this makes the
discrete solution bitwise symmetric.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .mesh import TriMesh


class SolverError(RuntimeError):
    """CG failure; ``history`` holds the relative residuals seen so far."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class IndefiniteError(SolverError):
    pass


class PatchError(ValueError):
    pass


def _dot(a, b) -> float:
    # pairwise summation in index order; avoids thread-count dependent BLAS
    return float(np.add.reduce(a * b))


@dataclass(frozen=True)
class RobinProblem:
    mesh: TriMesh
    beta: float = 1.0
    mode: str = "robin"

    def __post_init__(self):
        if self.mode not in ("robin", "neumann"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "robin" and not self.beta > 0:
            raise ValueError("robin mode requires beta > 0")


@dataclass(frozen=True)
class LinearSystem:
    matrix: sp.csr_matrix
    load: np.ndarray
    diagonal: np.ndarray
    mass: np.ndarray          # c_i = integral of phi_i
    constraint: np.ndarray | None = None  # mean-zero row (neumann only)

    def write(self, path) -> None:
        A = self.matrix
        rows = np.repeat(np.arange(A.shape[0]), np.diff(A.indptr))
        with open(path, "w") as fh:
            for i, j, v in zip(rows, A.indices, A.data):
                fh.write(f"{i} {j} {v:.17g}\n")


def _ranges(starts, lengths):
    total = int(lengths.sum())
    offs = np.repeat(np.cumsum(lengths) - lengths, lengths)
    return np.repeat(starts, lengths) + np.arange(total) - offs


def _element_geometry(mesh: TriMesh):
    p = mesh.nodes[mesh.tris]
    e = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    D = e[:, 2, 0] * (-e[:, 1, 1]) - (-e[:, 1, 0]) * e[:, 2, 1]
    return e, D


def element_stiffness(vertices) -> np.ndarray:
    """3x3 P1 Laplacian stiffness of one triangle."""
    v = np.asarray(vertices, dtype=float)
    e = np.array([v[2] - v[1], v[0] - v[2], v[1] - v[0]])
    D = e[2, 0] * (-e[1, 1]) + e[1, 0] * e[2, 1]
    if D == 0:
        raise ValueError("zero-area triangle")
    return (e @ e.T) / (2.0 * abs(D))


def _coalesce(rows, cols, vals, n):
    key = rows * n + cols
    order = np.argsort(key, kind="stable")
    key, vals = key[order], vals[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    # reduceat sums each run left to right
    data = np.add.reduceat(vals, starts)
    uk = key[starts]
    return uk // n, uk % n, data


def _equivariant_csr(rows, cols, data, mesh: TriMesh, scale: float):
    n = mesh.n_nodes
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    indptr = np.cumsum(indptr)
    m, k = mesh.n_upper, mesh.n_axis
    lens = np.diff(indptr)
    lower = np.arange(m + k, n)
    up = lower - (m + k)
    if not np.array_equal(lens[lower], lens[up]):
        raise AssertionError("assembly pattern is not reflection symmetric")
    src = _ranges(indptr[up], lens[up])
    dst = _ranges(indptr[lower], lens[lower])
    r = mesh.reflect
    # axis rows: make the entry at a lower column equal its mirror entry
    ax = np.flatnonzero((rows >= m) & (rows < m + k) & (cols >= m + k))
    if ax.size:
        key = rows * n + cols
        mirror = np.searchsorted(key, rows[ax] * n + r[cols[ax]])
        data = data.copy()
        data[ax] = data[mirror]
    # sanity: the copied entries agree with what the lower triangles produced
    direct = sp.csr_matrix((data, cols, indptr), shape=(n, n))
    new_cols = cols.copy()
    new_data = data.copy()
    new_cols[dst] = r[cols[src]]
    new_data[dst] = data[src]
    A = sp.csr_matrix((new_data, new_cols, indptr), shape=(n, n))
    gap = abs(direct - A).max() if n else 0.0
    if gap > 1e-12 * scale:
        raise AssertionError(f"reflected assembly differs by {gap:g}")
    return A


def assemble(problem: RobinProblem) -> LinearSystem:
    mesh = problem.mesh
    n = mesh.n_nodes
    e, D = _element_geometry(mesh)
    if np.any(D <= 0):
        raise ValueError("zero-area or inverted triangle in mesh")
    Ke = np.einsum("tid,tjd->tij", e, e) / (2.0 * D)[:, None, None]
    t = mesh.tris
    rows = [np.repeat(t, 3, axis=1).ravel()]
    cols = [np.tile(t, (1, 3)).ravel()]
    vals = [Ke.ravel()]

    be = mesh.bedges
    L = np.hypot(*(mesh.nodes[be[:, 1]] - mesh.nodes[be[:, 0]]).T)
    if problem.mode == "robin":
        # edge mass with 2-point Gauss, which is exact for the P1 product
        g = (1.0 + np.array([-1.0, 1.0]) / np.sqrt(3.0)) / 2.0
        phi = np.stack([1.0 - g, g])
        Me = np.einsum("aq,bq->ab", phi, phi) / 2.0
        ev = problem.beta * L[:, None, None] * Me[None]
        rows.append(np.repeat(be, 2, axis=1).ravel())
        cols.append(np.tile(be, (1, 2)).ravel())
        vals.append(ev.ravel())
    rows, cols, data = _coalesce(np.concatenate(rows), np.concatenate(cols),
                                 np.concatenate(vals), n)
    scale = float(np.abs(data).max())
    A = _equivariant_csr(rows, cols, data, mesh, scale)
    diag = np.zeros(n)
    on = rows == cols
    diag[rows[on]] = data[on]

    mass = np.bincount(t.ravel(), weights=np.repeat(D / 6.0, 3), minlength=n)
    load = mass.copy()
    constraint = None
    if problem.mode == "neumann":
        area = float(D.sum()) / 2.0
        perim = float(L.sum())
        bmass = np.bincount(be.ravel(), weights=np.repeat(L / 2.0, 2), minlength=n)
        load = mass - (area / perim) * bmass
        constraint = mass
    m, k = mesh.n_upper, mesh.n_axis
    load[m + k:] = load[:m]
    diag[m + k:] = diag[:m]
    mass[m + k:] = mass[:m]
    return LinearSystem(A, load, diag, mass, constraint)


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residual: float
    history: list = field(default_factory=list)


def pcg(A, b, diag, x0=None, tol: float = 1e-10, maxiter: int | None = None,
        project=None) -> CGResult:
    """Jacobi preconditioned conjugate gradients.

    ``project`` optionally maps residuals onto the range of a singular
    operator.  Raises SolverError on stagnation and IndefiniteError on a
    non-positive curvature direction.
    """
    n = len(b)
    maxiter = 10 * n if maxiter is None else maxiter
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    inv = 1.0 / diag
    r = b - A @ x
    if project is not None:
        r = project(r)
    bnorm = np.sqrt(_dot(b, b))
    if bnorm == 0.0:
        return CGResult(np.zeros(n), 0, 0.0, [0.0])
    rel = np.sqrt(_dot(r, r)) / bnorm
    history = [rel]
    z = inv * r
    p = z.copy()
    rz = _dot(r, z)
    it = 0
    while rel > tol:
        if it >= maxiter:
            raise SolverError(f"CG did not converge in {maxiter} iterations "
                              f"(residual {rel:.3e})", history)
        q = A @ p
        pq = _dot(p, q)
        if not pq > 0.0:
            raise IndefiniteError(f"non-positive curvature {pq:.3e} at iteration {it}",
                                  history)
        alpha = rz / pq
        x = x + alpha * p
        r = r - alpha * q
        if project is not None:
            r = project(r)
        z = inv * r
        rz_new = _dot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
        rel = np.sqrt(_dot(r, r)) / bnorm
        history.append(rel)
    return CGResult(x, it, rel, history)


def element_gradients(mesh: TriMesh, u) -> np.ndarray:
    """Constant gradient of the P1 interpolant on each triangle."""
    e, D = _element_geometry(mesh)
    uu = np.asarray(u)[mesh.tris]
    # grad phi_i = (-e_iy, e_ix) / D
    gx = -np.einsum("ti,ti->t", uu, e[:, :, 1]) / D
    gy = np.einsum("ti,ti->t", uu, e[:, :, 0]) / D
    return np.stack([gx, gy], axis=1)


def recover_gradient(mesh: TriMesh, u) -> np.ndarray:
    """Area-weighted average of the adjacent element gradients."""
    g = element_gradients(mesh, u)
    _, D = _element_geometry(mesh)
    idx = mesh.tris.ravel()
    w = np.repeat(D, 3)
    n = mesh.n_nodes
    tot = np.bincount(idx, weights=w, minlength=n)
    gx = np.bincount(idx, weights=w * np.repeat(g[:, 0], 3), minlength=n) / tot
    gy = np.bincount(idx, weights=w * np.repeat(g[:, 1], 3), minlength=n) / tot
    return np.stack([gx, gy], axis=1)


@dataclass(frozen=True)
class Solution:
    problem: RobinProblem
    u: np.ndarray
    gradient: np.ndarray
    energy: float
    iterations: int
    residual: float
    history: tuple = ()

    @property
    def mesh(self) -> TriMesh:
        return self.problem.mesh

    @property
    def beta(self) -> float:
        return self.problem.beta

    @cached_property
    def element_gradients(self) -> np.ndarray:
        return element_gradients(self.mesh, self.u)

    def evaluate(self, points) -> np.ndarray:
        return self.mesh.interpolate(self.u, points)

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.u - self.u[self.mesh.reflect])))

    def write_field(self, path) -> None:
        write_field(path, self.mesh.nodes, self.u, self.gradient)


def write_field(path, nodes, u, grad) -> None:
    data = np.column_stack([nodes, u, grad])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header="x,y,u,ux,uy",
               comments="")


def solve(problem: RobinProblem, x0=None, tol: float = 1e-10,
          system: LinearSystem | None = None) -> Solution:
    system = assemble(problem) if system is None else system
    A, b = system.matrix, system.load
    project = None
    if problem.mode == "neumann":
        n = len(b)
        # the kernel is the constants; CG stays in their complement
        project = lambda r: r - np.add.reduce(r) / n  # noqa: E731
    res = pcg(A, b, system.diagonal, x0=x0, tol=tol, project=project)
    u = res.x
    if problem.mode == "neumann":
        c = system.mass
        u = u - _dot(c, u) / np.add.reduce(c)
    energy = 0.5 * _dot(u, A @ u) - _dot(b, u)
    grad = recover_gradient(problem.mesh, u)
    return Solution(problem, u, grad, energy, res.iterations, res.residual,
                    tuple(res.history))


def discrete_mean(solution: Solution) -> float:
    mass = np.bincount(solution.mesh.tris.ravel(),
                       weights=np.repeat(solution.mesh.signed_areas() / 3.0, 3),
                       minlength=solution.mesh.n_nodes)
    return _dot(mass, solution.u) / np.add.reduce(mass)


# -- local quadratic fits ---------------------------------------------------

@dataclass(frozen=True)
class PatchFit:
    point: np.ndarray
    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    n_nodes: int


def patch_fit(mesh: TriMesh, values, point, radius: float, min_nodes: int = 12) -> PatchFit:
    """Least-squares quadratic through the nodal values within ``radius``."""
    point = np.asarray(point, dtype=float)
    idx = mesh.node_tree.query_ball_point(point, radius)
    if len(idx) < min_nodes:
        raise PatchError(f"patch at ({point[0]:.6g}, {point[1]:.6g}) with radius "
                         f"{radius:.3g} holds {len(idx)} nodes, need {min_nodes}")
    idx = np.sort(np.asarray(idx))
    xi = (mesh.nodes[idx] - point) / radius
    X = np.column_stack([np.ones(len(idx)), xi[:, 0], xi[:, 1],
                         xi[:, 0] ** 2, xi[:, 0] * xi[:, 1], xi[:, 1] ** 2])
    sv = np.linalg.svd(X, compute_uv=False)
    if sv[-1] < 1e-8 * sv[0]:
        raise PatchError(f"rank-deficient patch at ({point[0]:.6g}, {point[1]:.6g})")
    coef, *_ = np.linalg.lstsq(X, np.asarray(values)[idx], rcond=None)
    H = np.array([[2 * coef[3], coef[4]], [coef[4], 2 * coef[5]]]) / radius ** 2
    return PatchFit(point, float(coef[0]), coef[1:3] / radius, H, len(idx))


def local_second_derivatives(solution: Solution, point, radius: float) -> np.ndarray:
    return patch_fit(solution.mesh, solution.u, point, radius).hessian


# -- disk oracle ------------------------------------------------------------

@dataclass(frozen=True)
class DiskOracle:
    """u(x) = R/(2 beta) + (R^2 - |x|^2)/4 on the disk of radius R."""

    beta: float
    R: float = 1.0

    def __post_init__(self):
        if not (self.beta > 0 and self.R > 0):
            raise ValueError("beta and R must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.R / (2 * self.beta) + (self.R ** 2 - np.sum(x ** 2, axis=-1)) / 4.0

    def gradient(self, x):
        return -np.asarray(x, dtype=float) / 2.0

    def hessian(self, x=None):
        return -0.5 * np.eye(2)

    @property
    def energy(self) -> float:
        # J = -1/2 integral of u, by Gauss-Legendre in r
        r, w = np.polynomial.legendre.leggauss(8)
        r = self.R * (r + 1) / 2
        w = w * self.R / 2
        vals = self.R / (2 * self.beta) + (self.R ** 2 - r ** 2) / 4.0
        return float(-0.5 * np.sum(w * 2 * np.pi * r * vals))


def exact_disk_solution(beta: float, R: float = 1.0) -> DiskOracle:
    return DiskOracle(float(beta), float(R))

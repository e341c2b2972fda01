"""Reflection-symmetric triangulations.

The upper half ``x2 >= 0`` of a domain is triangulated with a constrained
Delaunay mesher and the lower half is its exact mirror image.  Nodes are
ordered as ``[upper | axis | lower]`` with ``lower[i] = reflect(upper[i])``,
which makes the reflection map an explicit index shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import triangle
from scipy.spatial import cKDTree

from .geometry import Domain, _equidistribute


class MeshError(ValueError):
    """Invalid mesh request or corrupted mesh data."""


@dataclass(frozen=True)
class Grading:
    """Geometric refinement towards the reentrant corners.

    The local size is ``clip(r / width, h q**levels, h)`` where ``r`` is
    the distance to the nearest graded corner, so it drops by ``q`` from
    one ring of radius ``width * h * q**k`` to the next.
    """

    q: float = 0.5
    levels: int = 8
    width: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise MeshError("grading ratio must lie in (0, 1)")
        if int(self.levels) != self.levels or self.levels < 0:
            raise MeshError("grading levels must be a nonnegative integer")


@dataclass(frozen=True)
class HalfMesh:
    nodes: np.ndarray
    tris: np.ndarray
    bedges: np.ndarray  # curved boundary only, counterclockwise from z_R to z_L
    bpiece: np.ndarray
    param: np.ndarray  # boundary parameter, nan off the boundary
    on_axis: np.ndarray


@dataclass(frozen=True)
class TriMesh:
    """Symmetric triangulation.

    ``nodes[reflect[i]] == (x1[i], -x2[i])`` holds bit for bit.  Boundary
    edges are listed counterclockwise and form one closed loop.
    """

    nodes: np.ndarray
    tris: np.ndarray
    bedges: np.ndarray
    btag: np.ndarray
    reflect: np.ndarray
    n_upper: int
    n_axis: int
    domain: Domain | None = None
    half: HalfMesh | None = field(default=None, repr=False)
    h_target: float = float("nan")
    grading: Grading | None = None
    level: int = 0

    # -- basic geometry -----------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_tris(self) -> int:
        return len(self.tris)

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.tris]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def diameters(self) -> np.ndarray:
        p = self.nodes[self.tris]
        L = np.linalg.norm(p[:, [1, 2, 0]] - p, axis=2)
        return L.max(axis=1)

    @property
    def h(self) -> float:
        return float(self.diameters().max())

    def angles(self) -> np.ndarray:
        p = self.nodes[self.tris]
        out = np.empty((len(p), 3))
        for k in range(3):
            a = p[:, (k + 1) % 3] - p[:, k]
            b = p[:, (k + 2) % 3] - p[:, k]
            cosang = np.sum(a * b, 1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            out[:, k] = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
        return out

    def min_angle(self) -> float:
        return float(self.angles().min())

    def barycenters(self) -> np.ndarray:
        return self.nodes[self.tris].mean(axis=1)

    def edge_lengths(self) -> np.ndarray:
        d = self.nodes[self.bedges[:, 1]] - self.nodes[self.bedges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def boundary_normals(self) -> np.ndarray:
        d = self.nodes[self.bedges[:, 1]] - self.nodes[self.bedges[:, 0]]
        L = np.hypot(d[:, 0], d[:, 1])
        return np.stack([d[:, 1] / L, -d[:, 0] / L], axis=1)

    def boundary_nodes(self) -> np.ndarray:
        """Boundary nodes in counterclockwise loop order."""
        return self.bedges[:, 0].copy()

    @property
    def node_param(self) -> np.ndarray:
        """Boundary parameter of every node (nan in the interior)."""
        hp = self.half.param
        m, k = self.n_upper, self.n_axis
        out = np.full(self.n_nodes, np.nan)
        out[: m + k] = hp
        if self.domain is not None:
            out[m + k:] = self.domain.reflect_param(hp[:m])
        return out

    def local_size(self, point) -> float:
        """Largest diameter among triangles touching the node nearest ``point``."""
        i = int(np.argmin(np.sum((self.nodes - np.asarray(point)) ** 2, axis=1)))
        touching = np.any(self.tris == i, axis=1)
        return float(self.diameters()[touching].max())

    # -- search structures --------------------------------------------------

    @cached_property
    def node_tree(self) -> cKDTree:
        return cKDTree(self.nodes)

    @cached_property
    def _bary_tree(self) -> cKDTree:
        return cKDTree(self.barycenters())

    @cached_property
    def neighbors(self) -> np.ndarray:
        """``neighbors[t, k]`` is the triangle across the edge opposite vertex ``k``."""
        t = self.tris
        M = len(t)
        edges = np.concatenate([t[:, [1, 2]], t[:, [2, 0]], t[:, [0, 1]]])
        owner = np.tile(np.arange(M), 3)
        slot = np.repeat(np.arange(3), M)
        key = np.sort(edges, axis=1)
        order = np.lexsort((key[:, 1], key[:, 0]))
        ks = key[order]
        same = np.all(ks[1:] == ks[:-1], axis=1)
        nb = np.full((M, 3), -1, dtype=np.int64)
        i = np.flatnonzero(same)
        a, b = order[i], order[i + 1]
        nb[owner[a], slot[a]] = owner[b]
        nb[owner[b], slot[b]] = owner[a]
        return nb

    def barycentric(self, tri_index, points) -> np.ndarray:
        p = self.nodes[self.tris[tri_index]]
        v0, v1, v2 = p[:, 0], p[:, 1], p[:, 2]
        d = ((v1[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1])
             - (v2[:, 0] - v0[:, 0]) * (v1[:, 1] - v0[:, 1]))
        l1 = ((points[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1])
              - (v2[:, 0] - v0[:, 0]) * (points[:, 1] - v0[:, 1])) / d
        l2 = ((v1[:, 0] - v0[:, 0]) * (points[:, 1] - v0[:, 1])
              - (points[:, 0] - v0[:, 0]) * (v1[:, 1] - v0[:, 1])) / d
        return np.stack([1.0 - l1 - l2, l1, l2], axis=1)

    def locate(self, points, tol: float = 1e-12):
        """Containing triangle (``-1`` outside) and barycentric coordinates.

        Starts at the triangle with the nearest barycenter and walks across
        the edge with the most negative coordinate.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(points)
        _, cur = self._bary_tree.query(points)
        cur = np.asarray(cur, dtype=np.int64)
        found = np.full(n, -1, dtype=np.int64)
        lam = np.zeros((n, 3))
        active = np.arange(n)
        nb = self.neighbors
        for _ in range(4 * int(np.sqrt(self.n_tris)) + 50):
            if active.size == 0:
                break
            L = self.barycentric(cur[active], points[active])
            k = np.argmin(L, axis=1)
            ok = L[np.arange(len(active)), k] >= -tol
            found[active[ok]] = cur[active[ok]]
            lam[active[ok]] = L[ok]
            nxt = nb[cur[active[~ok]], k[~ok]]
            stuck = nxt < 0
            rest = active[~ok]
            cur[rest[~stuck]] = nxt[~stuck]
            active = rest[~stuck]
            lost = rest[stuck]
            if lost.size:
                # walked into the boundary; retry among nearby triangles
                _, cand = self._bary_tree.query(points[lost], k=min(32, self.n_tris))
                for j, c in zip(lost, np.atleast_2d(cand)):
                    Lc = self.barycentric(c, np.repeat(points[j:j + 1], len(c), 0))
                    good = np.flatnonzero(Lc.min(axis=1) >= -tol)
                    if good.size:
                        found[j] = c[good[0]]
                        lam[j] = Lc[good[0]]
        return found, lam

    def interpolate(self, values, points):
        """P1 interpolation of nodal ``values``; ``nan`` outside the mesh."""
        t, lam = self.locate(points)
        values = np.asarray(values)
        out = np.full((len(t),) + values.shape[1:], np.nan)
        ok = t >= 0
        idx = self.tris[t[ok]]
        out[ok] = np.einsum("ij,ij...->i...", lam[ok], values[idx])
        return out

    # -- invariants ---------------------------------------------------------

    def invariants(self) -> dict:
        """Structural checks; every value is ``True`` on a valid mesh."""
        out = {}
        out["positive_area"] = bool(np.all(self.signed_areas() > 0.0))
        e = np.sort(np.concatenate([self.tris[:, [0, 1]], self.tris[:, [1, 2]],
                                    self.tris[:, [2, 0]]]), axis=1)
        uniq, counts = np.unique(e, axis=0, return_counts=True)
        bset = {tuple(x) for x in uniq[counts == 1]}
        mine = {tuple(sorted(x)) for x in self.bedges}
        out["boundary_edges_once"] = bset == mine and bool(np.all(counts <= 2))
        nxt = dict(zip(self.bedges[:, 0], self.bedges[:, 1]))
        start = int(self.bedges[0, 0])
        cur, steps = start, 0
        while True:
            cur = nxt.get(cur)
            steps += 1
            if cur is None or cur == start or steps > len(self.bedges):
                break
        out["single_loop"] = cur == start and steps == len(self.bedges)
        V, E, F = self.n_nodes, len(uniq), self.n_tris
        out["euler"] = V - E + F == 1
        r = self.reflect
        out["involution"] = bool(np.all(r[r] == np.arange(V)))
        out["reflection_exact"] = bool(
            np.all(self.nodes[r, 0] == self.nodes[:, 0])
            and np.all(self.nodes[r, 1] == -self.nodes[:, 1]))
        return out

    def write(self, path) -> None:
        write_mesh(self, path)


# ---------------------------------------------------------------------------
# construction


def _size_function(domain, h, grading):
    corners = domain.reentrant_corners
    corners = corners[corners[:, 1] > 0] if len(corners) else corners
    hmin = h if grading is None or len(corners) == 0 else h * grading.q ** grading.levels

    def size(pts):
        pts = np.asarray(pts, dtype=float)
        if hmin == h:
            return np.full(pts.shape[:-1], h)
        r = np.min(np.linalg.norm(pts[..., None, :] - corners, axis=-1), axis=-1)
        return np.clip(r / grading.width, hmin, h)

    return size, hmin


# area bound per h^2; keeps the largest diameter close to h
_AREA_FACTOR = 0.6 * np.sqrt(3.0) / 4.0


def mesh_domain(domain: Domain, h_target: float, grading: Grading | tuple | None = None,
                min_angle: float = 30.0, diagonal: bool = False) -> TriMesh:
    """Triangulate ``domain`` with maximal element size about ``h_target``.

    ``grading`` refines geometrically towards reentrant corners (ignored
    for domains without them).  The lower half is the mirror image of the
    upper half.  With ``diagonal=True`` a square cross is meshed on one
    eighth and unfolded, so the mesh is also invariant under
    ``(x1, x2) -> (x2, x1)``.
    """
    if not h_target > 0:
        raise MeshError("h_target must be positive")
    if h_target > 0.5 * domain.feature_size:
        raise MeshError(
            f"h_target={h_target:g} is too large for the narrowest feature "
            f"({domain.feature_size:g})")
    if isinstance(grading, tuple):
        grading = Grading(*grading)
    if grading is not None and grading.levels == 0:
        grading = None
    size, hmin = _size_function(domain, h_target, grading)
    if hmin < 1e-9 * domain.feature_size:
        raise MeshError("grading produces element sizes below a meaningful scale")

    if diagonal:
        return _mirror(_wedge_half(domain, h_target, size, hmin, min_angle),
                       domain, h_target, grading, 0)
    up, up_param, up_piece = domain.upper_boundary(size, hmin)
    zr, zl = up[0], up[-1]
    ax_len = zr[0] - zl[0]
    xs = _equidistribute(ax_len, lambda s: size(np.stack([zl[0] + s, 0 * s], -1)), hmin)
    axis = np.stack([zl[0] + xs[1:-1], np.zeros(len(xs) - 2)], -1)
    verts = np.concatenate([up, axis])
    nb = len(verts)
    nodes, tris, vm = _triangulate(verts, size, h_target, min_angle)
    nu = len(up)
    param = np.full(len(nodes), np.nan)
    param[:nu] = up_param
    key = np.full(len(nodes), np.nan)
    key[:nu] = np.arange(nu)
    for i in np.flatnonzero((np.arange(len(nodes)) >= nb) & (vm > 0)):
        k = vm[i] - 1
        if k < nu - 1:
            # Steiner point on a curved segment: move it onto the boundary
            a, b = verts[k], verts[k + 1]
            frac = np.hypot(*(nodes[i] - a)) / np.hypot(*(b - a))
            param[i] = up_param[k] + frac * (up_param[k + 1] - up_param[k])
            key[i] = k + frac
        else:
            nodes[i, 1] = 0.0
    curved = np.flatnonzero(np.isfinite(key) & (np.arange(len(nodes)) >= nb))
    if len(curved):
        nodes[curved] = domain.boundary_point(param[curved])
    tris = _orient(nodes, tris) if len(curved) == 0 else _check_orientation(nodes, tris)
    chain = np.flatnonzero(np.isfinite(key))
    chain = chain[np.argsort(key[chain], kind="stable")]
    bed = np.stack([chain[:-1], chain[1:]], -1)
    bpiece = up_piece[np.floor(key[chain[:-1]]).astype(np.int64)]
    on_axis = nodes[:, 1] == 0.0
    if np.any(nodes[:, 1] < 0.0):
        raise MeshError("upper-half mesh has nodes below the axis")
    half = HalfMesh(nodes, tris, bed, bpiece, param, on_axis)
    return _mirror(half, domain, h_target, grading, 0)


def _wedge_half(domain, h_target, size, hmin, min_angle) -> HalfMesh:
    """Upper half of a square cross built from a mesh of ``0 <= x2 <= x1``."""
    from .geometry import CrossPolygon

    if not (isinstance(domain, CrossPolygon) and domain.a == domain.b):
        raise MeshError("diagonal meshing needs a cross with a == b")
    a = domain.a
    up, up_param, _ = domain.upper_boundary(size, hmin)
    corner = int(np.flatnonzero((up[:, 0] == 1.0) & (up[:, 1] == 1.0))[0])
    outer, outer_param = up[: corner + 1], up_param[: corner + 1]
    r2 = np.sqrt(2.0)
    sd = _equidistribute(r2, lambda t: size(np.stack([1 - t / r2, 1 - t / r2], -1)), hmin)
    dg = 1.0 - sd[1:-1] / r2
    xs = _equidistribute(a, lambda t: size(np.stack([t, 0 * t], -1)), hmin)
    verts = np.concatenate([outer, np.stack([dg, dg], -1), [[0.0, 0.0]],
                            np.stack([xs[1:-1], 0 * xs[1:-1]], -1)])
    no = len(outer)
    nodes, tris, vm = _triangulate(verts, size, h_target, min_angle)
    param = np.full(len(nodes), np.nan)
    param[:no] = outer_param
    key = np.full(len(nodes), np.nan)
    key[:no] = np.arange(no)
    nd = len(dg)
    for i in np.flatnonzero(vm > 0):
        k = vm[i] - 1
        if k < no - 1:
            a0, b0 = verts[k], verts[k + 1]
            frac = np.hypot(*(nodes[i] - a0)) / np.hypot(*(b0 - a0))
            param[i] = outer_param[k] + frac * (outer_param[k + 1] - outer_param[k])
            key[i] = k + frac
            # straight edges: keep the constant coordinate exact
            j = 0 if a0[0] == b0[0] else 1
            nodes[i, j] = a0[j]
        elif k < no + nd:
            nodes[i] = 0.5 * (nodes[i, 0] + nodes[i, 1])
        else:
            nodes[i, 1] = 0.0
    tris = _orient(nodes, tris)
    chain = np.flatnonzero(np.isfinite(key))
    chain = chain[np.argsort(key[chain], kind="stable")]

    # unfold: swap across the diagonal, then mirror x1 -> -x1
    def unfold(nodes, tris, chain, param, fixed, image, pmap):
        n = len(nodes)
        move = np.flatnonzero(~fixed)
        idx = np.arange(n)
        idx[move] = n + np.arange(len(move))
        new_nodes = np.concatenate([nodes, image(nodes[move])])
        new_tris = np.concatenate([tris, idx[tris][:, [0, 2, 1]]])
        new_param = np.concatenate([param, pmap(param[move])])
        new_chain = np.concatenate([chain, idx[chain[::-1]][1:]])
        return new_nodes, new_tris, new_chain, new_param

    P = domain.perimeter
    nodes, tris, chain, param = unfold(
        nodes, tris, chain, param, nodes[:, 0] == nodes[:, 1], lambda q: q[:, ::-1],
        lambda t: P / 4 - t)
    nodes, tris, chain, param = unfold(
        nodes, tris, chain, param, nodes[:, 0] == 0.0,
        lambda q: np.stack([-q[:, 0], q[:, 1]], -1), lambda t: P / 2 - t)
    bed = np.stack([chain[:-1], chain[1:]], -1)
    mid = 0.5 * (param[bed[:, 0]] + param[bed[:, 1]])
    offs = domain._offsets
    bpiece = np.searchsorted(offs, mid, side="right") - 1
    return HalfMesh(nodes, tris, bed, bpiece, param, nodes[:, 1] == 0.0)


def _triangulate(verts, size, h_target, min_angle):
    """Quality triangulation of a closed polygon with size-driven refinement.

    Returns nodes, triangles and, per node, the 1-based index of the input
    segment it lies on (0 for interior nodes).  Input vertices come first.
    """
    nb = len(verts)
    seg = np.stack([np.arange(nb), (np.arange(nb) + 1) % nb], -1)
    # Triangle crashes on repeated vertices instead of reporting them
    if len(np.unique(verts, axis=0)) < nb:
        raise MeshError("boundary polygon has repeated vertices")

    def req_area(pts):
        return _AREA_FACTOR * size(pts) ** 2

    opts = f"pq{min_angle:g}"
    markers = np.arange(1, nb + 1)[:, None]
    tri = triangle.triangulate(
        {"vertices": verts, "segments": seg, "segment_markers": markers,
         "vertex_markers": np.zeros((nb, 1), dtype=np.int32)},
        opts + f"a{_AREA_FACTOR * h_target ** 2:.17g}")
    for _ in range(60):
        v, t = tri["vertices"], tri["triangles"]
        p = v[t]
        area = 0.5 * np.abs((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
        need = req_area(p.mean(axis=1))
        if np.all(area <= 1.05 * need):
            break
        tri["triangle_max_area"] = np.minimum(need, area)
        tri = triangle.triangulate(tri, "r" + opts + "a")
    else:
        raise MeshError("graded refinement did not converge")
    nodes = np.array(tri["vertices"], dtype=float)
    if not np.array_equal(nodes[:nb], verts):
        raise MeshError("mesher moved boundary nodes")
    vm = np.asarray(tri["vertex_markers"]).reshape(-1).astype(np.int64)
    vm[:nb] = 0
    return nodes, np.array(tri["triangles"], dtype=np.int64), vm


def _check_orientation(nodes, tris):
    tris = _orient(nodes, tris)
    p = nodes[tris]
    d = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
         - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
    if np.any(d <= 0):
        raise MeshError("boundary projection inverted a triangle; decrease h_target")
    return tris


def _orient(nodes, tris):
    p = nodes[tris]
    d = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
         - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
    tris = tris.copy()
    neg = d < 0
    tris[neg] = tris[neg][:, [0, 2, 1]]
    return tris


def _mirror(half: HalfMesh, domain, h_target, grading, level) -> TriMesh:
    on_axis = half.on_axis
    upper = np.flatnonzero(~on_axis)
    axis = np.flatnonzero(on_axis)
    m, k = len(upper), len(axis)
    order = np.concatenate([upper, axis])
    new_of_old = np.empty(len(order), dtype=np.int64)
    new_of_old[order] = np.arange(len(order))
    hn = half.nodes[order].copy()
    hn[m:, 1] = 0.0  # normalise any negative zero
    low = hn[:m].copy()
    low[:, 1] = -low[:, 1]
    nodes = np.concatenate([hn, low])
    reflect = np.concatenate([np.arange(m) + m + k, np.arange(m, m + k), np.arange(m)])

    ut = new_of_old[half.tris]
    lt = reflect[ut][:, [0, 2, 1]]
    tris = np.concatenate([ut, lt])

    ub = new_of_old[half.bedges]
    lb = reflect[ub[::-1]][:, [1, 0]]
    bedges = np.concatenate([ub, lb])
    tags_up = np.array(domain.piece_tags(), dtype=object)[half.bpiece] if domain is not None \
        else np.full(len(ub), "boundary", dtype=object)
    btag = np.concatenate([tags_up, tags_up[::-1]])

    hhalf = HalfMesh(hn, ut, ub, half.bpiece, half.param[order], np.arange(len(hn)) >= m)
    return TriMesh(nodes=nodes, tris=tris, bedges=bedges, btag=btag, reflect=reflect,
                   n_upper=m, n_axis=k, domain=domain, half=hhalf, h_target=h_target,
                   grading=grading, level=level)


def refine(mesh: TriMesh) -> TriMesh:
    """Uniform red refinement; new boundary nodes are moved onto the true boundary."""
    half = mesh.half
    if half is None:
        raise MeshError("refinement needs the generating half mesh")
    t = half.tris
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    es = np.sort(e, axis=1)
    uniq, inv = np.unique(es, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    n0 = len(half.nodes)
    mid = 0.5 * (half.nodes[uniq[:, 0]] + half.nodes[uniq[:, 1]])
    param = np.concatenate([half.param, np.full(len(uniq), np.nan)])

    # boundary edges: parameter midpoint projected onto the boundary
    bkey = np.sort(half.bedges, axis=1)
    lookup = {tuple(x): i for i, x in enumerate(uniq)}
    bidx = np.array([lookup[tuple(x)] for x in bkey], dtype=np.int64)
    pa = half.param[half.bedges[:, 0]]
    pb = half.param[half.bedges[:, 1]]
    pm = 0.5 * (pa + pb)
    if mesh.domain is not None:
        mid[bidx] = mesh.domain.boundary_point(pm)
    param[n0 + bidx] = pm
    axis_edge = half.on_axis[uniq[:, 0]] & half.on_axis[uniq[:, 1]]
    mid[axis_edge, 1] = 0.0
    nodes = np.concatenate([half.nodes, mid])

    M = len(t)
    m01, m12, m20 = (n0 + inv[:M], n0 + inv[M:2 * M], n0 + inv[2 * M:])
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    tris = np.concatenate([np.stack([a, m01, m20], 1), np.stack([m01, b, m12], 1),
                           np.stack([m20, m12, c], 1), np.stack([m01, m12, m20], 1)])
    nb = len(half.bedges)
    bm = n0 + bidx
    bed = np.empty((2 * nb, 2), dtype=np.int64)
    bed[0::2, 0], bed[0::2, 1] = half.bedges[:, 0], bm
    bed[1::2, 0], bed[1::2, 1] = bm, half.bedges[:, 1]
    bpiece = np.repeat(half.bpiece, 2)
    on_axis = nodes[:, 1] == 0.0
    new = HalfMesh(nodes, tris, bed, bpiece, param, on_axis)
    return _mirror(new, mesh.domain, 0.5 * mesh.h_target, mesh.grading, mesh.level + 1)


# ---------------------------------------------------------------------------
# text format


def write_mesh(mesh: TriMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"#nodes {mesh.n_nodes}\n")
        for i, (x, y) in enumerate(mesh.nodes):
            fh.write(f"{i} {x:.17g} {y:.17g}\n")
        fh.write(f"#tris {mesh.n_tris}\n")
        for j, (a, b, c) in enumerate(mesh.tris):
            fh.write(f"{j} {a} {b} {c}\n")
        fh.write(f"#bedges {len(mesh.bedges)}\n")
        for k, ((a, b), tag) in enumerate(zip(mesh.bedges, mesh.btag)):
            fh.write(f"{k} {a} {b} {tag}\n")


def read_mesh(path) -> TriMesh:
    """Read the text format back; the reflection map is rebuilt from coordinates."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    pos = 0

    def block(name):
        nonlocal pos
        head = lines[pos].split()
        if head[0] != f"#{name}":
            raise MeshError(f"expected #{name} at line {pos + 1}")
        n = int(head[1])
        rows = [ln.split() for ln in lines[pos + 1: pos + 1 + n]]
        pos += n + 1
        return rows

    nodes = np.array([[float(r[1]), float(r[2])] for r in block("nodes")])
    tris = np.array([[int(r[1]), int(r[2]), int(r[3])] for r in block("tris")], dtype=np.int64)
    brows = block("bedges")
    bedges = np.array([[int(r[1]), int(r[2])] for r in brows], dtype=np.int64)
    btag = np.array([r[3] for r in brows], dtype=object)
    index = {(x, y): i for i, (x, y) in enumerate(map(tuple, nodes))}
    try:
        reflect = np.array([index[(x, -y if y != 0.0 else 0.0)] for x, y in nodes])
    except KeyError as exc:
        raise MeshError("mesh is not reflection symmetric") from exc
    n_axis = int(np.sum(nodes[:, 1] == 0.0))
    n_upper = int(np.sum(nodes[:, 1] > 0.0))
    return TriMesh(nodes=nodes, tris=tris, bedges=bedges, btag=btag, reflect=reflect,
                   n_upper=n_upper, n_axis=n_axis)


def with_domain(mesh: TriMesh, domain) -> TriMesh:
    return replace(mesh, domain=domain)

"""Symmetric planar domains, boundary traces and deformation families.

Every domain is symmetric under the reflection ``x2 -> -x2`` and convex in
the ``x2`` direction.  Smooth domains are closed curves ``gamma(sigma)``
traversed counterclockwise with ``gamma(0) = z_R`` and ``gamma(pi) = z_L``;
polygonal domains are chains of line segments and circular arcs, with the
arclength from ``z_R`` as parameter.

Curvature is positive on convex boundary arcs.  Traces are reported in
clockwise order, so that the tangent ``tau`` and the outward normal ``nu``
form a right-handed frame and ``d tau / ds = -kappa nu``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_simpson
from shapely.geometry import LinearRing

TWO_PI = 2.0 * np.pi


class DomainError(ValueError):
    """Invalid domain parameters or an unsupported construction."""


class NonSmoothSum(DomainError):
    """A Minkowski combination whose boundary develops a corner."""


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _ccw_normal(tangent):
    # outward normal of a counterclockwise boundary
    return np.stack([tangent[..., 1], -tangent[..., 0]], axis=-1)


# ---------------------------------------------------------------------------
# boundary pieces, used by the mesher to place boundary nodes


@dataclass(frozen=True)
class _Piece:
    """A boundary piece with arclength coordinate ``s in [0, length]``."""

    length: float
    tag: str
    kappa: float  # nan for pieces with varying curvature
    at: object = field(repr=False)  # s -> (points, params)


def _equidistribute(length, size_of_s, size_min):
    """Positions in [0, length] with local spacing at most ``size_of_s``."""
    n_fine = int(min(2e5, max(256, 8 * length / size_min)))
    s = np.linspace(0.0, length, n_fine)
    dens = 1.0 / size_of_s(s)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(s))])
    n = max(1, int(np.ceil(cum[-1] * 1.02)))
    targets = np.linspace(0.0, cum[-1], n + 1)
    pos = np.interp(targets, cum, s)
    pos[0], pos[-1] = 0.0, length
    return pos


class Domain:
    """Base class of all domains."""

    kind = "domain"
    smooth = False

    @property
    def reentrant_corners(self) -> np.ndarray:
        return np.zeros((0, 2))

    @property
    def feature_size(self) -> float:
        raise NotImplementedError

    def config(self) -> dict:
        raise NotImplementedError

    def contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def upper_pieces(self) -> list:
        raise NotImplementedError

    def boundary_point(self, params) -> np.ndarray:
        raise NotImplementedError

    def reflect_param(self, params):
        """Boundary parameter of the mirror image ``(x1, -x2)``."""
        raise NotImplementedError

    def trace(self, n: int) -> "BoundaryTrace":
        return boundary_trace(self, n)

    def upper_boundary(self, size_fn, size_min):
        """Boundary nodes of the upper half, from ``z_R`` to ``z_L``.

        Returns points, parameters and the piece index of every segment
        between consecutive nodes.
        """
        pts, params, seg_piece = [], [], []
        for k, piece in enumerate(self.upper_pieces()):
            def size_of_s(s, piece=piece):
                return size_fn(piece.at(s)[0])

            s = _equidistribute(piece.length, size_of_s, size_min)
            p, q = piece.at(s)
            start = 0 if k == 0 else 1
            pts.append(p[start:])
            params.append(q[start:])
            seg_piece.append(np.full(len(s) - 1, k))
        pts = np.concatenate(pts)
        pts[0, 1] = 0.0
        pts[-1, 1] = 0.0
        return pts, np.concatenate(params), np.concatenate(seg_piece)

    def piece_tags(self) -> list:
        return [p.tag for p in self.upper_pieces()]

    def check_A1(self, n: int = 801) -> bool:
        """Symmetry and x2-convexity, checked on an ``n x n`` sample grid.

        Every vertical line must meet the domain in one interval centred
        on the axis.
        """
        pts = self.upper_boundary(lambda p: np.full(len(p), np.inf), np.inf)[0]
        l = float(np.max(np.abs(pts[:, 0])))
        top = 1.05 * float(np.max(np.abs(pts[:, 1])))
        x1 = np.linspace(-l, l, n)[1:-1]
        x2 = np.linspace(-top, top, n)
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        inside = self.contains(np.stack([X1, X2], -1))
        if not np.array_equal(inside, inside[:, ::-1]):
            return False
        # a single run of True per column
        starts = np.sum(np.diff(inside.astype(int), axis=1) == 1, axis=1)
        return bool(np.all(starts <= 1) and np.all(inside[:, n // 2]))


# ---------------------------------------------------------------------------
# smooth domains


class ProfileDomain(Domain):
    """Smooth domain ``{|x2| < phi(x1)}`` given by a closed curve.

    Subclasses implement :meth:`curve`, returning the point and its first two
    derivatives with respect to the counterclockwise parameter ``sigma``.
    """

    kind = "profile"
    smooth = True
    _n_table = 2 ** 14

    def curve(self, sigma):
        raise NotImplementedError

    def curvature(self, sigma):
        _, d1, d2 = self.curve(np.asarray(sigma, dtype=float))
        return _cross(d1, d2) / np.linalg.norm(d1, axis=-1) ** 3

    def point(self, sigma):
        return self.curve(np.asarray(sigma, dtype=float))[0]

    def tangent(self, sigma):
        """Unit counterclockwise tangent."""
        return _unit(self.curve(np.asarray(sigma, dtype=float))[1])

    # -- derived geometry --------------------------------------------------

    @cached_property
    def _table(self):
        sig = np.linspace(0.0, TWO_PI, self._n_table + 1)
        speed = np.linalg.norm(self.curve(sig)[1], axis=-1)
        return sig, cumulative_simpson(speed, x=sig, initial=0.0)

    @property
    def perimeter(self) -> float:
        return float(self._table[1][-1])

    def sigma_of_s(self, s):
        sig, arc = self._table
        return np.interp(np.mod(s, self.perimeter), arc, sig)

    @cached_property
    def half_width(self) -> float:
        return float(self.point(0.0)[0])

    @property
    def vertices(self):
        return self.point(np.pi), self.point(0.0)

    @cached_property
    def height(self) -> float:
        sig = np.linspace(0.0, np.pi, 4097)
        return float(self.point(sig)[:, 1].max())

    @property
    def feature_size(self) -> float:
        return min(self.half_width, self.height)

    def profile(self, x1):
        """Graph ``phi(x1)`` of the upper boundary (zero outside)."""
        x1 = np.asarray(x1, dtype=float)
        lo = np.zeros_like(x1)
        hi = np.full_like(x1, np.pi)
        # x1(sigma) decreases on [0, pi] by x2-convexity
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            right = self.point(mid)[..., 0] > x1
            lo = np.where(right, mid, lo)
            hi = np.where(right, hi, mid)
        phi = self.point(0.5 * (lo + hi))[..., 1]
        l = self.half_width
        return np.where(np.abs(x1) < l, np.maximum(phi, 0.0), 0.0)

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        return np.abs(points[..., 1]) < self.profile(points[..., 0])

    def check_A1(self, n: int = 4096) -> bool:
        """Symmetry and x2-convexity, checked on samples."""
        sig = np.linspace(0.0, np.pi, n + 2)[1:-1]
        p, d1, _ = self.curve(sig)
        q = self.point(-sig)
        symmetric = np.allclose(q[:, 0], p[:, 0], atol=1e-12) and np.allclose(
            q[:, 1], -p[:, 1], atol=1e-12)
        return bool(symmetric and np.all(d1[:, 0] < 0.0) and np.all(p[:, 1] > 0.0))

    def min_curvature_dense(self, n: int = 8192) -> float:
        sig = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return float(self.curvature(sig).min())

    def is_convex(self) -> bool:
        return self.min_curvature_dense() >= 0.0

    def support_point(self, normal):
        """Boundary point with outward normal ``normal`` and its radius of curvature.

        Only meaningful for strictly convex domains.
        """
        sig, alpha = self._normal_table
        ang = np.unwrap(np.arctan2(normal[..., 1], normal[..., 0]))
        ang = np.mod(ang - alpha[0], TWO_PI) + alpha[0]
        s = np.interp(ang, alpha, sig)
        for _ in range(3):
            p, d1, d2 = self.curve(s)
            nrm = _ccw_normal(_unit(d1))
            a = np.arctan2(nrm[..., 1], nrm[..., 0])
            da = np.mod(ang - a + np.pi, TWO_PI) - np.pi
            rate = _cross(d1, d2) / np.sum(d1 * d1, axis=-1)
            s = s + da / rate
        p = self.point(s)
        return p, 1.0 / self.curvature(s)

    @cached_property
    def _normal_table(self):
        sig = np.linspace(0.0, TWO_PI, 8193)
        nrm = _ccw_normal(_unit(self.curve(sig)[1]))
        alpha = np.unwrap(np.arctan2(nrm[:, 1], nrm[:, 0]))
        if np.any(np.diff(alpha) <= 0.0):
            raise DomainError("support points need a strictly convex domain")
        return sig, alpha

    # -- meshing interface --------------------------------------------------

    def upper_pieces(self):
        sig, arc = self._table
        half = float(np.interp(np.pi, sig, arc))

        def at(s):
            si = np.interp(s, arc, sig)
            si = np.where(s >= half, np.pi, si)
            return self.point(si), si

        return [_Piece(half, "smooth", np.nan, at)]

    def boundary_point(self, params):
        return self.point(params)

    def reflect_param(self, params):
        return np.mod(-np.asarray(params, dtype=float), TWO_PI)

    def describe(self) -> str:
        return f"{self.kind}{self.config()}"


def _xy(c, s):
    return np.stack([c, s], axis=-1)


class Ellipse(ProfileDomain):
    """Ellipse with semi-axes ``a`` (along x1) and ``b``."""

    kind = "ellipse"

    def __init__(self, a: float = 2.0, b: float = 1.0):
        if not (a > 0 and b > 0):
            raise DomainError("ellipse semi-axes must be positive")
        self.a, self.b = float(a), float(b)

    def curve(self, sigma):
        c, s = np.cos(sigma), np.sin(sigma)
        return (_xy(self.a * c, self.b * s), _xy(-self.a * s, self.b * c),
                _xy(-self.a * c, -self.b * s))

    def support_point(self, normal):
        nx, ny = normal[..., 0], normal[..., 1]
        q = np.sqrt((self.a * nx) ** 2 + (self.b * ny) ** 2)
        p = _xy(self.a ** 2 * nx / q, self.b ** 2 * ny / q)
        ct, st = p[..., 0] / self.a, p[..., 1] / self.b
        radius = ((self.a * st) ** 2 + (self.b * ct) ** 2) ** 1.5 / (self.a * self.b)
        return p, radius

    def config(self):
        return {"kind": "ellipse", "a": self.a, "b": self.b}


class Disk(Ellipse):
    """Disk of radius ``R`` centred at the origin."""

    kind = "disk"

    def __init__(self, R: float = 1.0):
        super().__init__(R, R)
        self.R = float(R)

    def config(self):
        return {"kind": "disk", "R": self.R}


class PolarDomain(ProfileDomain):
    """Star-shaped domain with boundary radius ``R(sigma)`` about the origin.

    ``radius`` returns ``(R, R', R'')`` for an array of angles.
    """

    kind = "polar"

    def __init__(self, radius, label: dict | None = None):
        self._radius = radius
        self._label = label or {"kind": "polar"}

    def radius(self, sigma):
        return self._radius(sigma)

    def curve(self, sigma):
        R, dR, ddR = self.radius(sigma)
        c, s = np.cos(sigma), np.sin(sigma)
        er, et = _xy(c, s), _xy(-s, c)
        p = R[..., None] * er
        d1 = dR[..., None] * er + R[..., None] * et
        d2 = (ddR - R)[..., None] * er + 2.0 * dR[..., None] * et
        return p, d1, d2

    def config(self):
        return dict(self._label)


class Peanut(PolarDomain):
    """Peanut ``R(sigma) = 1 + neck * cos(2 sigma)``, nonconvex for ``neck > 1/5``.

    The curvature is smallest at the waist ``(0, 1 - neck)`` where it equals
    ``(1 - 5 neck) / (1 - neck)**2``.  The domain is x2-convex for every
    ``neck in [0, 1)``.
    """

    kind = "peanut"

    def __init__(self, neck: float = 0.4):
        if not 0.0 <= neck < 1.0:
            raise DomainError("peanut neck parameter must lie in [0, 1)")
        self.neck = float(neck)

        def radius(sigma, e=self.neck):
            c2, s2 = np.cos(2 * sigma), np.sin(2 * sigma)
            return 1.0 + e * c2, -2.0 * e * s2, -4.0 * e * c2

        super().__init__(radius)

    @classmethod
    def with_min_curvature(cls, kappa_min: float) -> "Peanut":
        """Peanut whose waist curvature equals ``kappa_min`` (< 1)."""
        k = float(kappa_min)
        if not k < 1.0:
            raise DomainError("peanut waist curvature must be below 1")
        # k (1 - e)^2 = 1 - 5 e
        if k == 0.0:
            e = 0.2
        else:
            A, B, C = k, 5.0 - 2.0 * k, k - 1.0
            e = (-B + np.sqrt(B * B - 4 * A * C)) / (2 * A)
        return cls(e)

    @property
    def waist_curvature(self) -> float:
        e = self.neck
        return (1 - 5 * e) / (1 - e) ** 2

    def config(self):
        return {"kind": "peanut", "neck": self.neck}


class Stadium(ProfileDomain):
    """Rectangle ``[-L, L] x [-R, R]`` capped by half disks of radius ``R``.

    The parameter is proportional to arclength; the curvature jumps between
    0 and ``1/R`` at the four junctions.
    """

    kind = "stadium"

    def __init__(self, length: float = 1.0, radius: float = 1.0):
        if not (length > 0 and radius > 0):
            raise DomainError("stadium length and radius must be positive")
        self.L, self.R = float(length), float(radius)
        self._P = 4 * self.L + TWO_PI * self.R

    def curve(self, sigma):
        L, R, P = self.L, self.R, self._P
        s = np.mod(np.asarray(sigma, dtype=float), TWO_PI) * P / TWO_PI
        k = P / TWO_PI  # ds / dsigma
        q = 0.5 * np.pi * R
        b = np.array([q, q + 2 * L, 3 * q + 2 * L, 3 * q + 4 * L])
        p = np.empty(s.shape + (2,))
        d1 = np.empty_like(p)
        d2 = np.zeros_like(p)

        def arc(mask, cx, a):
            c, sn = np.cos(a[mask]), np.sin(a[mask])
            p[mask] = np.stack([cx + R * c, R * sn], -1)
            d1[mask] = k * np.stack([-sn, c], -1)
            d2[mask] = k * k / R * np.stack([-c, -sn], -1)

        m0 = s < b[0]
        arc(m0, L, s / R)
        m1 = (s >= b[0]) & (s < b[1])
        p[m1] = np.stack([L - (s[m1] - b[0]), np.full(m1.sum(), R)], -1)
        d1[m1] = [-k, 0.0]
        m2 = (s >= b[1]) & (s < b[2])
        arc(m2, -L, 0.5 * np.pi + (s - b[1]) / R)
        m3 = (s >= b[2]) & (s < b[3])
        p[m3] = np.stack([-L + (s[m3] - b[2]), np.full(m3.sum(), -R)], -1)
        d1[m3] = [k, 0.0]
        m4 = s >= b[3]
        arc(m4, L, -0.5 * np.pi + (s - b[3]) / R)
        return p, d1, d2

    def config(self):
        return {"kind": "stadium", "length": self.L, "radius": self.R}


class ScaledDomain(ProfileDomain):
    """Dilation ``factor * base`` of a smooth domain."""

    kind = "scaled"

    def __init__(self, base: ProfileDomain, factor: float):
        if not factor > 0:
            raise DomainError("dilation factor must be positive")
        self.base, self.factor = base, float(factor)

    def curve(self, sigma):
        p, d1, d2 = self.base.curve(sigma)
        f = self.factor
        return f * p, f * d1, (None if d2 is None else f * d2)

    def curvature(self, sigma):
        return self.base.curvature(sigma) / self.factor

    def support_point(self, normal):
        p, radius = self.base.support_point(normal)
        return self.factor * p, self.factor * radius

    def config(self):
        return {"kind": "scaled", "factor": self.factor, "base": self.base.config()}


class MinkowskiDomain(ProfileDomain):
    """Minkowski combination ``wa * A + wb * B`` with ``A`` strictly convex.

    The boundary is parameterized by the parameter of ``B``: the point of
    ``B`` with outward normal ``n`` is matched with the point of ``A``
    having the same normal.  Radii of curvature add, so the combination is
    smooth exactly when ``wb + wa * rho_A * kappa_B`` stays positive.
    """

    kind = "minkowski"

    def __init__(self, A: ProfileDomain, wa: float, B: ProfileDomain, wb: float,
                 n_check: int = 4096):
        if not (wa > 0 and wb > 0):
            raise DomainError("Minkowski weights must be positive")
        self.A, self.B, self.wa, self.wb = A, B, float(wa), float(wb)
        sig = np.linspace(0.0, TWO_PI, n_check, endpoint=False)
        f = self.speed_factor(sig)
        if f.min() <= 0.0:
            bad = sig[np.argmin(f)]
            raise NonSmoothSum(
                f"Minkowski combination has a corner near sigma={bad:.4f} "
                f"(speed factor {f.min():.4g})")

    def _match(self, sigma):
        _, dB, d2B = self.B.curve(sigma)
        nB = _ccw_normal(_unit(dB))
        pA, rhoA = self.A.support_point(nB)
        return pA, rhoA, dB

    def speed_factor(self, sigma):
        _, rhoA, _ = self._match(sigma)
        return self.wb + self.wa * rhoA * self.B.curvature(sigma)

    def curve(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        pB, dB, _ = self.B.curve(sigma)
        pA, rhoA, _ = self._match(sigma)
        fac = self.wb + self.wa * rhoA * self.B.curvature(sigma)
        return self.wa * pA + self.wb * pB, fac[..., None] * dB, None

    def curvature(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        kB = self.B.curvature(sigma)
        _, rhoA, _ = self._match(sigma)
        return kB / (self.wb + self.wa * rhoA * kB)

    def config(self):
        return {"kind": "minkowski", "wa": self.wa, "A": self.A.config(),
                "wb": self.wb, "B": self.B.config()}


def minkowski_combination(A, wa, B, wb):
    """``wa * A + wb * B`` for smooth domains, at least one of them convex."""
    if wa < 0 or wb < 0 or wa + wb <= 0:
        raise DomainError("Minkowski weights must be nonnegative and not both zero")
    if wa == 0.0:
        return ScaledDomain(B, wb)
    if wb == 0.0:
        return ScaledDomain(A, wa)
    if A.min_curvature_dense() > 0.0:
        return MinkowskiDomain(A, wa, B, wb)
    if B.min_curvature_dense() > 0.0:
        return MinkowskiDomain(B, wb, A, wa)
    raise DomainError("Minkowski combination needs one strictly convex summand")


class ProfileTable(Domain):
    """Domain given by samples of its profile on a uniform grid.

    ``x`` must run from ``-l`` to ``l`` with ``phi`` vanishing at both ends.
    Derivatives, when not supplied, come from 5-point stencils.
    """

    kind = "profile_table"

    def __init__(self, x, phi, dphi=None, ddphi=None):
        x = np.asarray(x, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if x.ndim != 1 or x.shape != phi.shape or len(x) < 9:
            raise DomainError("a profile table needs at least 9 samples")
        dx = np.diff(x)
        if np.any(dx <= 0):
            raise DomainError("profile table abscissae must increase")
        if (dphi is None or ddphi is None) and not np.allclose(dx, dx[0], rtol=1e-9):
            raise DomainError("derivative data missing and the grid is not uniform")
        if np.any(phi[1:-1] <= 0):
            raise DomainError("profile must be positive inside its interval")
        self.x, self.phi = x, phi
        self.half_width = float(0.5 * (x[-1] - x[0]))
        if dphi is None or ddphi is None:
            dphi, ddphi = _five_point(phi, dx[0])
        self.dphi, self.ddphi = np.asarray(dphi, float), np.asarray(ddphi, float)

    smooth = True

    @property
    def feature_size(self):
        return min(self.half_width, float(self.phi.max()))

    def profile(self, x1):
        return np.interp(x1, self.x, self.phi, left=0.0, right=0.0)

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        return np.abs(points[..., 1]) < self.profile(points[..., 0])

    def curvature_samples(self):
        d, dd = self.dphi, self.ddphi
        # upper graph traversed counterclockwise (x decreasing)
        return -dd / (1.0 + d * d) ** 1.5

    def upper_pieces(self):
        xs = self.x[::-1]
        ys = self.phi[::-1]
        seg = np.sqrt(np.diff(xs) ** 2 + np.diff(ys) ** 2)
        arc = np.concatenate([[0.0], np.cumsum(seg)])

        def at(s):
            px = np.interp(s, arc, xs)
            return np.stack([px, np.interp(s, arc, ys)], -1), px

        return [_Piece(float(arc[-1]), "table", np.nan, at)]

    def boundary_point(self, params):
        params = np.asarray(params, dtype=float)
        return np.stack([params, self.profile(params)], -1)

    def reflect_param(self, params):
        return np.asarray(params, dtype=float)

    def config(self):
        return {"kind": "profile_table", "n": int(len(self.x)), "l": self.half_width}


def _five_point(f, dx):
    d = np.gradient(f, dx, edge_order=2)
    dd = np.gradient(d, dx, edge_order=2)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dx)
    dd[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * dx * dx)
    return d, dd


# ---------------------------------------------------------------------------
# polygonal domains


def _line(p0, p1, offset, tag):
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    L = float(np.hypot(*(p1 - p0)))

    def at(s):
        s = np.asarray(s, dtype=float)
        w = (s / L)[..., None]
        pts = (1.0 - w) * p0 + w * p1
        # exact endpoints keep shared vertices bit-identical
        pts = np.where((s == 0.0)[..., None], p0, pts)
        pts = np.where((s == L)[..., None], p1, pts)
        return pts, offset + s

    return _Piece(L, tag, 0.0, at)


def _arc(center, radius, a0, sweep, offset, tag, p0, p1):
    c = np.asarray(center, float)
    L = abs(sweep) * radius

    def at(s):
        s = np.asarray(s, dtype=float)
        a = a0 + np.sign(sweep) * s / radius
        pts = c + radius * _xy(np.cos(a), np.sin(a))
        pts = np.where((s == 0.0)[..., None], p0, pts)
        pts = np.where((s == L)[..., None], p1, pts)
        return pts, offset + s

    kappa = 1.0 / radius if sweep > 0 else -1.0 / radius
    return _Piece(L, tag, kappa, at)


class _ChainDomain(Domain):
    """Closed counterclockwise chain of pieces starting at ``z_R``."""

    smooth = False

    def _build(self, layout):
        # layout: list of (kind, args...) describing the loop
        pieces, offset = [], 0.0
        for item in layout:
            if item[0] == "line":
                _, p0, p1, tag = item
                pc = _line(p0, p1, offset, tag)
            else:
                _, c, rad, a0, sweep, tag, p0, p1 = item
                pc = _arc(c, rad, a0, sweep, offset, tag, np.asarray(p0, float),
                          np.asarray(p1, float))
            pieces.append(pc)
            offset += pc.length
        self._pieces = pieces
        self._offsets = np.cumsum([0.0] + [p.length for p in pieces])
        self.perimeter = float(self._offsets[-1])
        half = 0.5 * self.perimeter
        k = int(np.argmin(np.abs(self._offsets - half)))
        self._n_upper = k

    @property
    def pieces(self):
        return list(self._pieces)

    def upper_pieces(self):
        return self._pieces[: self._n_upper]

    def boundary_point(self, params):
        params = np.mod(np.asarray(params, dtype=float), self.perimeter)
        idx = np.clip(np.searchsorted(self._offsets, params, side="right") - 1,
                      0, len(self._pieces) - 1)
        out = np.empty(params.shape + (2,))
        for k in np.unique(idx):
            m = idx == k
            out[m] = self._pieces[k].at(params[m] - self._offsets[k])[0]
        return out

    def reflect_param(self, params):
        return np.mod(self.perimeter - np.asarray(params, dtype=float), self.perimeter)

    def corner_tags(self):
        """Tag of the junction at the start of every piece."""
        return list(self._junction_tags)


def _cross_vertices(a, b):
    """Counterclockwise vertex loop of the cross starting at (a, 0)."""
    V = [(a, 0.0), (a, 1.0), (1.0, 1.0), (1.0, b), (-1.0, b), (-1.0, 1.0),
         (-a, 1.0), (-a, 0.0), (-a, -1.0), (-1.0, -1.0), (-1.0, -b), (1.0, -b),
         (1.0, -1.0), (a, -1.0)]
    kinds = ["flat", "convex", "reentrant", "convex", "convex", "reentrant",
             "convex", "flat", "convex", "reentrant", "convex", "convex",
             "reentrant", "convex"]
    return np.array(V, dtype=float), kinds


class CrossPolygon(_ChainDomain):
    """Union of the rectangles ``|x1| < a, |x2| < 1`` and ``|x1| < 1, |x2| < b``."""

    kind = "cross"

    def __init__(self, a: float = 2.0, b: float = 2.0):
        if not (a > 1.0 and b > 1.0):
            raise DomainError("cross arms need a > 1 and b > 1")
        self.a, self.b = float(a), float(b)
        V, kinds = _cross_vertices(self.a, self.b)
        n = len(V)
        layout = [("line", V[i], V[(i + 1) % n], "edge") for i in range(n)]
        self._build(layout)
        self._junction_tags = [k if k != "flat" else "edge" for k in kinds]
        self.vertices = V
        self.vertex_kinds = kinds

    @property
    def reentrant_corners(self):
        return np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])

    @property
    def feature_size(self):
        return min(self.a - 1.0, self.b - 1.0, 1.0)

    @property
    def half_width(self):
        return self.a

    def contains(self, points):
        x = np.asarray(points, dtype=float)
        ax, ay = np.abs(x[..., 0]), np.abs(x[..., 1])
        return ((ax < self.a) & (ay < 1.0)) | ((ax < 1.0) & (ay < self.b))

    def config(self):
        return {"kind": "cross", "a": self.a, "b": self.b}


class RoundedCrossPolygon(_ChainDomain):
    """Cross polygon with every vertex replaced by a tangent arc of radius ``rho``.

    Reentrant vertices become concave fillets of curvature ``-1/rho``.
    Adjacent arcs share an edge of length ``a - 1`` (or ``b - 1``), so
    ``rho <= (min(a, b) - 1) / 2`` is required.
    """

    kind = "rounded_cross"
    smooth = True  # C^{1,1}: tangent continuous, curvature jumps

    def __init__(self, a: float = 1.5, b: float = 3.0, rho: float = 0.05):
        if not (a > 1.0 and b > 1.0):
            raise DomainError("cross arms need a > 1 and b > 1")
        rho_max = 0.5 * (min(a, b) - 1.0)
        if not 0.0 < rho <= rho_max:
            raise DomainError(
                f"rounding radius must lie in (0, {rho_max:g}] so that arcs do not overlap")
        self.a, self.b, self.rho = float(a), float(b), float(rho)
        V, kinds = _cross_vertices(self.a, self.b)
        n = len(V)
        layout, prev = [], V[0]
        self._arcs = []
        for i in range(1, n + 1):
            v = V[i % n]
            kind = kinds[i % n]
            if kind == "flat":
                layout.append(("line", prev, v, "edge"))
                prev = v
                continue
            din = _unit(v - V[i - 1])
            dout = _unit(V[(i + 1) % n] - v)
            t_in = v - rho * din
            t_out = v + rho * dout
            left = np.array([-din[1], din[0]])
            if kind == "convex":
                c = t_in + rho * left
                sweep, tag = 0.5 * np.pi, "arc"
            else:
                c = t_in - rho * left
                sweep, tag = -0.5 * np.pi, "fillet"
            if np.hypot(*(t_in - prev)) < 1e-12 * rho:
                t_in = prev  # rho at its maximum: the arcs meet, no edge between
            else:
                layout.append(("line", prev, t_in, "edge"))
            a0 = float(np.arctan2(*(t_in - c)[::-1]))
            layout.append(("arc", c, rho, a0, sweep, tag, t_in, t_out))
            self._arcs.append((kind, v, c))
            prev = t_out
        self._build(layout)
        self._junction_tags = ["smooth"] * len(layout)
        self.vertices = V
        self.vertex_kinds = kinds

    @property
    def reentrant_corners(self):
        return np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])

    @property
    def feature_size(self):
        return min(self.a - 1.0, self.b - 1.0, 1.0)

    @property
    def half_width(self):
        return self.a

    def contains(self, points):
        x = np.asarray(points, dtype=float)
        ax, ay = np.abs(x[..., 0]), np.abs(x[..., 1])
        inside = ((ax < self.a) & (ay < 1.0)) | ((ax < 1.0) & (ay < self.b))
        for kind, v, c in self._arcs:
            if v[0] < 0 or v[1] < 0:
                continue  # quadrant symmetry: test with |x|
            lo, hi = np.minimum(v, c), np.maximum(v, c)
            box = (ax >= lo[0]) & (ax <= hi[0]) & (ay >= lo[1]) & (ay <= hi[1])
            far = np.hypot(ax - c[0], ay - c[1]) > self.rho
            if kind == "convex":
                inside &= ~(box & far)
            else:
                inside |= box & far & (np.hypot(ax - c[0], ay - c[1]) > 0)
        return inside

    def config(self):
        return {"kind": "rounded_cross", "a": self.a, "b": self.b, "rho": self.rho}


# ---------------------------------------------------------------------------
# boundary traces


@dataclass(frozen=True)
class BoundaryTrace:
    """Clockwise samples of the boundary with their Frenet frame."""

    s: np.ndarray
    points: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    kappa: np.ndarray
    tag: np.ndarray
    param: np.ndarray
    length: float

    def __len__(self):
        return len(self.s)

    def turning(self) -> float:
        """Total signed turning of the tangent (``-2 pi`` when clockwise)."""
        ang = np.arctan2(self.tau[:, 1], self.tau[:, 0])
        d = np.diff(np.concatenate([ang, ang[:1]]))
        return float(np.sum(np.mod(d + np.pi, TWO_PI) - np.pi))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "x", "y", "tx", "ty", "nx", "ny", "kappa", "tag"])
            for i in range(len(self.s)):
                w.writerow([f"{self.s[i]:.17g}", f"{self.points[i, 0]:.17g}",
                            f"{self.points[i, 1]:.17g}", f"{self.tau[i, 0]:.17g}",
                            f"{self.tau[i, 1]:.17g}", f"{self.nu[i, 0]:.17g}",
                            f"{self.nu[i, 1]:.17g}", f"{self.kappa[i]:.17g}",
                            self.tag[i]])


def _check_simple(points):
    if not LinearRing(points).is_simple:
        raise DomainError("boundary is not simple (self-intersection detected)")


def boundary_trace(domain: Domain, n: int = 512) -> BoundaryTrace:
    """Sample the boundary clockwise at ``n`` arclength-uniform positions.

    Polygon vertices are added as extra samples tagged ``convex`` or
    ``reentrant``; their curvature is ``nan`` and their tangent is the
    average of the two adjacent edge directions.
    """
    if n < 64:
        raise DomainError("boundary traces need at least 64 samples")
    if isinstance(domain, ProfileDomain):
        P = domain.perimeter
        s = np.arange(n) * (P / n)
        sig = domain.sigma_of_s(P - s)
        sig[0] = 0.0
        p, d1, d2 = domain.curve(sig)
        T = _unit(d1)
        kappa = domain.curvature(sig)
        tag = np.full(n, "smooth", dtype=object)
        param = sig
        length = P
    elif isinstance(domain, ProfileTable):
        return _table_trace(domain, n)
    elif isinstance(domain, _ChainDomain):
        P = domain.perimeter
        offs = domain._offsets
        s_ccw = np.unique(np.concatenate([np.arange(n) * (P / n), offs[:-1]]))
        # drop uniform samples that nearly coincide with a junction
        keep = np.ones(len(s_ccw), bool)
        near = np.min(np.abs(s_ccw[:, None] - offs[None, :-1]), axis=1)
        is_j = np.isin(s_ccw, offs[:-1])
        keep &= is_j | (near > 1e-3 * P / n)
        s_ccw = s_ccw[keep]
        s = np.mod(P - s_ccw, P)
        order = np.argsort(s, kind="stable")
        s, s_ccw = s[order], s_ccw[order]
        p = domain.boundary_point(s_ccw)
        T = np.empty_like(p)
        kappa = np.empty(len(s))
        tag = np.empty(len(s), dtype=object)
        idx = np.clip(np.searchsorted(offs, s_ccw, side="right") - 1, 0, len(offs) - 2)
        eps = 1e-7 * P
        for i, (sc, k) in enumerate(zip(s_ccw, idx)):
            pc = domain._pieces[k]
            fwd = domain.boundary_point(sc + eps) - domain.boundary_point(sc)
            if sc == offs[k]:
                jt = domain._junction_tags[k] if hasattr(domain, "_junction_tags") else None
                back = domain.boundary_point(sc) - domain.boundary_point(sc - eps)
                if jt in ("convex", "reentrant"):
                    T[i] = _unit(_unit(fwd) + _unit(back))
                    kappa[i] = np.nan
                    tag[i] = jt
                    continue
                # smooth junction: use the piece entered when moving clockwise
                prev = domain._pieces[k - 1]
                T[i] = _unit(back)
                kappa[i] = prev.kappa
                tag[i] = prev.tag
                continue
            T[i] = _unit(fwd)
            kappa[i] = pc.kappa
            tag[i] = pc.tag
        param = s_ccw
        length = P
    else:
        raise DomainError(f"cannot trace domain of type {type(domain).__name__}")
    _check_simple(p)
    tau = -T
    nu = _ccw_normal(T)
    return BoundaryTrace(s=s, points=p, tau=tau, nu=nu, kappa=np.asarray(kappa, float),
                         tag=tag, param=np.asarray(param, float), length=float(length))


def _table_trace(domain: ProfileTable, n):
    xi, ph = domain.x[1:-1], domain.phi[1:-1]
    d, k = domain.dphi[1:-1], domain.curvature_samples()[1:-1]
    # clockwise: z_R, lower graph right to left, z_L, upper graph left to right
    lo_p = np.stack([xi[::-1], -ph[::-1]], -1)
    lo_t = _unit(np.stack([-np.ones_like(xi), d[::-1]], -1))
    up_p = np.stack([xi, ph], -1)
    up_t = _unit(np.stack([np.ones_like(xi), d], -1))
    p = np.concatenate([[[domain.x[-1], 0.0]], lo_p, [[domain.x[0], 0.0]], up_p])
    tau = np.concatenate([[[0.0, -1.0]], lo_t, [[0.0, 1.0]], up_t])
    kappa = np.concatenate([[np.nan], k[::-1], [np.nan], k])
    tag = np.array(["vertex"] + ["table"] * len(xi) + ["vertex"] + ["table"] * len(xi),
                   dtype=object)
    seg = np.linalg.norm(np.diff(np.concatenate([p, p[:1]]), axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg[:-1])])
    _check_simple(p)
    nu = np.stack([-tau[:, 1], tau[:, 0]], -1)
    return BoundaryTrace(s=s, points=p, tau=tau, nu=nu, kappa=kappa, tag=tag,
                         param=p[:, 0].copy(), length=float(seg.sum()))


def boundary_frame(domain: Domain, params, points=None):
    """Curvature, counterclockwise unit tangent and tag at boundary parameters.

    Polygon vertices get ``nan`` curvature and the averaged tangent.
    ``points`` is needed only for profile tables, whose parameter is ``x1``.
    """
    params = np.asarray(params, dtype=float)
    if isinstance(domain, ProfileDomain):
        _, d1, _ = domain.curve(params)
        return domain.curvature(params), _unit(d1), np.full(len(params), "smooth", object)
    if isinstance(domain, ProfileTable):
        y = np.asarray(points, dtype=float)[:, 1]
        d = np.interp(params, domain.x, domain.dphi)
        k = np.interp(params, domain.x, domain.curvature_samples())
        sgn = np.where(y >= 0, -1.0, 1.0)
        T = _unit(np.stack([sgn, sgn * d * np.where(y >= 0, 1.0, -1.0)], -1))
        T[np.abs(y) == 0] = np.array([[0.0, 1.0]]) * np.sign(params[np.abs(y) == 0])[:, None]
        return k, T, np.full(len(params), "table", object)
    if isinstance(domain, _ChainDomain):
        P = domain.perimeter
        offs = domain._offsets
        q = np.mod(params, P)
        idx = np.clip(np.searchsorted(offs, q, side="right") - 1, 0, len(offs) - 2)
        kappa = np.array([domain._pieces[k].kappa for k in idx], dtype=float)
        tag = np.array([domain._pieces[k].tag for k in idx], dtype=object)
        eps = 1e-7 * P
        fwd = _unit(domain.boundary_point(q + eps) - domain.boundary_point(q))
        back = _unit(domain.boundary_point(q) - domain.boundary_point(q - eps))
        junction = np.abs(q[:, None] - offs[None, :-1]).min(axis=1) == 0.0
        jt = np.array(domain._junction_tags, dtype=object)[idx]
        corner = junction & np.isin(jt, ["convex", "reentrant"])
        T = np.where(junction[:, None], _unit(fwd + back), _unit(fwd))
        kappa[corner] = np.nan
        tag[corner] = jt[corner]
        return kappa, T, tag
    raise DomainError(f"no boundary frame for {type(domain).__name__}")


def min_curvature(trace: BoundaryTrace) -> float:
    """Smallest sampled curvature; vertex samples (``nan``) are skipped.

    This is a sampled estimate of the infimum, exact when the minimum is
    attained at a sample.
    """
    if len(trace) == 0:
        raise DomainError("empty trace")
    k = trace.kappa[np.isfinite(trace.kappa)]
    if k.size == 0:
        raise DomainError("trace carries no curvature data")
    return float(k.min())


@dataclass(frozen=True)
class A2Check:
    holds: bool
    margin: float


def check_condition_A2(beta: float, trace: BoundaryTrace) -> A2Check:
    """Curvature condition ``beta + min kappa >= 0``."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    margin = beta + min_curvature(trace)
    return A2Check(bool(margin >= 0.0), float(margin))


# ---------------------------------------------------------------------------
# Minkowski interpolation of profiles


def _profile_fn(prof):
    if isinstance(prof, (ProfileDomain, ProfileTable)):
        return prof.half_width, prof.profile
    l, f = prof
    return float(l), f


def sup_convolve_profiles(phi0, phi1, t: float, n: int = 2048,
                          n_coarse: int = 96) -> ProfileTable:
    """Profile of ``(1-t) A + t B`` for x2-convex symmetric ``A`` and ``B``.

    ``phi0`` and ``phi1`` are domains or ``(half_width, callable)`` pairs.
    The sup-convolution ``psi(z) = max (1-t) phi0(u) + t phi1(v)`` over
    ``(1-t) u + t v = z`` is evaluated on a uniform grid of ``n`` points by
    a coarse scan followed by golden-section refinement.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError("interpolation weight must lie in [0, 1]")
    l0, f0 = _profile_fn(phi0)
    l1, f1 = _profile_fn(phi1)
    if t == 0.0:
        z = np.linspace(-l0, l0, n)
        return ProfileTable(z, _clean(f0(z)))
    if t == 1.0:
        z = np.linspace(-l1, l1, n)
        return ProfileTable(z, _clean(f1(z)))
    w0, w1 = 1.0 - t, t
    l = w0 * l0 + w1 * l1
    z = np.linspace(-l, l, n)
    lo = np.maximum(-l0, (z - w1 * l1) / w0)
    hi = np.minimum(l0, (z + w1 * l1) / w0)

    def g(u, zz):
        v = (zz - w0 * u) / w1
        return w0 * f0(u) + w1 * f1(v)

    frac = np.linspace(0.0, 1.0, n_coarse)
    U = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    G = g(U, z[:, None])
    k = np.argmax(G, axis=1)
    step = (hi - lo) / (n_coarse - 1)
    a = np.maximum(lo, U[np.arange(n), k] - step)
    b = np.minimum(hi, U[np.arange(n), k] + step)
    gr = 0.5 * (np.sqrt(5.0) - 1.0)
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    gc, gd = g(c, z), g(d, z)
    for _ in range(60):
        left = gc > gd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - gr * (b - a), d)
        d_new = np.where(left, c, a + gr * (b - a))
        g_new = g(np.where(left, c_new, d_new), z)
        gc, gd = np.where(left, g_new, gd), np.where(left, gc, g_new)
        c, d = c_new, d_new
    best = np.maximum(g(0.5 * (a + b), z), G.max(axis=1))
    return ProfileTable(z, _clean(best))


def _clean(phi):
    phi = np.array(phi, dtype=float)
    phi[0] = phi[-1] = 0.0
    return np.maximum(phi, 0.0)


# ---------------------------------------------------------------------------
# deformation families


@dataclass(frozen=True)
class DeformationFamily:
    """Three-phase family joining two smooth domains.

    The start domain is dilated by ``1/(eps delta0)``, the dilated domains
    are Minkowski-interpolated, and the result is dilated back down to the
    target.  ``family(t)`` returns the domain at ``t in [0, 1]``.
    """

    omega0: ProfileDomain
    omega1: ProfileDomain
    beta: float
    delta0: float
    delta1: float
    C: float
    eps: float
    kind: str = "minkowski"

    def __call__(self, t: float) -> ProfileDomain:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise DomainError("family parameter must lie in [0, 1]")
        e, d0, d1 = self.eps, self.delta0, self.delta1
        if t == 0.0:
            return self.omega0
        if t == 1.0:
            return self.omega1
        if t <= 1.0 / 3.0:
            return ScaledDomain(self.omega0, 1.0 - 3.0 * t + 3.0 * t / (e * d0))
        if t >= 2.0 / 3.0:
            return ScaledDomain(self.omega1, 3.0 * t - 2.0 + (3.0 - 3.0 * t) / (e * d1))
        return minkowski_combination(self.omega0, (2.0 - 3.0 * t) / (e * d0),
                                     self.omega1, (3.0 * t - 1.0) / (e * d1))

    def interpolant(self, s: float) -> ProfileDomain:
        """Middle-phase domain before the ``1/eps`` dilation."""
        return minkowski_combination(self.omega0, (1.0 - s) / self.delta0,
                                     self.omega1, s / self.delta1)


def _endpoint_checks(omega, beta, name):
    if not isinstance(omega, ProfileDomain):
        raise DomainError(f"{name} must be a smooth profile domain")
    if not omega.check_A1():
        raise DomainError(f"{name} is not symmetric and x2-convex")
    margin = beta + omega.min_curvature_dense()
    if margin < 0:
        raise DomainError(f"{name} violates the curvature condition (margin {margin:.4g})")


def build_family(omega0: ProfileDomain, omega1: ProfileDomain, beta: float,
                 safety: float = 0.9, n_grid: int = 33, n_check: int = 65,
                 inflation: float = 1.25) -> DeformationFamily:
    """Construct the three-phase family and verify the curvature condition along it."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    if not 0.0 < safety < 1.0:
        raise DomainError("safety factor must lie in (0, 1)")
    _endpoint_checks(omega0, beta, "start domain")
    _endpoint_checks(omega1, beta, "target domain")
    l0, l1 = omega0.half_width, omega1.half_width
    ls = max(l0, l1)
    d0, d1 = l0 / ls, l1 / ls
    kmin = np.inf
    for s in np.linspace(0.0, 1.0, n_grid):
        try:
            dom = minkowski_combination(omega0, (1.0 - s) / d0, omega1, s / d1)
        except NonSmoothSum as exc:
            raise DomainError(
                f"interpolated domain at s={s:.4f} is not smooth, so no finite "
                f"curvature bound exists: {exc}") from exc
        kmin = min(kmin, dom.min_curvature_dense())
    C = inflation * max(0.0, -kmin)
    eps = safety * (min(1.0, beta / C) if C > 0 else 1.0)
    fam = DeformationFamily(omega0, omega1, float(beta), d0, d1, float(C), float(eps))
    for t in np.linspace(0.0, 1.0, n_check):
        try:
            k = fam(t).min_curvature_dense()
        except NonSmoothSum as exc:
            raise DomainError(f"family is not smooth at t={t:.4f}: {exc}") from exc
        if beta + k < 0:
            raise DomainError(
                f"curvature grid too coarse: condition fails at t={t:.4f} "
                f"(min curvature {k:.4g}, C={C:.4g})")
    return fam


@dataclass(frozen=True)
class RadialBlendFamily:
    """Linear blend ``R_t = (1-t) R_0 + t R_1`` of two star-shaped domains."""

    omega0: PolarDomain
    omega1: PolarDomain
    beta: float
    kind: str = "radial"

    def __call__(self, t: float) -> ProfileDomain:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise DomainError("family parameter must lie in [0, 1]")
        if t == 0.0:
            return self.omega0
        if t == 1.0:
            return self.omega1
        r0, r1 = self.omega0.radius, self.omega1.radius

        def radius(sig, t=t):
            a, b = r0(sig), r1(sig)
            return tuple((1.0 - t) * x + t * y for x, y in zip(a, b))

        return PolarDomain(radius, {"kind": "radial_blend", "t": t,
                                    "from": self.omega0.config(),
                                    "to": self.omega1.config()})


def _as_polar(d):
    if isinstance(d, PolarDomain):
        return d
    if isinstance(d, Disk):
        R = d.R

        def radius(sig, R=R):
            sig = np.asarray(sig, dtype=float)
            return np.full_like(sig, R), np.zeros_like(sig), np.zeros_like(sig)

        return PolarDomain(radius, d.config())
    raise DomainError("radial blending needs star-shaped polar domains")


def build_radial_family(omega0, omega1, beta: float, n_check: int = 65) -> RadialBlendFamily:
    """Radial blend, checked for symmetry, x2-convexity and the curvature condition."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    fam = RadialBlendFamily(_as_polar(omega0), _as_polar(omega1), float(beta))
    for t in np.linspace(0.0, 1.0, n_check):
        d = fam(t)
        if not d.check_A1():
            raise DomainError(f"blended domain at t={t:.4f} is not x2-convex")
        if beta + d.min_curvature_dense() < 0:
            raise DomainError(f"blended domain at t={t:.4f} violates the curvature condition")
    return fam


# ---------------------------------------------------------------------------
# configuration


def domain_from_config(cfg: dict) -> Domain:
    """Build a domain from a JSON-style dictionary."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise DomainError("domain config must be an object with a 'kind' field")
    kind = cfg["kind"]
    try:
        if kind == "disk":
            return Disk(float(cfg.get("R", 1.0)))
        if kind == "ellipse":
            return Ellipse(float(cfg.get("a", 2.0)), float(cfg.get("b", 1.0)))
        if kind == "peanut":
            if "min_curvature" in cfg:
                return Peanut.with_min_curvature(float(cfg["min_curvature"]))
            return Peanut(float(cfg.get("neck", 0.4)))
        if kind == "stadium":
            return Stadium(float(cfg.get("length", 1.0)), float(cfg.get("radius", 1.0)))
        if kind == "cross":
            return CrossPolygon(float(cfg["a"]), float(cfg["b"]))
        if kind == "rounded_cross":
            return RoundedCrossPolygon(float(cfg["a"]), float(cfg["b"]), float(cfg["rho"]))
    except KeyError as exc:
        raise DomainError(f"domain config for '{kind}' is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad value in domain config: {exc}") from exc
    raise DomainError(f"unknown domain kind '{kind}'")

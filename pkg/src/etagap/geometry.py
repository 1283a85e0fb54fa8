"""Ambient metrics, masked box grids, and geometric primitives.

Two metric models are supported: flat Euclidean space and the upper-half-space
model of hyperbolic space (curvature -1, metric delta_ij / x_n^2 on x_n > 0).
Domains are axis-aligned boxes carrying a per-cell inside-mask; curved shapes
are approximated by staircase masks.  All objects are immutable after
construction and safe for concurrent reads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    EmptyDomain,
    InvalidHalfPlane,
    OriginInsideDomain,
    OutOfDomain,
)


class MetricKind(Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class MetricModel:
    """Ambient metric: Euclidean R^n or the hyperbolic upper half-space."""

    kind: MetricKind
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind is MetricKind.HYPERBOLIC and self.dim < 2:
            raise ValueError("hyperbolic model needs dimension >= 2")

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind is MetricKind.HYPERBOLIC


def euclidean(dim: int) -> MetricModel:
    return MetricModel(MetricKind.EUCLIDEAN, dim)


def hyperbolic_half_plane(dim: int) -> MetricModel:
    return MetricModel(MetricKind.HYPERBOLIC, dim)


def _as_points(p) -> tuple[np.ndarray, bool]:
    """Normalize a point or batch of points to shape (m, n)."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    return arr, False


def _check_domain(metric: MetricModel, pts: np.ndarray) -> None:
    if metric.is_hyperbolic and np.any(pts[:, -1] <= 0.0):
        raise OutOfDomain("hyperbolic model requires x_n > 0")


def volume_weight(metric: MetricModel, p):
    """Riemannian volume density sqrt(det g) against coordinate measure.

    Euclidean: 1.  Hyperbolic half-space: x_n^(-n).
    """
    pts, single = _as_points(p)
    _check_domain(metric, pts)
    if metric.is_hyperbolic:
        w = pts[:, -1] ** (-float(metric.dim))
    else:
        w = np.ones(pts.shape[0])
    return float(w[0]) if single else w


def raise_gradient(metric: MetricModel, p, coordinate_gradient):
    """Convert a coordinate covector df into the metric gradient vector.

    Euclidean: identity.  Hyperbolic: multiply componentwise by x_n^2,
    so the metric norm of the result is x_n * |df|.
    """
    pts, single = _as_points(p)
    _check_domain(metric, pts)
    cov = np.asarray(coordinate_gradient, dtype=float)
    if cov.ndim == 1:
        cov = cov[None, :]
    if metric.is_hyperbolic:
        vec = cov * (pts[:, -1] ** 2)[:, None]
    else:
        vec = cov.copy()
    return vec[0] if single else vec


def gradient_norm(metric: MetricModel, p, coordinate_gradient):
    """Metric norm |grad f|_g of the gradient raised from a covector."""
    pts, single = _as_points(p)
    _check_domain(metric, pts)
    cov = np.asarray(coordinate_gradient, dtype=float)
    if cov.ndim == 1:
        cov = cov[None, :]
    norms = np.linalg.norm(cov, axis=1)
    if metric.is_hyperbolic:
        norms = norms * pts[:, -1]
    return float(norms[0]) if single else norms


def geodesic_distance(metric: MetricModel, x, y) -> float:
    """Geodesic distance between two points of the model."""
    xs, _ = _as_points(x)
    ys, _ = _as_points(y)
    _check_domain(metric, xs)
    _check_domain(metric, ys)
    xv, yv = xs[0], ys[0]
    if metric.is_hyperbolic:
        diff2 = float(np.sum((xv - yv) ** 2))
        arg = 1.0 + diff2 / (2.0 * xv[-1] * yv[-1])
        # clamp against roundoff just below 1
        return float(np.arccosh(max(arg, 1.0)))
    return float(np.linalg.norm(xv - yv))


def radial_unit_vector(metric: MetricModel, origin, p):
    """Coordinate components of the unit tangent (away from `origin`).

    The returned vector v has |v|_g = 1 and points along the geodesic from
    the origin through p, in the direction of increasing distance.
    """
    pts, single = _as_points(p)
    o = np.asarray(origin, dtype=float)
    _check_domain(metric, pts)
    if metric.is_hyperbolic:
        _check_domain(metric, o[None, :])
        out = np.empty_like(pts)
        hdiff = pts[:, :-1] - o[:-1]
        s = np.linalg.norm(hdiff, axis=1)
        xn = pts[:, -1]
        vertical = s < 1e-14
        # vertical geodesic: tangent +-x_n e_n
        sign_v = np.where(xn >= o[-1], 1.0, -1.0)
        out[vertical, :-1] = 0.0
        out[vertical, -1] = (sign_v * xn)[vertical]
        if not np.all(vertical):
            idx = ~vertical
            si, xni, hi = s[idx], xn[idx], hdiff[idx]
            u = hi / si[:, None]
            # semicircle geodesic centred at offset c on the boundary
            c = (si**2 + xni**2 - o[-1] ** 2) / (2.0 * si)
            r = np.sqrt(c**2 + o[-1] ** 2)
            theta_o = np.arctan2(o[-1], -c)
            theta_x = np.arctan2(xni, si - c)
            sgn = np.where(theta_x >= theta_o, 1.0, -1.0)
            scale = sgn * xni / r
            out[idx, :-1] = (scale * (-xni))[:, None] * u
            out[idx, -1] = scale * (si - c)
        return out[0] if single else out
    diff = pts - o[None, :]
    norms = np.linalg.norm(diff, axis=1)
    if np.any(norms == 0.0):
        raise OutOfDomain("radial direction undefined at the origin itself")
    out = diff / norms[:, None]
    return out[0] if single else out


@dataclass(frozen=True)
class OriginPoint:
    """Reference point o outside the closed domain, for radial quantities."""

    coords: tuple[float, ...]

    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


class GridDomain:
    """Uniform Cartesian grid over a box with a per-cell inside-mask.

    Nodes touched only by masked-in cells (counting positions outside the
    box as masked-out) are interior degrees of freedom; every other node of
    a masked-in cell carries the homogeneous Dirichlet value 0.
    """

    def __init__(self, bounds, resolution, metric: MetricModel, mask: np.ndarray):
        bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        resolution = tuple(int(r) for r in resolution)
        if len(bounds) != metric.dim or len(resolution) != metric.dim:
            raise ValueError("bounds/resolution length must equal the metric dimension")
        for lo, hi in bounds:
            if not lo < hi:
                raise ValueError("each axis needs lo < hi")
        for r in resolution:
            if r < 2:
                raise ValueError("resolution must be >= 2 per axis")
        if metric.is_hyperbolic and bounds[-1][0] <= 0.0:
            raise InvalidHalfPlane("hyperbolic box must satisfy x_n lower bound > 0")
        mask = np.array(mask, dtype=bool, copy=True)
        if mask.shape != resolution:
            raise ValueError("mask shape must equal the resolution")

        self.bounds = bounds
        self.resolution = resolution
        self.metric = metric
        self.mask = mask
        self.mask.setflags(write=False)
        self.h = tuple((hi - lo) / r for (lo, hi), r in zip(bounds, resolution))
        self.node_shape = tuple(r + 1 for r in resolution)
        self.node_axes = tuple(
            np.linspace(lo, hi, r + 1) for (lo, hi), r in zip(bounds, resolution)
        )

        padded = np.zeros(tuple(r + 2 for r in resolution), dtype=bool)
        padded[tuple(slice(1, -1) for _ in resolution)] = mask
        interior = np.ones(self.node_shape, dtype=bool)
        n = metric.dim
        for off in itertools.product((0, 1), repeat=n):
            sl = tuple(slice(o, o + s) for o, s in zip(off, self.node_shape))
            interior &= padded[sl]
        self._interior_mask = interior
        self.interior_flat = np.flatnonzero(interior.ravel())
        if self.interior_flat.size == 0:
            raise EmptyDomain("mask leaves no interior node")
        self._dof_of_node = np.full(int(np.prod(self.node_shape)), -1, dtype=np.int64)
        self._dof_of_node[self.interior_flat] = np.arange(self.interior_flat.size)

        cells = np.argwhere(mask)
        self.masked_cells = np.ascontiguousarray(cells)
        self._quad_cache = None

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def n_interior(self) -> int:
        return int(self.interior_flat.size)

    def dof_index(self) -> np.ndarray:
        """Flat node index -> DOF index (-1 for Dirichlet nodes)."""
        return self._dof_of_node

    def node_coords(self, flat_idx) -> np.ndarray:
        multi = np.unravel_index(np.asarray(flat_idx), self.node_shape)
        cols = [ax[m] for ax, m in zip(self.node_axes, multi)]
        return np.stack(cols, axis=-1)

    def interior_coords(self) -> np.ndarray:
        return self.node_coords(self.interior_flat)

    def cell_corner_nodes(self) -> np.ndarray:
        """(ncell, 2^n) flat node indices of each masked cell's corners."""
        n = self.dim
        offsets = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
        corners = self.masked_cells[:, None, :] + offsets[None, :, :]
        return np.ravel_multi_index(
            tuple(corners[..., d] for d in range(n)), self.node_shape
        )

    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    def quadrature(self):
        """Tensor-product 2-point Gauss rule on every masked cell.

        Returns (points, weights) with points of shape (ncell, nq, n) and
        weights of shape (nq,) summing to 1; multiply by cell_volume() for
        coordinate-measure integration.
        """
        if self._quad_cache is None:
            n = self.dim
            g = 0.5 / np.sqrt(3.0)
            xi1 = np.array([0.5 - g, 0.5 + g])
            nodes = np.array(list(itertools.product(xi1, repeat=n)))
            w = np.full(nodes.shape[0], 0.5**n)
            lo = np.array([b[0] for b in self.bounds])
            h = np.array(self.h)
            base = lo[None, :] + self.masked_cells * h[None, :]
            pts = base[:, None, :] + nodes[None, :, :] * h[None, None, :]
            self._quad_cache = (pts, w)
        return self._quad_cache

    def quad_points_flat(self) -> np.ndarray:
        pts, _ = self.quadrature()
        return pts.reshape(-1, self.dim)

    def contains_point(self, p) -> bool:
        """Whether p lies in the closure of some masked-in cell."""
        p = np.asarray(p, dtype=float)
        lo = np.array([b[0] for b in self.bounds])
        h = np.array(self.h)
        eps = 1e-12 * np.maximum(np.abs(lo) + np.abs(h) * np.array(self.resolution), 1.0)
        corner_lo = lo[None, :] + self.masked_cells * h[None, :]
        corner_hi = corner_lo + h[None, :]
        inside = np.all(p >= corner_lo - eps, axis=1) & np.all(p <= corner_hi + eps, axis=1)
        return bool(np.any(inside))


def make_box_domain(bounds, resolution, metric: MetricModel, mask_rule=None) -> GridDomain:
    """Build a masked box domain, evaluating the mask at cell centers."""
    bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
    resolution = tuple(int(r) for r in resolution)
    if metric.is_hyperbolic and bounds[-1][0] <= 0.0:
        raise InvalidHalfPlane("hyperbolic box must satisfy x_n lower bound > 0")
    axes = [
        lo + (np.arange(r) + 0.5) * (hi - lo) / r for (lo, hi), r in zip(bounds, resolution)
    ]
    if mask_rule is None:
        mask = np.ones(resolution, dtype=bool)
    else:
        grids = np.meshgrid(*axes, indexing="ij")
        centers = np.stack([g.ravel() for g in grids], axis=1)
        mask = np.asarray(mask_rule(centers), dtype=bool).reshape(resolution)
    return GridDomain(bounds, resolution, metric, mask)


def validate_origin(domain: GridDomain, origin: OriginPoint) -> None:
    o = origin.array()
    if o.shape != (domain.dim,):
        raise ValueError("origin dimension mismatch")
    _check_domain(domain.metric, o[None, :])
    if domain.contains_point(o):
        raise OriginInsideDomain("origin lies in the closed masked region")


def domain_origin_distance(domain: GridDomain, origin: OriginPoint) -> float:
    """Grid approximation (from above) of dist(domain, origin).

    Minimizes the geodesic distance over the corner nodes of masked-in
    cells; since nodes lie in the closed domain this never undershoots the
    true distance.
    """
    validate_origin(domain, origin)
    o = origin.array()
    nodes = np.unique(domain.cell_corner_nodes().ravel())
    coords = domain.node_coords(nodes)
    if domain.metric.is_hyperbolic:
        diff2 = np.sum((coords - o[None, :]) ** 2, axis=1)
        arg = 1.0 + diff2 / (2.0 * coords[:, -1] * o[-1])
        d = np.arccosh(np.maximum(arg, 1.0))
    else:
        d = np.linalg.norm(coords - o[None, :], axis=1)
    return float(np.min(d))

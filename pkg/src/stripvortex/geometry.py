"""Strip geometry: obstacle boundary panels and truncated Cartesian grids.

The fluid domain is the strip R x (0, pi) minus a closed star-shaped
obstacle.  The obstacle boundary is discretized into flat panels at
midpoints of a uniform parameter grid; the panel normal is the outward
normal of the *fluid* domain, i.e. it points into the obstacle.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GeometryError

_WALL_CLEARANCE = 1e-9
_CLOSURE_GAP = 1e-12


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float


@dataclass(frozen=True)
class Ellipse:
    center: tuple
    semi_axes: tuple
    tilt: float = 0.0


@dataclass(frozen=True)
class FourierRadius:
    """Star-shaped curve r(phi) = base + sum_k (cos_k cos(k phi) + sin_k sin(k phi))."""

    center: tuple
    base_radius: float
    cosine: tuple = ()
    sine: tuple = ()


def _curve_point(descriptor, phi):
    """Position and parameter-derivative of the boundary curve at angle phi."""
    phi = np.asarray(phi, dtype=float)
    cx, cy = descriptor.center
    if isinstance(descriptor, Disk):
        r = descriptor.radius
        pos = np.stack([cx + r * np.cos(phi), cy + r * np.sin(phi)], axis=-1)
        dpos = np.stack([-r * np.sin(phi), r * np.cos(phi)], axis=-1)
        return pos, dpos
    if isinstance(descriptor, Ellipse):
        a, b = descriptor.semi_axes
        ct, st = np.cos(descriptor.tilt), np.sin(descriptor.tilt)
        u, v = a * np.cos(phi), b * np.sin(phi)
        du, dv = -a * np.sin(phi), b * np.cos(phi)
        pos = np.stack([cx + ct * u - st * v, cy + st * u + ct * v], axis=-1)
        dpos = np.stack([ct * du - st * dv, st * du + ct * dv], axis=-1)
        return pos, dpos
    if isinstance(descriptor, FourierRadius):
        r = np.full_like(phi, descriptor.base_radius)
        dr = np.zeros_like(phi)
        for k, ck in enumerate(descriptor.cosine, start=1):
            r = r + ck * np.cos(k * phi)
            dr = dr - k * ck * np.sin(k * phi)
        for k, sk in enumerate(descriptor.sine, start=1):
            r = r + sk * np.sin(k * phi)
            dr = dr + k * sk * np.cos(k * phi)
        if np.any(r <= 0.0):
            raise GeometryError("Fourier radius changes sign: curve self-intersects")
        pos = np.stack([cx + r * np.cos(phi), cy + r * np.sin(phi)], axis=-1)
        dpos = np.stack(
            [dr * np.cos(phi) - r * np.sin(phi), dr * np.sin(phi) + r * np.cos(phi)],
            axis=-1,
        )
        return pos, dpos
    raise GeometryError(f"unknown obstacle descriptor {type(descriptor).__name__}")


def _radius_of(descriptor, phi):
    """Star-shaped radius about the descriptor center at angle(s) phi."""
    pos, _ = _curve_point(descriptor, phi)
    return np.hypot(pos[..., 0] - descriptor.center[0], pos[..., 1] - descriptor.center[1])


@dataclass(eq=False)
class ObstacleCurve:
    """Panelized closed boundary of the obstacle.

    midpoints : (P, 2) panel collocation points, counterclockwise
    normals   : (P, 2) unit normals pointing out of the fluid (into the obstacle)
    weights   : (P,) positive arc-length weights
    """

    descriptor: object
    panels: int
    midpoints: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    endpoints: np.ndarray
    _boundary_samples: np.ndarray = field(default=None, repr=False)

    @property
    def perimeter(self):
        return float(self.weights.sum())

    @property
    def panel_length(self):
        return float(self.weights.max())

    @property
    def centroid(self):
        return np.asarray(self.descriptor.center, dtype=float)

    @property
    def extent(self):
        """Largest |x1| reached by the boundary."""
        return float(np.abs(self.endpoints[:, 0]).max())

    def enclosed_area(self):
        """Area of the obstacle from the divergence-theorem panel sum."""
        return -0.5 * float(np.einsum("ij,ij,i->", self.midpoints, self.normals, self.weights))

    def contains(self, points):
        """True for points inside the closed obstacle (descriptor-exact)."""
        p = np.asarray(points, dtype=float)
        dx = p[..., 0] - self.descriptor.center[0]
        dy = p[..., 1] - self.descriptor.center[1]
        rr = np.hypot(dx, dy)
        phi = np.arctan2(dy, dx)
        return rr <= _radius_of(self.descriptor, phi)

    def boundary_distance(self, points):
        """Distance to the boundary curve, positive also inside the obstacle.

        Uses a dense parameter sampling (8 per panel); error is O(sample^2).
        """
        if self._boundary_samples is None:
            phi = np.linspace(0.0, 2.0 * np.pi, 8 * self.panels, endpoint=False)
            self._boundary_samples, _ = _curve_point(self.descriptor, phi)
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if isinstance(self.descriptor, Disk):
            d = np.abs(
                np.hypot(p[:, 0] - self.descriptor.center[0], p[:, 1] - self.descriptor.center[1])
                - self.descriptor.radius
            )
        else:
            d = np.min(
                np.hypot(
                    p[:, None, 0] - self._boundary_samples[None, :, 0],
                    p[:, None, 1] - self._boundary_samples[None, :, 1],
                ),
                axis=1,
            )
        return d if np.asarray(points).ndim > 1 else float(d[0])

    def nearest_panel(self, points):
        """Index of the panel midpoint closest to each point."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        d2 = (p[:, None, 0] - self.midpoints[None, :, 0]) ** 2 + (
            p[:, None, 1] - self.midpoints[None, :, 1]
        ) ** 2
        idx = np.argmin(d2, axis=1)
        return idx if np.asarray(points).ndim > 1 else int(idx[0])


def build_obstacle(descriptor, panels):
    """Panelize a star-shaped obstacle boundary.

    Midpoint collocation with analytic arc-length weights; raises
    GeometryError if the curve touches the strip walls or self-intersects.
    """
    if panels < 16:
        raise GeometryError("need at least 16 panels")
    phi_mid = (np.arange(panels) + 0.5) * (2.0 * np.pi / panels)
    phi_end = np.arange(panels + 1) * (2.0 * np.pi / panels)
    mid, dmid = _curve_point(descriptor, phi_mid)
    endpoints, _ = _curve_point(descriptor, phi_end[:-1])

    # containment: strictly inside the strip (check a fine sampling too)
    fine, _ = _curve_point(descriptor, np.linspace(0, 2 * np.pi, 16 * panels, endpoint=False))
    if fine[:, 1].min() <= _WALL_CLEARANCE or fine[:, 1].max() >= np.pi - _WALL_CLEARANCE:
        raise GeometryError("obstacle touches or crosses the strip walls")

    speed = np.hypot(dmid[:, 0], dmid[:, 1])
    if np.any(speed <= 0.0):
        raise GeometryError("degenerate parametrization (zero speed)")
    weights = speed * (2.0 * np.pi / panels)
    # CCW tangent (x', y'); outward-of-fluid normal is (-y', x')/|.|
    normals = np.stack([-dmid[:, 1], dmid[:, 0]], axis=-1) / speed[:, None]

    curve = ObstacleCurve(
        descriptor=descriptor,
        panels=panels,
        midpoints=mid,
        normals=normals,
        weights=weights,
        endpoints=endpoints,
    )
    # orientation self-test: every normal points toward the centroid side
    toward = np.einsum("ij,ij->i", normals, mid - curve.centroid)
    if np.any(toward >= 0.0):
        raise GeometryError("panel normals do not point into the obstacle")
    # closure self-test in parameter space
    gap = abs((phi_end[-1] - phi_end[0]) - 2.0 * np.pi)
    if gap > _CLOSURE_GAP:
        raise GeometryError("panel endpoints do not close the curve")
    return curve


@dataclass
class TruncatedGrid:
    """Cell-centered Cartesian grid on the truncated window of the fluid domain.

    active[i, j] is True when the cell center is inside the window, inside
    the open strip, and at distance >= h/2 from the obstacle boundary.
    """

    half_width: float
    h: float
    x1: np.ndarray
    x2: np.ndarray
    active: np.ndarray

    @property
    def cell_area(self):
        return self.h * self.h

    @property
    def shape(self):
        return self.active.shape

    def centers(self):
        """(N, 2) coordinates of all cell centers in row-major (i, j) order."""
        X1, X2 = np.meshgrid(self.x1, self.x2, indexing="ij")
        return np.stack([X1.ravel(), X2.ravel()], axis=-1)

    def active_centers(self):
        return self.centers()[self.active.ravel()]

    def unmasked_area(self):
        return float(self.active.sum()) * self.cell_area

    def descriptor_line(self):
        return (
            f"L={self.half_width!r} h={self.h!r} "
            f"nx={self.x1.size} ny={self.x2.size}"
        )


def build_grid(obstacle, half_width, h):
    """Build the truncated window grid; h must divide pi to 1e-9 relative."""
    ratio = np.pi / h
    if abs(ratio - round(ratio)) > 1e-9 * ratio:
        raise ConfigurationError("cell size must divide pi (strip-conforming grid)")
    ny = int(round(ratio))
    nx = int(round(2.0 * half_width / h))
    x1 = (np.arange(nx) + 0.5) * h - half_width
    x2 = (np.arange(ny) + 0.5) * h
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    pts = np.stack([X1.ravel(), X2.ravel()], axis=-1)
    active = np.ones(pts.shape[0], dtype=bool)
    if obstacle is not None:
        # keep clear of the panel layer: mask centers inside the obstacle or
        # closer than h/2 to its boundary
        box = np.abs(pts[:, 0] - obstacle.centroid[0]) < (obstacle.extent + 2.0)
        near = np.zeros(pts.shape[0], dtype=bool)
        near[box] = obstacle.contains(pts[box]) | (
            obstacle.boundary_distance(pts[box]) < 0.5 * h
        )
        active &= ~near
    return TruncatedGrid(
        half_width=float(half_width),
        h=float(h),
        x1=x1,
        x2=x2,
        active=active.reshape(nx, ny),
    )

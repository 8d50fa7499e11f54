"""Single-layer boundary elements for harmonic problems in the cut strip.

Solves  Delta u = 0 in Omega,  u = f (+ lambda) on the obstacle boundary,
u = 0 on the strip walls, u -> 0 at infinity, with an optional prescribed
total flux through the obstacle.  The ansatz

    u(x) = sum_j sigma_j G_S(y_j, x) w_j

uses the exact strip kernel, so the wall conditions and decay hold
identically and only the obstacle boundary is discretized.

Sign conventions (fixed once, used everywhere):
  * n is the outward normal of the fluid domain, pointing into the obstacle;
  * the total flux of the layer through the obstacle boundary equals its
    total charge:  oint du/dn dS = sum_j sigma_j w_j  (divergence theorem
    applied to the obstacle plus a vanishing collar);
  * the one-sided normal derivative on the fluid side obeys the jump
    relation  du/dn|_i = sigma_i/2 + sum_j sigma_j dG_S(y_j, y_i)/dn_i w_j,
    whose diagonal is the curvature limit kappa_i/(4 pi) plus the regular
    strip term.
"""

import numpy as np
from scipy import linalg

from . import strip_kernel as sk
from .errors import IllConditionedPanelizationError, NearSingularQuadratureError
from .geometry import _curve_point

_COND_LIMIT = 1e12
_INV_2PI = 1.0 / (2.0 * np.pi)
_INV_4PI = 1.0 / (4.0 * np.pi)


def _kernel_matrix(obstacle, points):
    """G_S(y_j, x_k) for panel sources y_j and evaluation points x_k: (N, P)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    y = obstacle.midpoints
    d1 = pts[:, None, 0] - y[None, :, 0]
    c = np.cosh(d1)
    s2s2 = np.sin(pts[:, None, 1]) * np.sin(y[None, :, 1])
    near = c - np.cos(pts[:, None, 1] - y[None, :, 1])
    direct = -_INV_4PI * np.log(near) + _INV_4PI * np.log(
        c - np.cos(pts[:, None, 1] + y[None, :, 1])
    )
    mask = np.abs(d1) > sk.FAR_BRANCH_SEPARATION
    if mask.any():
        with np.errstate(over="ignore", invalid="ignore"):
            far = _INV_4PI * np.log1p(2.0 * s2s2 / near)
        direct = np.where(mask, far, direct)
    return direct


def _log_weights(n, theta):
    """Quadrature weights for the periodic log factor ln(4 sin^2((t-s)/2)).

    Trigonometric (Martensen-Kussmaul) rule on 2n equispaced nodes; exact
    for trigonometric polynomials up to degree n, giving spectral accuracy
    for analytic densities.  ``theta`` holds t - s_j offsets.
    """
    m = np.arange(1, n)
    acc = np.cos(np.multiply.outer(theta, m)) / m
    return -(2.0 * np.pi / n) * acc.sum(axis=-1) - (np.pi / n**2) * np.cos(n * theta)


class _PanelSystem:
    """Assembled collocation system with LU factorization, cached per obstacle.

    The value matrix splits the kernel into the periodic log factor handled
    by the trigonometric product rule and an analytic remainder handled by
    the trapezoid rule; both are spectrally accurate on smooth curves.
    """

    def __init__(self, obstacle):
        self.obstacle = obstacle
        y = obstacle.midpoints
        w = obstacle.weights
        P = len(w)
        if P % 2:
            raise IllConditionedPanelizationError("panel count must be even")
        n = P // 2
        width = 2.0 * np.pi / P
        speed = w / width
        # kernel split:  G_S(y(s), y(t)) |y'(s)| =
        #     M1(s) ln(4 sin^2((t-s)/2)) + M2(t, s),   M1 = -|y'(s)|/(4 pi)
        theta = (np.arange(P)[:, None] - np.arange(P)[None, :]) * width
        with np.errstate(divide="ignore", invalid="ignore"):
            log_factor = np.log(4.0 * np.sin(0.5 * theta) ** 2)
        M1 = -_INV_4PI * speed
        M2 = _kernel_matrix(obstacle, y) * speed[None, :] - M1[None, :] * log_factor
        idx = np.arange(P)
        M2[idx, idx] = speed * _INV_2PI * np.log(4.0 * np.sin(y[:, 1]) / speed)
        R = _log_weights(n, theta)
        self.matrix = R * M1[None, :] + (np.pi / n) * M2
        self.lu = linalg.lu_factor(self.matrix)
        self.cond = np.linalg.cond(self.matrix)
        if self.cond > _COND_LIMIT:
            raise IllConditionedPanelizationError(
                f"collocation matrix condition {self.cond:.2e} exceeds {_COND_LIMIT:.0e}"
            )
        # normal-derivative kernel (jump relation), diagonal = curvature limit
        g = sk.green_kernel_gradient(
            y[:, None, :], y[None, :, :], validate=False
        )  # d/dn at row point i of G_S(., y_j)
        K = np.einsum("ijk,ik->ij", g, obstacle.normals)
        kappa = _curvatures(obstacle)
        K[np.arange(len(w)), np.arange(len(w))] = kappa * _INV_4PI + (
            obstacle.normals[:, 1] * _INV_4PI
        ) / np.tan(y[:, 1])
        self.deriv_matrix = K * w[None, :]

    def solve_dirichlet(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            return linalg.lu_solve(self.lu, values)
        return linalg.lu_solve(self.lu, values)

    def solve_constrained(self, values, total_flux):
        P = len(self.obstacle.weights)
        M = np.zeros((P + 1, P + 1))
        M[:P, :P] = self.matrix
        M[:P, P] = -1.0
        M[P, :P] = self.obstacle.weights
        rhs = np.concatenate([np.asarray(values, dtype=float), [total_flux]])
        sol, _, rank, sv = np.linalg.lstsq(M, rhs, rcond=None)
        if rank < P + 1 or sv[0] / sv[-1] > _COND_LIMIT:
            raise IllConditionedPanelizationError(
                "constrained collocation system is rank-deficient"
            )
        return sol[:P], float(sol[P])


def _curvatures(obstacle):
    """Signed curvature at panel midpoints (positive for a convex obstacle)."""
    P = obstacle.panels
    phi = (np.arange(P) + 0.5) * (2.0 * np.pi / P)
    eps = 1e-6
    _, d0 = _curve_point(obstacle.descriptor, phi)
    _, dp = _curve_point(obstacle.descriptor, phi + eps)
    _, dm = _curve_point(obstacle.descriptor, phi - eps)
    dd = (dp - dm) / (2.0 * eps)
    speed = np.hypot(d0[:, 0], d0[:, 1])
    return (d0[:, 0] * dd[:, 1] - d0[:, 1] * dd[:, 0]) / speed**3


def panel_system(obstacle):
    """Assembled system for the obstacle, cached on the curve object."""
    sys = getattr(obstacle, "_bem_system", None)
    if sys is None:
        sys = _PanelSystem(obstacle)
        obstacle._bem_system = sys
    return sys


class HarmonicSolution:
    """A solved layer density, evaluable anywhere in the fluid domain."""

    def __init__(self, obstacle, density, offset, boundary_data):
        self.obstacle = obstacle
        self.density = np.asarray(density, dtype=float)
        self.offset = offset  # flux constant lambda; None for pure Dirichlet data
        self.boundary_data = np.asarray(boundary_data, dtype=float)
        self._dudn = None

    @property
    def charge(self):
        """Total layer charge = total flux through the obstacle boundary."""
        return float(self.density @ self.obstacle.weights)

    def trace(self):
        """Boundary values reconstructed at the panel midpoints."""
        return panel_system(self.obstacle).matrix @ self.density

    def trace_residual(self):
        target = self.boundary_data + (self.offset or 0.0)
        return float(np.abs(self.trace() - target).max())

    def normal_derivative(self, index=None):
        """du/dn at panel midpoints from the single-layer jump relation."""
        if self._dudn is None:
            sys = panel_system(self.obstacle)
            self._dudn = 0.5 * self.density + sys.deriv_matrix @ self.density
        return self._dudn if index is None else float(self._dudn[index])

    def flux(self):
        """Quadrature of du/dn over the obstacle boundary."""
        return float(self.normal_derivative() @ self.obstacle.weights)

    def values_at(self, points, *, near="auto"):
        """Evaluate u; points within two panel lengths use careful quadrature."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = _kernel_matrix(self.obstacle, pts) @ (self.density * self.obstacle.weights)
        if near == "auto":
            cutoff = 2.0 * self.obstacle.panel_length
            box = (
                np.abs(pts[:, 0] - self.obstacle.centroid[0]) < self.obstacle.extent + 3 * cutoff
            )
            if box.any():
                d = self.obstacle.boundary_distance(pts[box])
                close = np.flatnonzero(box)[d < cutoff]
                for k in close:
                    out[k] = self._value_near(pts[k])
        return out if np.asarray(points).ndim > 1 else float(out[0])

    def gradient_at(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        g = sk.green_kernel_gradient(pts[:, None, :], self.obstacle.midpoints[None, :, :],
                                     validate=False)
        out = np.einsum("npk,p->nk", g, self.density * self.obstacle.weights)
        return out if np.asarray(points).ndim > 1 else out[0]

    def _fine_nodes(self, factor=64):
        """Trigonometrically upsampled density samples on a fine parameter grid.

        Coarse samples live at the offset nodes (j + 1/2) 2pi/P; the fine grid
        keeps the same half-node phase so FFT zero-padding interpolates them.
        """
        cache = getattr(self, "_fine_cache", None)
        if cache is None or cache[0] != factor:
            P = self.obstacle.panels
            Nf = factor * P
            fine = np.fft.irfft(np.fft.rfft(self.density), Nf) * (Nf / P)
            phi = np.arange(Nf) * (2.0 * np.pi / Nf) + np.pi / P
            pos, dpos = _curve_point(self.obstacle.descriptor, phi)
            speed = np.hypot(dpos[:, 0], dpos[:, 1])
            cache = (factor, pos, fine * speed * (2.0 * np.pi / Nf))
            self._fine_cache = cache
        return cache[1], cache[2]

    def _value_near(self, z):
        """Layer potential close to the boundary via an upsampled trapezoid rule.

        The density is smooth along the curve, so trigonometric upsampling
        pushes the quadrature resolution well below the target distance.
        """
        pos, charges = self._fine_nodes()
        vals = sk.green_kernel(pos, z[None, :], validate=False)
        return float(vals @ charges)

    def representation_identity(self, x):
        """Boundary-integral reconstruction of u(x) (Green representation).

        Returns the panel quadrature of  G_S(y,x) du/dn - u(y) dG_S(y,x)/dn;
        the caller compares it with direct evaluation.
        """
        x = np.asarray(x, dtype=float)
        if self.obstacle.boundary_distance(x[None])[0] < 2.0 * self.obstacle.panel_length:
            raise NearSingularQuadratureError(
                "representation check requires two panel lengths of clearance"
            )
        y = self.obstacle.midpoints
        w = self.obstacle.weights
        gvals = _kernel_matrix(self.obstacle, x[None])[0]
        gn = np.einsum(
            "pk,pk->p",
            sk.green_kernel_gradient(y, x[None, :], validate=False),
            self.obstacle.normals,
        )
        return float((gvals * self.normal_derivative() - self.trace() * gn) @ w)


def solve_dirichlet(obstacle, boundary_values):
    """Collocation solve with prescribed boundary values (no flux constraint)."""
    values = np.asarray(boundary_values, dtype=float)
    density = panel_system(obstacle).solve_dirichlet(values)
    return HarmonicSolution(obstacle, density, None, values)


def solve_constrained(obstacle, boundary_values, total_flux):
    """Solve u = f + lambda on the obstacle with prescribed total flux.

    The flux constraint is imposed as the exactly linear charge row
    sum_j sigma_j w_j = total_flux.
    """
    values = np.asarray(boundary_values, dtype=float)
    density, offset = panel_system(obstacle).solve_constrained(values, total_flux)
    return HarmonicSolution(obstacle, density, offset, values)


def solve_harmonic_measure(obstacle):
    """Harmonic measure of the obstacle: 1 on its boundary, 0 on the walls."""
    return solve_dirichlet(obstacle, np.ones(obstacle.panels))


def solve_height_extension(obstacle):
    """Harmonic extension of the height coordinate x2 from the obstacle boundary."""
    return solve_dirichlet(obstacle, obstacle.midpoints[:, 1])


def boundary_trace(sol, phis):
    """Boundary values of the layer potential at curve parameters ``phis``.

    Off-node evaluation with the same split-kernel trigonometric rule as the
    assembly, so the returned trace reflects the density error alone.  Used
    for trace-residual convergence studies.
    """
    obstacle = sol.obstacle
    P = obstacle.panels
    n = P // 2
    width = 2.0 * np.pi / P
    s_nodes = (np.arange(P) + 0.5) * width
    speed = obstacle.weights / width
    M1 = -_INV_4PI * speed
    phis = np.asarray(phis, dtype=float)
    z, _ = _curve_point(obstacle.descriptor, phis)
    theta = phis[:, None] - s_nodes[None, :]
    tiny = np.abs(np.sin(0.5 * theta)) < 1e-13
    with np.errstate(divide="ignore", invalid="ignore"):
        log_factor = np.log(4.0 * np.sin(0.5 * theta) ** 2)
    M2 = _kernel_matrix(obstacle, z) * speed[None, :] - M1[None, :] * log_factor
    if tiny.any():
        diag = speed * _INV_2PI * np.log(4.0 * np.sin(obstacle.midpoints[:, 1]) / speed)
        M2[tiny] = np.broadcast_to(diag, M2.shape)[tiny]
    R = _log_weights(n, theta)
    return (R * M1[None, :] + (np.pi / n) * M2) @ sol.density

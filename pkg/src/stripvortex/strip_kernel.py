"""Closed-form Green function of -Laplace on the strip R x (0, pi).

All functions take points as array-likes whose last axis holds (x1, x2);
they broadcast like numpy ufuncs.  The kernel is the two-term image form

    G_S(y, x) = -(1/4pi) ln(cosh(y1-x1) - cos(y2-x2))
                + (1/4pi) ln(cosh(y1-x1) - cos(y2+x2)),

which vanishes on both walls and decays like e^{-|y1-x1|}.
"""

import numpy as np

from .errors import DomainError, PreconditionError, SingularEvaluationError

_INV_4PI = 1.0 / (4.0 * np.pi)
_INV_2PI = 1.0 / (2.0 * np.pi)

# Beyond this horizontal separation the two log terms agree to ~1e-16
# relative and their difference drowns in rounding; switch to a log1p form
# of the ratio, which stays relatively accurate until cosh overflows.
FAR_BRANCH_SEPARATION = 40.0

# Regular part H_S(y,x) is evaluated by singular subtraction; below this
# separation return the diagonal value (consistent to O(|y-x|)).
_REGULAR_PART_GUARD = 1e-8


def _split(points):
    p = np.asarray(points, dtype=float)
    return p[..., 0], p[..., 1]


def _check_interior(x2, name="point"):
    if np.any(x2 <= 0.0) or np.any(x2 >= np.pi):
        raise DomainError(f"{name} must satisfy 0 < x2 < pi")


def green_kernel(y, x, *, validate=True):
    """Strip Green function G_S(y, x); positive and symmetric."""
    y1, y2 = _split(y)
    x1, x2 = _split(x)
    if validate:
        _check_interior(y2, "y")
        _check_interior(x2, "x")
    d1 = y1 - x1
    c = np.cosh(d1)
    near = c - np.cos(y2 - x2)
    if validate and np.any(near + np.abs(np.sin(y2) * np.sin(x2)) == 0.0):
        raise SingularEvaluationError("coincident evaluation of the strip kernel")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        direct = -_INV_4PI * np.log(near) + _INV_4PI * np.log(c - np.cos(y2 + x2))
        # cancellation-safe branch: ln(ratio) = log1p(2 sin x2 sin y2 / near)
        far = _INV_4PI * np.log1p(2.0 * np.sin(y2) * np.sin(x2) / near)
    out = np.where(np.abs(d1) > FAR_BRANCH_SEPARATION, far, direct)
    return out if out.ndim else float(out)


def green_kernel_gradient(p, q, *, validate=True):
    """Gradient of ``green_kernel`` in its first argument; shape (..., 2)."""
    p1, p2 = _split(p)
    q1, q2 = _split(q)
    if validate:
        _check_interior(p2, "p")
        _check_interior(q2, "q")
    d1 = p1 - q1
    c = np.cosh(d1)
    s = np.sinh(d1)
    den_m = c - np.cos(p2 - q2)
    den_p = c - np.cos(p2 + q2)
    if validate and np.any(den_m == 0.0):
        raise SingularEvaluationError("coincident evaluation of the strip kernel gradient")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        g1 = -_INV_4PI * s / den_m + _INV_4PI * s / den_p
        g2 = -_INV_4PI * np.sin(p2 - q2) / den_m + _INV_4PI * np.sin(p2 + q2) / den_p
    return np.stack([g1, g2], axis=-1)


def robin_diagonal(x, *, validate=True):
    """Diagonal regular part H_S(x, x) = -(1/2pi) ln(2 sin x2)."""
    _, x2 = _split(x)
    if validate:
        _check_interior(x2, "x")
    out = -_INV_2PI * np.log(2.0 * np.sin(x2))
    return out if out.ndim else float(out)


def regular_part(y, x, *, validate=True):
    """Off-diagonal regular part H_S(y, x) = (1/2pi) ln(1/|y-x|) - G_S(y, x)."""
    yv = np.asarray(y, dtype=float)
    xv = np.asarray(x, dtype=float)
    r = np.hypot(yv[..., 0] - xv[..., 0], yv[..., 1] - xv[..., 1])
    diag = robin_diagonal(xv, validate=validate)
    if np.all(r < _REGULAR_PART_GUARD):
        return diag
    safe_r = np.where(r < _REGULAR_PART_GUARD, 1.0, r)
    off = -_INV_2PI * np.log(safe_r) - green_kernel(
        np.where((r < _REGULAR_PART_GUARD)[..., None], xv + [_REGULAR_PART_GUARD, 0.0], yv),
        xv,
        validate=validate,
    )
    out = np.where(r < _REGULAR_PART_GUARD, diag, off)
    return out if out.ndim else float(out)


def far_field(y, x):
    """Leading far-field term sin(x2) sin(y2) / (pi e^{|x1-y1|}).

    Certified only for horizontal separation >= 5.
    """
    y1, y2 = _split(y)
    x1, x2 = _split(x)
    _check_interior(y2, "y")
    _check_interior(x2, "x")
    sep = np.abs(x1 - y1)
    if np.any(sep < 5.0):
        raise PreconditionError("far-field expansion requires |x1 - y1| >= 5")
    out = np.sin(x2) * np.sin(y2) / (np.pi * np.exp(sep))
    return out if out.ndim else float(out)


def wall_normal_derivative(y, x1, wall, *, validate=True):
    """d/dn G_S(y, (x1, wall-height)) on a strip wall, n the outward normal of S.

    ``wall`` is 'top' (x2 = pi, n = +e2) or 'bottom' (x2 = 0, n = -e2).
    Broadcasts y against x1.
    """
    y1, y2 = _split(y)
    x1 = np.asarray(x1, dtype=float)
    if validate:
        _check_interior(y2, "y")
    c = np.cosh(y1 - x1)
    if wall == "top":
        out = -_INV_2PI * np.sin(y2) / (c + np.cos(y2))
    elif wall == "bottom":
        out = -_INV_2PI * np.sin(y2) / (c - np.cos(y2))
    else:
        raise ValueError("wall must be 'top' or 'bottom'")
    return out if out.ndim else float(out)

"""Closed space curves sampled on a uniform parameter grid.

A :class:`DiscreteCurve` holds ``N`` points of a closed curve in R^3 at the
parameter values ``u_i = 2*pi*i/N``.  Everything geometric (speed, curvature,
torsion, Frenet frame, arclength derivatives) is computed from periodic
fourth-order central differences on that grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateCurveError, InvalidInputError

__all__ = [
    "DiscreteCurve",
    "FrenetField",
    "MIN_NODES",
    "derivatives",
    "periodic_diff",
    "frenet",
    "speed",
    "total_length",
    "resample_uniform",
    "inflection_points",
    "frenet_guard",
    "speed_guard",
]

MIN_NODES = 16
TWO_PI = 2.0 * np.pi

# (offset, weight) pairs of the periodic central stencils; divide by h**k
_STENCILS = {
    1: ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)),
    2: ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12)),
    3: ((-3, 1 / 8), (-2, -1.0), (-1, 13 / 8), (1, -13 / 8), (2, 1.0), (3, -1 / 8)),
}


@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """Closed polyline sample of a curve in R^3.

    Parameters
    ----------
    points : array_like, shape (N, 3)
        Node positions at ``u_i = 2*pi*i/N``.  The closing point is implied
        and must not be repeated.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidInputError(f"points must have shape (N, 3), got {pts.shape}")
        if pts.shape[0] < MIN_NODES:
            raise InvalidInputError(f"need at least {MIN_NODES} nodes, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points contain non-finite coordinates")
        gaps = np.diff(pts, axis=0, append=pts[:1])
        if np.einsum("ij,ij->i", gaps, gaps).min() <= 0.0:
            raise InvalidInputError("consecutive points coincide")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def h(self) -> float:
        """Parameter spacing ``2*pi/N``."""
        return TWO_PI / self.n

    @property
    def u(self) -> np.ndarray:
        return self.h * np.arange(self.n)

    def chords(self) -> np.ndarray:
        """Lengths ``|P_{i+1} - P_i|`` (indices mod N)."""
        return _norm(np.diff(self.points, axis=0, append=self.points[:1]))

    def transformed(self, scale=1.0, rotation=None, shift=None) -> "DiscreteCurve":
        """Return ``scale * R @ p + shift`` applied to every node."""
        pts = self.points * scale
        if rotation is not None:
            pts = pts @ np.asarray(rotation, dtype=float).T
        if shift is not None:
            pts = pts + np.asarray(shift, dtype=float)
        return DiscreteCurve(pts)

    @classmethod
    def from_function(cls, func, n: int) -> "DiscreteCurve":
        """Sample ``func(u) -> (N, 3)`` on the uniform grid."""
        u = TWO_PI * np.arange(n) / n
        return cls(np.asarray(func(u), dtype=float))


@dataclass(frozen=True, eq=False)
class FrenetField:
    """Per-node Frenet data of a :class:`DiscreteCurve`.

    ``tau``, ``tau_s`` and ``tau_ss`` are zeroed where ``tau_valid`` is
    False; the frame vectors ``normal`` and ``binormal`` are NaN there.
    """

    v: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    tau_valid: np.ndarray
    kappa_s: np.ndarray
    kappa_ss: np.ndarray
    tau_s: np.ndarray
    tau_ss: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    binormal: np.ndarray
    h: float
    guard: float = field(default=0.0)

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def ds(self) -> np.ndarray:
        """Quadrature weights ``v_i * h`` for integrals over arclength."""
        return self.v * self.h

    @property
    def length(self) -> float:
        return float(self.ds.sum())

    @property
    def all_valid(self) -> bool:
        return bool(self.tau_valid.all())


def periodic_diff(f: np.ndarray, order: int, h: float) -> np.ndarray:
    """Fourth-order periodic central difference of ``f`` along axis 0."""
    if order not in _STENCILS:
        raise InvalidInputError(f"order must be 1, 2 or 3, got {order}")
    f = np.asarray(f, dtype=np.float64)
    n = f.shape[0]
    ext = np.concatenate([f[-3:], f, f[:3]])
    out = np.zeros_like(f)
    for offset, weight in _STENCILS[order]:
        out += weight * ext[3 + offset:3 + offset + n]
    return out / h**order


def _cross(a, b):
    out = np.empty_like(a)
    out[:, 0] = a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1]
    out[:, 1] = a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2]
    out[:, 2] = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    return out


def _norm(a):
    return np.sqrt(np.einsum("ij,ij->i", a, a))


def derivatives(curve: DiscreteCurve, order: int) -> np.ndarray:
    """Parameter derivative ``d^k gamma / du^k`` at every node, shape (N, 3)."""
    if not isinstance(curve, DiscreteCurve):
        raise InvalidInputError("derivatives expects a DiscreteCurve")
    return periodic_diff(curve.points, order, curve.h)


def speed(curve: DiscreteCurve) -> np.ndarray:
    """Per-node speed ``|gamma_u|``."""
    return np.linalg.norm(derivatives(curve, 1), axis=1)


def total_length(curve: DiscreteCurve) -> float:
    """Length ``sum_i v_i * 2*pi/N`` (periodic trapezoid rule on the speed)."""
    return float(speed(curve).sum() * curve.h)


def speed_guard(length: float) -> float:
    return 1e-12 * length


def frenet_guard(length: float) -> float:
    return 1e-6 * TWO_PI / length


def _arclength_derivs(f, v, v_u, h):
    f_u = periodic_diff(f, 1, h)
    f_uu = periodic_diff(f, 2, h)
    f_s = f_u / v
    f_ss = (f_uu - (v_u / v) * f_u) / v**2
    return f_s, f_ss


def frenet(curve: DiscreteCurve) -> FrenetField:
    """Speed, curvature, torsion, frame and arclength derivatives.

    Raises
    ------
    DegenerateCurveError
        If the speed at any node is below ``1e-12 * L``.
    """
    h = curve.h
    d1 = derivatives(curve, 1)
    d2 = derivatives(curve, 2)
    d3 = derivatives(curve, 3)

    v = _norm(d1)
    length = float(v.sum() * h)
    if not np.isfinite(length) or v.min() <= speed_guard(length):
        raise DegenerateCurveError(f"speed {v.min():.3e} below guard at length {length:.3e}")

    cross = _cross(d1, d2)
    cross_norm = _norm(cross)
    kappa = cross_norm / v**3

    guard = frenet_guard(length)
    valid = kappa > guard
    det = np.einsum("ij,ij->i", cross, d3)
    tau = np.zeros_like(kappa)
    tau[valid] = det[valid] / cross_norm[valid] ** 2

    tangent = d1 / v[:, None]
    binormal = np.full_like(d1, np.nan)
    binormal[valid] = cross[valid] / cross_norm[valid, None]
    normal = _cross(binormal, tangent)

    v_u = periodic_diff(v, 1, h)
    kappa_s, kappa_ss = _arclength_derivs(kappa, v, v_u, h)
    tau_s, tau_ss = _arclength_derivs(tau, v, v_u, h)
    tau_s[~valid] = 0.0
    tau_ss[~valid] = 0.0

    return FrenetField(
        v=v, kappa=kappa, tau=tau, tau_valid=valid,
        kappa_s=kappa_s, kappa_ss=kappa_ss, tau_s=tau_s, tau_ss=tau_ss,
        tangent=tangent, normal=normal, binormal=binormal, h=h, guard=guard,
    )


def inflection_points(field: FrenetField, tol: float) -> list[int]:
    """Indices of nodes with ``kappa < tol``."""
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    return np.flatnonzero(field.kappa < tol).tolist()


# 8-point Gauss-Legendre rule on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _arc(dspline, a, b):
    """Spline arclength between parameter arrays ``a`` and ``b``."""
    width = b - a
    nodes = a[:, None] + width[:, None] * _GL_X[None, :]
    sp = _norm(dspline(nodes.ravel())).reshape(nodes.shape)
    return width * (sp @ _GL_W)


def resample_uniform(curve: DiscreteCurve, m: int) -> DiscreteCurve:
    """Redistribute ``m`` nodes at equal arclength along the periodic cubic
    spline through ``curve``.  Node 0 is kept in place.
    """
    if m < MIN_NODES:
        raise InvalidInputError(f"need at least {MIN_NODES} output nodes, got {m}")
    n, h = curve.n, curve.h
    knots = h * np.arange(n + 1)
    pts = np.vstack([curve.points, curve.points[:1]])
    spline = CubicSpline(knots, pts, bc_type="periodic")
    dspline = spline.derivative()

    seg = _arc(dspline, knots[:-1], knots[1:])
    length = seg.sum()
    if not np.isfinite(length) or seg.min() <= speed_guard(length) * h:
        raise DegenerateCurveError("spline arclength degenerate")
    cum = np.concatenate([[0.0], np.cumsum(seg)])

    targets = length * np.arange(m) / m
    j = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, n - 1)
    rem = targets - cum[j]
    lo = knots[j].copy()
    hi = knots[j + 1].copy()

    # bracketed Newton; bisection whenever the Newton iterate leaves [lo, hi]
    x = lo + (hi - lo) * rem / seg[j]
    for _ in range(30):
        g = _arc(dspline, knots[j], x) - rem
        lo = np.where(g < 0, x, lo)
        hi = np.where(g > 0, x, hi)
        dg = _norm(dspline(x))
        x_new = x - g / dg
        outside = (x_new < lo) | (x_new > hi)
        x_new[outside] = 0.5 * (lo[outside] + hi[outside])
        done = np.abs(x_new - x) < 1e-13 * h
        x = x_new
        if done.all():
            break
    return DiscreteCurve(spline(x))

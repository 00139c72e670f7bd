"""Abresch-Langer self-shrinking curves.

Closed planar curves that shrink homothetically, ``gamma_t = sqrt(1 - 2t)
gamma_0``, have curvature profiles solving

    kappa_ss = kappa_s**2 / kappa + kappa - kappa**3,

normalized so the unit circle (``kappa = 1``) is the trivial solution.
Orbits conserve ``E = kappa_s**2/kappa**2 + kappa**2 - 2 log(kappa) - 1``.
A profile started at its maximum ``kappa_max`` turns the tangent by
``Theta(kappa_max)`` per curvature oscillation; ``q`` oscillations close up
with turning number ``p`` when ``q * Theta = 2 pi p``.  ``Theta`` decreases
from ``sqrt(2) pi`` (near the circle) towards ``pi``, so closed non-circular
solutions exist for ``1/2 < p/q < sqrt(2)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .curve import DiscreteCurve, frenet
from .errors import BlowupError, DomainError, InvalidInputError, NoRootError
from .flow import Scheme, step

__all__ = [
    "Profile",
    "ALProfile",
    "al_ode_rhs",
    "al_energy",
    "integrate_profile",
    "turning_per_oscillation",
    "shoot_closed",
    "embed_profile",
    "verify_shrinker",
    "ADMISSIBLE_WINDOW",
]

ADMISSIBLE_WINDOW = (0.5, math.sqrt(2.0) / 2.0)


def al_ode_rhs(kappa: float, kappa_s: float) -> float:
    """``kappa_ss`` of the shrinker profile equation."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    return kappa_s * kappa_s / kappa + kappa - kappa**3


def al_energy(kappa, kappa_s):
    """First integral ``kappa_s**2/kappa**2 + kappa**2 - 2 log kappa - 1``."""
    kappa = np.asarray(kappa, dtype=float)
    kappa_s = np.asarray(kappa_s, dtype=float)
    return (kappa_s / kappa) ** 2 + kappa**2 - 2.0 * np.log(kappa) - 1.0


def _rk4(k, ks, th, h):
    # (kappa, kappa_s, theta) with theta' = kappa
    a1, b1, c1 = ks, al_ode_rhs(k, ks), k
    k2, ks2 = k + 0.5 * h * a1, ks + 0.5 * h * b1
    a2, b2, c2 = ks2, al_ode_rhs(k2, ks2), k2
    k3, ks3 = k + 0.5 * h * a2, ks + 0.5 * h * b2
    a3, b3, c3 = ks3, al_ode_rhs(k3, ks3), k3
    k4, ks4 = k + h * a3, ks + h * b3
    a4, b4, c4 = ks4, al_ode_rhs(k4, ks4), k4
    return (k + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4),
            ks + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4),
            th + h / 6 * (c1 + 2 * c2 + 2 * c3 + c4))


@dataclass(frozen=True)
class Profile:
    """One full curvature oscillation, maximum to maximum."""

    kappa_max: float
    s: np.ndarray
    kappa: np.ndarray
    kappa_s: np.ndarray
    theta: np.ndarray
    period: float

    @property
    def turning(self) -> float:
        """Tangent turning over one oscillation."""
        return float(self.theta[-1] - self.theta[0])

    @property
    def kappa_min(self) -> float:
        return float(self.kappa.min())


def _half_oscillation(kappa_max, ds):
    k, ks, th = kappa_max, 0.0, 0.0
    s = 0.0
    rows = [(s, k, ks, th)]
    upper = 10.0 * kappa_max
    while True:
        nk, nks, nth = _rk4(k, ks, th, ds)
        if not 0.0 < nk < upper:
            raise BlowupError(f"kappa left (0, {upper}) at s={s + ds}")
        if nks >= 0.0 and s > 0.0:
            # refine the final partial step so that kappa_s lands on zero
            h = brentq(lambda h: _rk4(k, ks, th, h)[1], 0.0, ds, xtol=1e-16, rtol=1e-15)
            k, ks, th = _rk4(k, ks, th, h)
            s += h
            rows.append((s, k, 0.0, th))
            return np.array(rows)
        k, ks, th = nk, nks, nth
        s += ds
        rows.append((s, k, ks, th))
        if s > 1e4:
            raise BlowupError("no curvature minimum found")


def integrate_profile(kappa_max: float, ds: float = 1e-3) -> Profile:
    """Integrate from ``kappa = kappa_max, kappa_s = 0`` to the next minimum
    and mirror to a full oscillation.

    ``kappa_max == 1`` returns the constant circle profile over the
    linearized period ``2 pi / sqrt(2)``.
    """
    if not kappa_max >= 1.0:
        raise InvalidInputError("kappa_max must be >= 1")
    if not ds > 0:
        raise InvalidInputError("ds must be positive")
    if kappa_max == 1.0:
        period = 2.0 * math.pi / math.sqrt(2.0)
        s = np.linspace(0.0, period, 65)
        return Profile(1.0, s, np.ones_like(s), np.zeros_like(s), s.copy(), period)
    half = _half_oscillation(float(kappa_max), float(ds))
    s_h, k_h, ks_h, th_h = half.T
    half_len = s_h[-1]
    s = np.concatenate([s_h, 2 * half_len - s_h[-2::-1]])
    kappa = np.concatenate([k_h, k_h[-2::-1]])
    kappa_s = np.concatenate([ks_h, -ks_h[-2::-1]])
    theta = np.concatenate([th_h, 2 * th_h[-1] - th_h[-2::-1]])
    return Profile(float(kappa_max), s, kappa, kappa_s, theta, float(2 * half_len))


def _half_turning(kappa_max, ds):
    half = _half_oscillation(kappa_max, ds)
    return half[-1, 3], half[-1, 0]


def turning_per_oscillation(kappa_max: float, ds: float = 1e-3) -> float:
    """Tangent turning ``Theta`` over one full oscillation."""
    if kappa_max == 1.0:
        return math.sqrt(2.0) * math.pi
    return 2.0 * _half_turning(float(kappa_max), ds)[0]


def converged_ds(kappa_max: float, ds0: float = 1e-3, rtol: float = 1e-6,
                 max_halvings: int = 6) -> float:
    """Halve ``ds`` from ``ds0`` until the period changes by less than ``rtol``."""
    ds = ds0
    period = 2.0 * _half_turning(kappa_max, ds)[1]
    for _ in range(max_halvings):
        new = 2.0 * _half_turning(kappa_max, ds / 2)[1]
        if abs(new - period) <= rtol * period:
            return ds
        ds, period = ds / 2, new
    return ds


@dataclass(frozen=True)
class ALProfile:
    """A closed Abresch-Langer curve.

    ``kappa_of_s`` samples one oscillation over ``s_grid``; ``curve`` is the
    embedded planar curve with homothety centre at the origin.
    """

    p: int
    q: int
    kappa_max: float
    s_grid: np.ndarray
    kappa_of_s: np.ndarray
    period: float
    length: float
    closure_error: float
    turning_error: float
    curve: DiscreteCurve

    @property
    def rotation_number(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def sup_kappa_length(self) -> float:
        """``max kappa * L``, finite for every closed profile."""
        return float(self.kappa_max * self.length)

    def metadata(self) -> dict:
        return {
            "kappa_max": self.kappa_max,
            "p": self.p,
            "q": self.q,
            "closure_error": self.closure_error,
            "period": self.period,
            "sup_kappa_L": self.sup_kappa_length,
        }


def _embed_rhs(y):
    k, ks, th = y[0], y[1], y[2]
    return np.array([ks, al_ode_rhs(k, ks), k, math.cos(th), math.sin(th)])


def embed_profile(kappa_max: float, oscillations: int, n: int, ds_max: float = 1e-3):
    """Integrate curvature, angle and position over ``oscillations`` periods.

    Returns ``(points, length, end_state)`` with ``n`` nodes at equal
    arclength; the start point ``(0, -kappa_max)`` puts the homothety centre
    at the origin.
    """
    period = 2.0 * _half_turning(kappa_max, ds_max / 4)[1]
    length = oscillations * period
    node_ds = length / n
    sub = max(1, math.ceil(node_ds / ds_max))
    h = node_ds / sub
    y = np.array([kappa_max, 0.0, 0.0, 0.0, -kappa_max])
    pts = np.empty((n, 3))
    for i in range(n):
        pts[i] = (y[3], y[4], 0.0)
        for _ in range(sub):
            a = _embed_rhs(y)
            b = _embed_rhs(y + 0.5 * h * a)
            c = _embed_rhs(y + 0.5 * h * b)
            d = _embed_rhs(y + h * c)
            y = y + h / 6 * (a + 2 * b + 2 * c + d)
    return pts, length, y


def shoot_closed(p: int, q: int, tol: float = 1e-10, n: int = 512,
                 ds: float | None = None) -> ALProfile:
    """Find the closed shrinker with turning number ``p`` over ``q``
    curvature oscillations.

    ``p == q == 1`` returns the unit circle.

    Raises
    ------
    NoRootError
        If ``p/q`` lies outside ``(1/2, sqrt(2)/2)`` or the turning function
        does not bracket ``2 pi p / q``.
    """
    if q < 1 or p < 1:
        raise InvalidInputError("p and q must be positive")
    if p == q == 1:
        u = 2 * math.pi * np.arange(n) / n
        pts = np.c_[np.cos(u), np.sin(u), np.zeros(n)]
        curve = DiscreteCurve(pts)
        closure = float(np.linalg.norm(pts[0] - np.array([math.cos(2 * math.pi),
                                                          math.sin(2 * math.pi), 0.0])))
        s = np.linspace(0.0, 2 * math.pi, 65)
        return ALProfile(1, 1, 1.0, s, np.ones_like(s), 2 * math.pi, 2 * math.pi,
                         closure / (2 * math.pi), 0.0, curve)
    lo_w, hi_w = ADMISSIBLE_WINDOW
    ratio = p / q
    if not lo_w < ratio < hi_w:
        raise NoRootError(f"p/q = {ratio:.6f} outside the admissible window ({lo_w}, {hi_w:.6f})")

    target = 2.0 * math.pi * p / q
    step_ds = 1e-3 if ds is None else ds

    def g(k):
        return turning_per_oscillation(k, step_ds) - target

    k_lo = 1.0 + 1e-6
    if not g(k_lo) > 0:
        raise NoRootError("turning near the circle does not exceed the target")
    k_hi = 1.5
    while g(k_hi) > 0:
        k_hi *= 1.5
        if k_hi > 50:
            raise NoRootError("no bracket for the turning target")
    kmax = brentq(g, k_lo, k_hi, xtol=1e-14, rtol=1e-14)
    if ds is None:
        step_ds = converged_ds(kmax)
        kmax = brentq(g, max(k_lo, kmax * (1 - 1e-3)), kmax * (1 + 1e-3), xtol=1e-14, rtol=1e-14)
    turning_err = abs(q * turning_per_oscillation(kmax, step_ds) - 2 * math.pi * p)
    if turning_err >= tol:
        raise NoRootError(f"turning error {turning_err:.3e} exceeds tol {tol:.1e}")

    prof = integrate_profile(kmax, step_ds)
    pts, length, end = embed_profile(kmax, q, n, ds_max=step_ds)
    start = np.array([0.0, -kmax])
    closure = float(np.hypot(*(end[3:5] - start)) / length)
    return ALProfile(p, q, float(kmax), prof.s, prof.kappa, prof.period, float(length),
                     closure, float(turning_err), DiscreteCurve(pts))


def verify_shrinker(profile: ALProfile, dt_probe: float, normal_only: bool = False,
                    scheme=Scheme.SEMI_IMPLICIT) -> float:
    """Max deviation of one flow step from the homothety ``sqrt(1 - 2 dt) gamma``,
    relative to the curve's radius ``max |gamma|``.

    The nodewise comparison includes the tangential slip of nodes (the flow
    moves nodes normally, the homothety radially), which is first order in
    ``dt_probe``.  ``normal_only`` projects the difference on the discrete
    normal to isolate the shape error.
    """
    curve = profile.curve
    new = step(curve, dt_probe, scheme).points
    pred = math.sqrt(1.0 - 2.0 * dt_probe) * curve.points
    diff = new - pred
    if normal_only:
        nrm = frenet(curve).normal
        diff = np.einsum("ij,ij->i", diff, nrm)[:, None]
    radius = float(np.max(np.linalg.norm(curve.points, axis=1)))
    return float(np.max(np.linalg.norm(diff, axis=1)) / radius)

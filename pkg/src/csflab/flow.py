"""Time integration of curve shortening flow, d(gamma)/dt = kappa N.

The curve is evolved extrinsically.  The velocity ``kappa N = gamma_ss`` is
discretized by the chord-weighted second difference

    (A gamma)_i = 2 / (c_i + c_{i-1}) * ((gamma_{i+1} - gamma_i) / c_i
                                         - (gamma_i - gamma_{i-1}) / c_{i-1})

with ``c_i = |gamma_{i+1} - gamma_i|``.  On a uniform-speed mesh this is the
ordinary periodic second difference scaled by ``1/v**2``; it moves nodes
normally (no tangential drift) and shrinks a regular polygon inscribed in a
circle at exactly the continuous rate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curve import DiscreteCurve, periodic_diff, resample_uniform, speed_guard
from .diagnostics import SeriesRecorder, TimeSeries
from .errors import (
    InsufficientDataError,
    InvalidInputError,
    NonmonotoneError,
    StepFailure,
)
from .tridiag import solve_cyclic_tridiagonal

__all__ = [
    "Scheme",
    "StopReason",
    "FlowConfig",
    "Trajectory",
    "ProbeWindow",
    "curvature_operator",
    "step",
    "stable_dt",
    "evolve",
    "probe_window",
    "estimate_singularity_time",
    "fit_window",
]


class Scheme(str, enum.Enum):
    SEMI_IMPLICIT = "SemiImplicit"
    EXPLICIT_RK4 = "ExplicitRK4"


class StopReason(str, enum.Enum):
    CURVATURE_BLOWUP = "CurvatureBlowup"
    LENGTH_FLOOR = "LengthFloor"
    TIME_CAP = "TimeCap"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class FlowConfig:
    """Integration settings.

    ``kappa_stop`` and ``length_min`` default to ``1e3 / L0`` and
    ``1e-3 * L0`` when left as None; see :meth:`resolved`.

    ``implicit_accuracy`` is the divisor ``K`` in the semi-implicit step
    ``dt = sigma * h_min / (K * kappa_max)``.  ``snapshot_every`` keeps every
    k-th recorded sample as a snapshot in addition to the geometric cadence.
    """

    scheme: Scheme = Scheme.SEMI_IMPLICIT
    dt_safety: float = 0.5
    resample_every: int = 10
    kappa_stop: float | None = None
    length_min: float | None = None
    t_max: float = math.inf
    n: int = 512
    implicit_accuracy: float = 32.0
    snapshot_every: int = 50
    snapshot_growth: float = 2.0 ** 0.25

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not 0.0 < self.dt_safety <= 1.0:
            raise InvalidInputError("dt_safety must lie in (0, 1]")
        if self.resample_every < 1:
            raise InvalidInputError("resample_every must be >= 1")
        if self.kappa_stop is not None and not self.kappa_stop > 0:
            raise InvalidInputError("kappa_stop must be positive")
        if self.n < 16:
            raise InvalidInputError("n must be >= 16")
        if not self.t_max > 0:
            raise InvalidInputError("t_max must be positive")
        if not self.implicit_accuracy > 0:
            raise InvalidInputError("implicit_accuracy must be positive")
        if self.snapshot_every < 1:
            raise InvalidInputError("snapshot_every must be >= 1")

    def resolved(self, length0: float) -> "FlowConfig":
        """Fill the length-relative defaults from the initial length."""
        return replace(
            self,
            kappa_stop=1e3 / length0 if self.kappa_stop is None else self.kappa_stop,
            length_min=1e-3 * length0 if self.length_min is None else self.length_min,
        )


@dataclass
class Trajectory:
    snapshots: list[tuple[float, DiscreteCurve]]
    series: TimeSeries
    stop_reason: StopReason | None = None
    steps: int = 0
    config: FlowConfig | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.snapshots])

    def snapshot_at(self, t: float) -> tuple[float, DiscreteCurve]:
        """Snapshot whose time is closest to ``t``."""
        k = int(np.argmin(np.abs(self.times - t)))
        return self.snapshots[k]


@dataclass(frozen=True)
class ProbeWindow:
    """Consecutive states at a fixed parametrization (no resampling)."""

    times: tuple[float, ...]
    curves: tuple[DiscreteCurve, ...]
    resampled: bool = False


def _chord_weights(points):
    fwd = np.diff(points, axis=0, append=points[:1])
    c = np.sqrt(np.einsum("ij,ij->i", fwd, fwd))
    c_prev = np.roll(c, 1)
    w = 2.0 / (c + c_prev)
    return c, c_prev, w


def curvature_operator(points: np.ndarray):
    """Sub-, main and super-diagonal of the velocity operator ``A``."""
    c, c_prev, w = _chord_weights(points)
    lower = w / c_prev
    upper = w / c
    return lower, -(lower + upper), upper


def _apply(points):
    lower, diag, upper = curvature_operator(points)
    return (lower[:, None] * np.roll(points, 1, axis=0)
            + diag[:, None] * points
            + upper[:, None] * np.roll(points, -1, axis=0))


def step(curve: DiscreteCurve, dt: float, scheme=Scheme.SEMI_IMPLICIT) -> DiscreteCurve:
    """Advance ``curve`` by one time step of size ``dt``.

    Raises
    ------
    StepFailure
        On non-finite output or if the minimum node spacing collapses.
    """
    if not dt > 0:
        raise InvalidInputError("dt must be positive")
    scheme = Scheme(scheme)
    x = curve.points
    if scheme is Scheme.SEMI_IMPLICIT:
        lower, diag, upper = curvature_operator(x)
        new = solve_cyclic_tridiagonal(-dt * lower, 1.0 - dt * diag, -dt * upper, x)
    else:
        k1 = _apply(x)
        k2 = _apply(x + 0.5 * dt * k1)
        k3 = _apply(x + 0.5 * dt * k2)
        k4 = _apply(x + dt * k3)
        new = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    if not np.all(np.isfinite(new)):
        raise StepFailure("non-finite coordinates after step")
    gaps = np.diff(new, axis=0, append=new[:1])
    c = np.sqrt(np.einsum("ij,ij->i", gaps, gaps))
    if c.min() < speed_guard(c.sum()):
        raise StepFailure(f"node spacing collapsed to {c.min():.3e}")
    return DiscreteCurve(new)


def _kappa_max(points, h):
    d1 = periodic_diff(points, 1, h)
    d2 = periodic_diff(points, 2, h)
    v2 = np.einsum("ij,ij->i", d1, d1)
    cr = np.einsum("ij,ij->i", d2, d2) * v2 - np.einsum("ij,ij->i", d1, d2) ** 2
    return float(np.sqrt(np.max(np.maximum(cr, 0.0) / v2**3)))


def stable_dt(curve: DiscreteCurve, config: FlowConfig, kappa_max: float | None = None) -> float:
    """Step size for ``config.scheme``.

    ExplicitRK4 uses the diffusive limit ``sigma * h_min**2 / 4``.  The
    semi-implicit scheme is unconditionally stable; its step is limited by
    accuracy, ``sigma * h_min / (K * kappa_max)``, which keeps
    ``dt * kappa_max**2`` proportional to the mesh resolution ``h_min *
    kappa_max`` and never lets a step jump past the singular time.
    """
    h_min = float(curve.chords().min())
    sigma = config.dt_safety
    if config.scheme is Scheme.EXPLICIT_RK4:
        return sigma * h_min**2 / 4.0
    kmax = _kappa_max(curve.points, curve.h) if kappa_max is None else kappa_max
    # a straight-ish mesh has no curvature scale; fall back to the diffusive one
    kmax = max(kmax, 1.0 / (curve.chords().sum()))
    return sigma * h_min / (config.implicit_accuracy * kmax)


def evolve(curve0: DiscreteCurve, config: FlowConfig | None = None, recorder=None) -> Trajectory:
    """Run the flow until curvature blow-up, the length floor, or ``t_max``.

    The initial curve is resampled to ``config.n`` uniform-arclength nodes.
    Every ``resample_every`` steps the mesh is resampled and one diagnostics
    sample is recorded; the final state is likewise resampled before its
    sample is taken.

    ``recorder`` needs ``record(t, curve)`` and a ``series`` attribute; the
    default is :class:`csflab.diagnostics.SeriesRecorder`.

    Raises
    ------
    StepFailure
        With the partial trajectory attached as ``exc.trajectory``.
    """
    config = config or FlowConfig()
    recorder = SeriesRecorder() if recorder is None else recorder
    curve = resample_uniform(curve0, config.n)
    config = config.resolved(float(curve.chords().sum()))

    traj = Trajectory(snapshots=[], series=recorder.series, config=config)
    t = 0.0
    last_snap_m = None
    n_samples = 0

    def record(t, curve, final=False):
        nonlocal last_snap_m, n_samples
        rec = recorder.record(t, curve)
        m = rec.M
        keep = (
            final
            or last_snap_m is None
            or m >= last_snap_m * config.snapshot_growth
            or n_samples % config.snapshot_every == 0
        )
        if keep:
            traj.snapshots.append((t, curve))
            last_snap_m = m if last_snap_m is None else max(m, last_snap_m)
        n_samples += 1

    record(t, curve)
    since_resample = 0
    kmax = _kappa_max(curve.points, curve.h)
    while True:
        dt = stable_dt(curve, config, kmax)
        if t + dt >= config.t_max:
            dt = config.t_max - t
        try:
            curve = step(curve, dt, config.scheme)
        except StepFailure as exc:
            traj.stop_reason = StopReason.STEP_FAILURE
            exc.trajectory = traj
            raise
        t += dt
        traj.steps += 1
        since_resample += 1

        stop = None
        kmax = _kappa_max(curve.points, curve.h)
        if kmax >= config.kappa_stop:
            stop = StopReason.CURVATURE_BLOWUP
        elif curve.chords().sum() <= config.length_min:
            stop = StopReason.LENGTH_FLOOR
        elif t >= config.t_max:
            stop = StopReason.TIME_CAP

        if stop is not None or since_resample >= config.resample_every:
            curve = resample_uniform(curve, config.n)
            since_resample = 0
            record(t, curve, final=stop is not None)
            kmax = _kappa_max(curve.points, curve.h)
        if stop is not None:
            traj.stop_reason = stop
            return traj


def probe_window(curve: DiscreteCurve, dt: float, scheme=Scheme.SEMI_IMPLICIT,
                 t0: float = 0.0, steps: int = 2) -> ProbeWindow:
    """Take ``steps`` steps from ``curve`` without resampling."""
    curves = [curve]
    for _ in range(steps):
        curves.append(step(curves[-1], dt, scheme))
    times = tuple(t0 + k * dt for k in range(steps + 1))
    return ProbeWindow(times=times, curves=tuple(curves), resampled=False)


def fit_window(n_samples: int) -> int:
    """Tail length ``max(10, 20%)`` used by the singular-time fit."""
    return max(10, int(math.ceil(0.2 * n_samples)))


def estimate_singularity_time(series: TimeSeries, window: int | None = None):
    """Least-squares fit of ``1/M_t`` against ``t`` over the tail.

    Returns ``(omega_hat, fit_residual)`` where the residual is the RMS of
    the fit in units of ``1/M``.  If the fitted intercept does not lie past
    the last sample, the secant through the last two samples is used instead
    (the residual still reports the line fit).

    Raises
    ------
    InsufficientDataError
        Fewer than ``window`` (default ``max(10, 20%)``) samples.
    NonmonotoneError
        ``M_t`` not strictly increasing over the window.
    """
    t = np.asarray(series.t)
    m = np.asarray(series.M)
    w = fit_window(len(t)) if window is None else int(window)
    if len(t) < max(w, 10):
        raise InsufficientDataError(f"need {max(w, 10)} samples, have {len(t)}")
    tt, mm = t[-w:], m[-w:]
    if np.any(np.diff(mm) <= 0) or np.any(mm <= 0):
        raise NonmonotoneError("M_t is not increasing over the fit window")
    y = 1.0 / mm
    slope, intercept = np.polyfit(tt, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * tt + intercept)) ** 2)))
    omega = -intercept / slope if slope < 0 else -np.inf
    if not omega > tt[-1]:
        s = (y[-1] - y[-2]) / (tt[-1] - tt[-2])
        omega = tt[-1] - y[-1] / s
    return float(omega), resid

"""Geometric functionals along a flow and the singularity classifier.

Per-sample functionals (all quadratures are ``sum(f_i * v_i * 2*pi/N)``):

``L``                  total length
``M``                  ``max kappa**2``
``D``                  ``max kappa * L``
``tau_l1``             ``integral |tau| ds``
``sup_tau_over_kappa`` ``max |tau| / kappa`` over nodes with valid torsion
``inf_tau``            ``min tau`` over nodes with valid torsion
``n_inflections``      nodes with ``kappa`` below the inflection tolerance
``rate``               ``integral kappa**2 tau ds`` (signed torsion)

Nodes whose curvature is at or below the Frenet guard carry no torsion; they
contribute zero to torsion integrals and mark the sample as contaminated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .curve import DiscreteCurve, FrenetField, frenet
from .errors import (
    InflectionContaminationError,
    InsufficientDataError,
    InvalidInputError,
    InvalidTimeError,
    ProbeWindowError,
)

__all__ = [
    "Sample",
    "TimeSeries",
    "SeriesRecorder",
    "Verdict",
    "SingularityReport",
    "ProbeResidual",
    "MaxPrincipleReport",
    "SERIES_COLUMNS",
    "sample",
    "l1_torsion_rate",
    "speed_evolution_residual",
    "torsion_evolution_rhs",
    "torsion_evolution_residual",
    "max_principle_probe",
    "classify",
    "rescale_huisken",
    "tail_mask",
    "final_decade_q_growth",
    "monotone_trend",
]

SERIES_COLUMNS = ("t", "L", "M", "D", "tau_l1", "sup_tau_over_kappa",
                  "inf_tau", "n_inflections", "rate")


@dataclass(frozen=True)
class Sample:
    t: float
    L: float
    M: float
    D: float
    tau_l1: float
    sup_tau_over_kappa: float
    inf_tau: float
    n_inflections: int
    rate: float
    # not serialized to CSV
    sup_tau: float = 0.0
    tau_signed: float = 0.0
    rate_abs: float = 0.0
    tau_sign_changes: int = 0
    contaminated: bool = False

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in SERIES_COLUMNS)


@dataclass
class TimeSeries:
    """Ordered diagnostic samples; times strictly increasing."""

    records: list[Sample] = field(default_factory=list)

    def append(self, rec: Sample) -> None:
        if self.records and not rec.t > self.records[-1].t:
            raise InvalidInputError("sample times must be strictly increasing")
        self.records.append(rec)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, k):
        return self.records[k]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def __getattr__(self, name):
        # series.t, series.M, ... as arrays
        if name in Sample.__dataclass_fields__:
            return self.column(name)
        raise AttributeError(name)

    @property
    def last_inflection_time(self) -> float | None:
        """Latest sample time with any inflection node, or None."""
        hits = [r.t for r in self.records if r.n_inflections > 0]
        return hits[-1] if hits else None


def _sign_changes(values):
    s = np.sign(values)
    s = s[s != 0]
    if s.size < 2:
        return 0
    return int(np.count_nonzero(s != np.roll(s, 1)))


def sample(curve: DiscreteCurve, t: float, field: FrenetField | None = None,
           inflection_tol: float | None = None) -> Sample:
    """Evaluate every tracked functional on one curve.

    ``inflection_tol`` defaults to ``1e-3 * 2*pi / L``, i.e. ``1e-3`` on the
    unit circle.
    """
    f = frenet(curve) if field is None else field
    ds = f.ds
    length = float(ds.sum())
    kmax = float(f.kappa.max())
    valid = f.tau_valid
    tau = f.tau
    abs_tau = np.abs(tau)
    if inflection_tol is None:
        inflection_tol = 1e-3 * 2.0 * np.pi / length
    if valid.any():
        ratio = float(np.max(abs_tau[valid] / f.kappa[valid]))
        inf_tau = float(tau[valid].min())
        sup_tau = float(abs_tau[valid].max())
    else:
        ratio = inf_tau = sup_tau = 0.0
    k2 = f.kappa**2
    return Sample(
        t=float(t),
        L=length,
        M=kmax**2,
        D=kmax * length,
        tau_l1=float(abs_tau @ ds),
        sup_tau_over_kappa=ratio,
        inf_tau=inf_tau,
        n_inflections=int(np.count_nonzero(f.kappa < inflection_tol)),
        rate=float((k2 * tau) @ ds),
        sup_tau=sup_tau,
        tau_signed=float(tau @ ds),
        rate_abs=float((k2 * abs_tau) @ ds),
        tau_sign_changes=_sign_changes(tau[valid]),
        contaminated=not bool(valid.all()),
    )


class SeriesRecorder:
    """Flow hook: one :class:`Sample` per ``record`` call."""

    def __init__(self, inflection_tol: float | None = None):
        self.series = TimeSeries()
        self.inflection_tol = inflection_tol

    def record(self, t: float, curve: DiscreteCurve) -> Sample:
        rec = sample(curve, t, inflection_tol=self.inflection_tol)
        self.series.append(rec)
        return rec


def l1_torsion_rate(curve: DiscreteCurve, field: FrenetField | None = None) -> float:
    """``integral kappa**2 tau ds``, the time derivative of ``integral tau ds``.

    When ``tau > 0`` everywhere this is also the rate of change of
    ``integral |tau| ds``.  Invalid-torsion nodes contribute zero; check
    ``field.all_valid`` before relying on the identity.
    """
    f = frenet(curve) if field is None else field
    return float((f.kappa**2 * f.tau) @ f.ds)


@dataclass(frozen=True)
class ProbeResidual:
    residual: np.ndarray
    scale: float

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.residual)))

    @property
    def relative(self) -> float:
        return self.max_abs / self.scale if self.scale > 0 else self.max_abs


def _three(window):
    if getattr(window, "resampled", False):
        raise ProbeWindowError("probe window was resampled")
    times, curves = window.times, window.curves
    if len(curves) != 3:
        raise ProbeWindowError("probe window needs exactly three states")
    if len({c.n for c in curves}) != 1:
        raise ProbeWindowError("node count changed inside the probe window")
    return times, curves


def speed_evolution_residual(window) -> ProbeResidual:
    """Residual of ``dv/dt = -kappa**2 v`` at the middle state of a window.

    ``window`` has ``times`` and ``curves`` (three states, fixed
    parametrization) and a ``resampled`` flag, e.g.
    :class:`csflab.flow.ProbeWindow`.  ``scale`` is ``max kappa**2 v``.
    """
    times, curves = _three(window)
    f0, f1, f2 = (frenet(c) for c in curves)
    v_t = (f2.v - f0.v) / (times[2] - times[0])
    target = f1.kappa**2 * f1.v
    return ProbeResidual(v_t + target, float(np.max(np.abs(target))))


def torsion_evolution_rhs(field: FrenetField) -> np.ndarray:
    """Right-hand side of the torsion evolution under the flow,

    ``tau_ss + 2 kappa_s tau_s / kappa
    + (2 tau / kappa) (kappa_ss - kappa_s**2 / kappa + kappa**3)``.

    Raises
    ------
    InflectionContaminationError
        If any node fails the curvature guard.
    """
    if not field.all_valid:
        raise InflectionContaminationError(
            f"{np.count_nonzero(~field.tau_valid)} nodes below the curvature guard")
    k, ks, kss = field.kappa, field.kappa_s, field.kappa_ss
    tau, ts, tss = field.tau, field.tau_s, field.tau_ss
    return tss + 2.0 * ks * ts / k + (2.0 * tau / k) * (kss - ks**2 / k + k**3)


def torsion_evolution_residual(window) -> ProbeResidual:
    """Central time difference of nodal torsion minus the evolution rhs.
    ``scale`` is ``max |rhs|``."""
    times, curves = _three(window)
    f0, f1, f2 = (frenet(c) for c in curves)
    rhs = torsion_evolution_rhs(f1)
    if not (f0.all_valid and f2.all_valid):
        raise InflectionContaminationError("torsion undefined inside probe window")
    tau_t = (f2.tau - f0.tau) / (times[2] - times[0])
    return ProbeResidual(tau_t - rhs, float(np.max(np.abs(rhs))))


@dataclass
class MaxPrincipleReport:
    """Outcome of the torsion minimum-principle probe.

    ``status`` per sample is one of ``"checked"``, ``"not-near-zero"``,
    ``"planar"`` or ``"inflection"``.
    """

    times: list[float] = field(default_factory=list)
    status: list[str] = field(default_factory=list)
    inf_tau: list[float] = field(default_factory=list)
    sign_changes: list[int] = field(default_factory=list)
    rhs_at_min: list[float] = field(default_factory=list)
    violations: list[float] = field(default_factory=list)

    @property
    def n_checked(self) -> int:
        return self.status.count("checked")

    @property
    def all_inapplicable(self) -> bool:
        return self.n_checked == 0

    @property
    def positivity_persists(self) -> bool:
        """Once ``inf tau > 0`` at some sample, it stays positive after."""
        seen = False
        for s, x in zip(self.status, self.inf_tau):
            if s in ("planar", "inflection"):
                continue
            if x > 0:
                seen = True
            elif seen:
                return False
        return True


def max_principle_probe(trajectory, probe_tol_rel: float = 1e-3,
                        slack_rel: float = 1e-2, planar_tol: float = 1e-8) -> MaxPrincipleReport:
    """Check ``d tau/dt >= 0`` at a vanishing torsion minimum.

    For every snapshot the global torsion minimiser is located; when
    ``|tau_min| < probe_tol_rel * max|tau|`` the evolution rhs there must be
    at least ``-slack_rel * max|rhs|``.
    """
    rep = MaxPrincipleReport()
    for t, curve in trajectory.snapshots:
        f = frenet(curve)
        rep.times.append(float(t))
        rhs_i = float("nan")
        if not f.all_valid:
            status, inf_tau, changes = "inflection", float("nan"), 0
        else:
            tau_max = float(np.max(np.abs(f.tau)))
            i = int(np.argmin(f.tau))
            inf_tau = float(f.tau[i])
            changes = _sign_changes(f.tau)
            if tau_max < planar_tol:
                status = "planar"
            elif abs(inf_tau) < probe_tol_rel * tau_max:
                rhs = torsion_evolution_rhs(f)
                rhs_i = float(rhs[i])
                status = "checked"
                if rhs_i < -slack_rel * float(np.max(np.abs(rhs))):
                    rep.violations.append(float(t))
            else:
                status = "not-near-zero"
        rep.status.append(status)
        rep.inf_tau.append(inf_tau)
        rep.sign_changes.append(changes)
        rep.rhs_at_min.append(rhs_i)
    return rep


class Verdict(str, enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    UNDETERMINED = "Undetermined"


@dataclass
class SingularityReport:
    omega_hat: float
    fit_residual: float
    t_tail: np.ndarray
    Q_tail: np.ndarray
    verdict: Verdict
    C_hat: float
    D_hat: float
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "omega_hat": self.omega_hat,
            "fit_residual": self.fit_residual,
            "t_tail": [float(x) for x in self.t_tail],
            "Q_tail": [float(x) for x in self.Q_tail],
            "verdict": self.verdict.value,
            "C_hat": self.C_hat,
            "D_hat": self.D_hat,
            "notes": list(self.notes),
        }


def tail_mask(series: TimeSeries, factor: float = 100.0) -> np.ndarray:
    """Samples with ``M_t >= factor * M_0``."""
    m = series.M
    return m >= factor * m[0]


def classify(series: TimeSeries, omega_hat: float, fit_residual: float,
             plateau_ratio: float = 1.5, growth: float = 2.0,
             residual_tol: float = 1e-2, tail_factor: float = 100.0,
             min_tail: int = 3) -> SingularityReport:
    """Classify the singularity from ``Q(t) = M_t (omega_hat - t)``.

    TypeI: ``max Q / min Q < plateau_ratio`` over the tail and the
    ``1/M_t`` fit residual below ``residual_tol`` times ``1/M`` at the tail
    start.  TypeII: ``Q`` strictly increasing across the tail by more than
    ``growth``.  Anything else is Undetermined.

    Raises
    ------
    InsufficientDataError
        Fewer than ``min_tail`` samples with ``M_t >= tail_factor * M_0``
        before ``omega_hat``.
    """
    if len(series) == 0:
        raise InsufficientDataError("empty series")
    t = series.t
    m = series.M
    mask = tail_mask(series, tail_factor) & (t < omega_hat)
    if np.count_nonzero(mask) < min_tail:
        raise InsufficientDataError(
            f"only {np.count_nonzero(mask)} samples past M_t >= {tail_factor} M_0")
    t_tail = t[mask]
    q = m[mask] * (omega_hat - t_tail)
    rel_resid = fit_residual * m[mask][0]

    notes = []
    if q.max() / q.min() < plateau_ratio and rel_resid < residual_tol:
        verdict = Verdict.TYPE_I
    elif np.all(np.diff(q) > 0) and q[-1] / q[0] > growth:
        verdict = Verdict.TYPE_II
    else:
        verdict = Verdict.UNDETERMINED
    if rel_resid >= residual_tol:
        notes.append(f"1/M_t line fit is poor (relative residual {rel_resid:.2e}); "
                     "omega_hat assumes a Type-I rate")
    if series[-1].contaminated:
        notes.append("final sample has nodes below the curvature guard; "
                     "torsion integrals omit them")
    return SingularityReport(
        omega_hat=float(omega_hat),
        fit_residual=float(fit_residual),
        t_tail=t_tail,
        Q_tail=q,
        verdict=verdict,
        C_hat=float(series[-1].tau_l1),
        D_hat=float(series[-1].D),
        notes=notes,
    )


def rescale_huisken(curve: DiscreteCurve, t: float, omega_hat: float,
                    center=None) -> DiscreteCurve:
    """Blow-up rescaling ``(gamma - center) / sqrt(2 (omega_hat - t))``.

    ``center`` defaults to the arclength centroid.  The shrinking unit
    circle maps to the unit circle.
    """
    if not t < omega_hat:
        raise InvalidTimeError(f"t={t} is not before omega_hat={omega_hat}")
    if center is None:
        f = frenet(curve)
        center = (f.ds @ curve.points) / f.ds.sum()
    scale = np.sqrt(2.0 * (omega_hat - t))
    return DiscreteCurve((curve.points - np.asarray(center, dtype=float)) / scale)


def final_decade_q_growth(series: TimeSeries, omega_hat: float) -> dict:
    """Trend of ``Q`` over the final decade of curvature growth.

    Uses samples with ``kappa_max >= kappa_max(last) / 10`` (``M`` within a
    factor 100 of the last sample).  Returns ``growth`` (last/first ``Q``),
    ``increasing`` (strict) and the sample count.
    """
    t = series.t
    m = series.M
    mask = (m >= m[-1] / 100.0) & (t < omega_hat)
    q = m[mask] * (omega_hat - t[mask])
    if q.size < 2:
        return {"growth": float("nan"), "increasing": False, "samples": int(q.size)}
    return {
        "growth": float(q[-1] / q[0]),
        "increasing": bool(np.all(np.diff(q) > 0)),
        "samples": int(q.size),
    }


def monotone_trend(values, slack_rel: float = 1e-4) -> str:
    """``"increasing"``, ``"decreasing"``, ``"constant"`` or ``"mixed"``
    between consecutive values, with slack ``slack_rel * |value|``."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return "constant"
    d = np.diff(v)
    tol = slack_rel * np.abs(v[:-1])
    up = np.all(d >= -tol)
    down = np.all(d <= tol)
    if up and down:
        return "constant"
    if up:
        return "increasing"
    if down:
        return "decreasing"
    return "mixed"

"""End-to-end runs: generate, evolve, diagnose, classify, emit."""

from __future__ import annotations

import json
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .diagnostics import (
    SingularityReport,
    classify,
    final_decade_q_growth,
    monotone_trend,
    rescale_huisken,
    tail_mask,
)
from .errors import CSFError, InsufficientDataError, InvalidInputError, NonmonotoneError, StepFailure
from .families import FAMILIES, generate_curve
from .flow import FlowConfig, Scheme, Trajectory, estimate_singularity_time, evolve
from .io import emit_series_csv, emit_snapshot_json, emit_svg_plot

__all__ = ["RunConfig", "RunResult", "run", "sweep", "EMIT_CHOICES", "TYPE_II_PROXY_NOTE"]

EMIT_CHOICES = ("csv", "json", "svg")
PLOTS = ("L", "M", "D", "tau_l1", "Q")
TYPE_II_PROXY_NOTE = (
    "Type-II check is a desk-scale trend proxy: growth of Q = M_t (omega_hat - t) over the "
    "final decade of curvature growth. The singular limit itself is not resolved."
)
HYPOTHESIS_NOTE = (
    "Two hypotheses circulate for the Type-II claim: the curve is not contained in a plane, "
    "or its torsion is positive after the last inflection. They differ; inf_tau in "
    "series.csv shows whether the second holds."
)


@dataclass
class RunConfig:
    """Everything needed to reproduce one run.  Unknown keys are rejected."""

    family: str = "circle"
    params: dict = field(default_factory=dict)
    seed: int = 0
    n: int = 512
    scheme: str = "SemiImplicit"
    dt_safety: float = 0.5
    resample_every: int = 10
    kappa_stop: float | None = None
    length_min: float | None = None
    t_max: float | None = None
    implicit_accuracy: float = 32.0
    snapshot_every: int = 50
    output_dir: str = "run"
    emit: list = field(default_factory=lambda: list(EMIT_CHOICES))

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown family {self.family!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")
        bad = set(self.emit) - set(EMIT_CHOICES)
        if bad:
            raise InvalidInputError(f"unknown emit targets {sorted(bad)}")
        self.emit = [e for e in EMIT_CHOICES if e in set(self.emit)]
        self.flow_config()  # validate early

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)

    def flow_config(self) -> FlowConfig:
        return FlowConfig(
            scheme=Scheme(self.scheme),
            dt_safety=self.dt_safety,
            resample_every=self.resample_every,
            kappa_stop=self.kappa_stop,
            length_min=self.length_min,
            t_max=math.inf if self.t_max is None else self.t_max,
            n=self.n,
            implicit_accuracy=self.implicit_accuracy,
            snapshot_every=self.snapshot_every,
        )


@dataclass
class RunResult:
    exit_code: int
    manifest: dict
    trajectory: Trajectory | None = None
    report: SingularityReport | None = None


def _versions():
    return {"csflab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _clean(obj):
    # strict JSON: non-finite floats become null
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _write_manifest(out: Path, manifest: dict):
    text = json.dumps(_clean(manifest), indent=2, sort_keys=True, allow_nan=False)
    (out / "manifest.json").write_text(text + "\n")


def _summaries(traj: Trajectory, report: SingularityReport | None, omega):
    series = traj.series
    mask = tail_mask(series)
    tail = series.tau_l1[mask] if mask.any() else series.tau_l1[-max(2, len(series) // 5):]
    out = {
        "samples": len(series),
        "steps": traj.steps,
        "t_final": float(series.t[-1]),
        "M_growth": float(series.M[-1] / series.M[0]),
        "tau_l1_tail": {"trend": monotone_trend(tail), "first": float(tail[0]),
                        "last": float(tail[-1])},
        "inf_tau_min": float(np.min(series.inf_tau)),
        "last_inflection_time": series.last_inflection_time,
    }
    if report is not None:
        q = report.Q_tail
        out["Q_tail"] = {"min": float(q.min()), "max": float(q.max()),
                         "increasing": bool(np.all(np.diff(q) > 0)),
                         "growth": float(q[-1] / q[0])}
    if omega is not None:
        proxy = final_decade_q_growth(series, omega)
        proxy["passes"] = bool(proxy["growth"] >= 2.0) or (
            report is not None and report.verdict.value == "TypeII")
        out["type_ii_proxy"] = proxy
    return out


def run(config: RunConfig) -> RunResult:
    """Execute one run and populate ``config.output_dir``.

    Exit code 0 on completion, 2 on a step failure, 3 when the series is
    too short or non-monotone to classify, 1 for other library errors.
    Partial outputs and the manifest are written in every case.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"config": config.to_dict(), "versions": _versions(), "status": "running",
                "stage": "generate", "stop_reason": None, "verdict": None,
                "notes": [TYPE_II_PROXY_NOTE, HYPOTHESIS_NOTE]}
    _write_manifest(out, manifest)
    traj = report = None
    omega = None
    code = 0
    try:
        curve0 = generate_curve(config.family, config.params, config.seed, config.n)
        manifest["stage"] = "evolve"
        try:
            traj = evolve(curve0, config.flow_config())
        except StepFailure as exc:
            traj = exc.trajectory
            raise
        manifest["stop_reason"] = traj.stop_reason.value
        manifest["stage"] = "diagnose"
        omega, resid = estimate_singularity_time(traj.series)
        manifest["omega_hat"] = omega
        manifest["fit_residual"] = resid
        manifest["stage"] = "classify"
        report = classify(traj.series, omega, resid)
        manifest["verdict"] = report.verdict.value
        manifest["report"] = {k: v for k, v in report.to_dict().items()
                              if k not in ("t_tail", "Q_tail")}
        manifest["notes"].extend(report.notes)
        manifest["stage"] = "emit"
    except StepFailure as exc:
        code = 2
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        manifest["stop_reason"] = "StepFailure"
    except (InsufficientDataError, NonmonotoneError) as exc:
        code = 3
        manifest["error"] = f"{type(exc).__name__}: {exc}"
    except CSFError as exc:
        code = 1
        manifest["error"] = f"{type(exc).__name__}: {exc}"

    try:
        if traj is not None and len(traj.series):
            if traj.stop_reason is not None:
                manifest["stop_reason"] = traj.stop_reason.value
            manifest["summary"] = _summaries(traj, report, omega)
            _emit(out, config, traj, report, omega)
    except OSError as exc:
        code = code or 1
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        manifest["failed_stage"] = "emit"
    if code:
        manifest["status"] = "failed"
        manifest.setdefault("failed_stage", manifest["stage"])
    else:
        manifest["status"] = "complete"
        manifest["stage"] = "done"
    _write_manifest(out, manifest)
    return RunResult(code, manifest, traj, report)


def _emit(out, config, traj, report, omega):
    if "csv" in config.emit:
        emit_series_csv(traj.series, out / "series.csv")
    if "json" in config.emit:
        snap = out / "snapshots"
        snap.mkdir(exist_ok=True)
        for k, (t, curve) in enumerate(traj.snapshots):
            emit_snapshot_json(curve, t, snap / f"snapshot_{k:04d}.json")
        if omega is not None and traj.snapshots[-1][0] < omega:
            t, curve = traj.snapshots[-1]
            emit_snapshot_json(rescale_huisken(curve, t, omega), t,
                               snap / "final_rescaled.json", rescaled=True)
    if "svg" in config.emit:
        plots = out / "plots"
        plots.mkdir(exist_ok=True)
        for q in PLOTS:
            if q == "Q" and omega is None:
                continue
            emit_svg_plot(traj.series, q, plots / f"{q}.svg", omega_hat=omega)


def _run_exit(cfg: RunConfig) -> int:
    return run(cfg).exit_code


def sweep(configs, max_workers: int | None = None) -> list[int]:
    """Run independent configs in parallel processes; each must own a
    distinct ``output_dir``.  Returns exit codes in input order."""
    configs = list(configs)
    dirs = [str(Path(c.output_dir).resolve()) for c in configs]
    if len(set(dirs)) != len(dirs):
        raise InvalidInputError("sweep runs must use distinct output directories")
    if max_workers == 1 or len(configs) <= 1:
        return [_run_exit(c) for c in configs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_run_exit, configs))

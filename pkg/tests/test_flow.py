import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csflab import (
    DiscreteCurve,
    FlowConfig,
    Scheme,
    StopReason,
    estimate_singularity_time,
    evolve,
    generate_curve,
    stable_dt,
    step,
    total_length,
)
from csflab import flow as flow_mod
from csflab.curve import resample_uniform
from csflab.diagnostics import Sample, TimeSeries
from csflab.errors import InsufficientDataError, InvalidInputError, NonmonotoneError, StepFailure


def _series(t, m):
    s = TimeSeries()
    for ti, mi in zip(t, m):
        s.append(Sample(t=ti, L=1.0, M=mi, D=1.0, tau_l1=0.0, sup_tau_over_kappa=0.0,
                        inf_tau=0.0, n_inflections=0, rate=0.0))
    return s


@pytest.mark.parametrize("scheme", list(Scheme))
def test_circle_step_follows_exact_law(scheme):
    c = generate_curve("circle", n=256)
    dt = 1e-4 if scheme is Scheme.SEMI_IMPLICIT else 1e-5
    r = np.linalg.norm(step(c, dt, scheme).points, axis=1)
    assert np.max(np.abs(r - np.sqrt(1 - 2 * dt))) < 1e-7


def test_semi_implicit_multi_step_radius():
    c = generate_curve("circle", n=128)
    for _ in range(100):
        c = step(c, 1e-3)
    assert np.allclose(np.linalg.norm(c.points, axis=1), np.sqrt(1 - 0.2), rtol=1e-3)


def test_planar_stays_planar():
    c = generate_curve("fourier_random", {"planar": True}, seed=3, n=128)
    for scheme in Scheme:
        assert np.max(np.abs(step(c, 1e-5, scheme).points[:, 2])) < 1e-12


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32), dt_exp=st.floats(-5, -3))
def test_length_decreases_each_step(seed, dt_exp):
    c = resample_uniform(generate_curve("fourier_random", seed=seed, n=128), 128)
    assert total_length(step(c, 10.0**dt_exp)) < total_length(c)


def test_step_rejects_bad_dt():
    with pytest.raises(InvalidInputError):
        step(generate_curve("circle", n=32), 0.0)


def test_step_failure_on_nonfinite(monkeypatch):
    monkeypatch.setattr(flow_mod, "solve_cyclic_tridiagonal", lambda lo, d, up, b: b * np.nan)
    with pytest.raises(StepFailure, match="non-finite"):
        step(generate_curve("circle", n=32), 1e-3)


def test_step_failure_on_collapsed_spacing(monkeypatch):
    def squash(lo, d, up, b):
        out = b.copy()
        out[1] = out[0] + 1e-15
        return out

    monkeypatch.setattr(flow_mod, "solve_cyclic_tridiagonal", squash)
    with pytest.raises(StepFailure, match="spacing"):
        step(generate_curve("circle", n=32), 1e-3)


def test_stable_dt_rk4_formula():
    c = generate_curve("circle", n=256)
    dt = stable_dt(c, FlowConfig(scheme=Scheme.EXPLICIT_RK4, dt_safety=0.5))
    assert dt == pytest.approx(0.5 * (2 * np.pi / 256) ** 2 / 4, rel=1e-4)
    assert dt == pytest.approx(7.5e-5, rel=0.01)


def test_stable_dt_semi_implicit_linear_in_h():
    cfg = FlowConfig()
    a = stable_dt(generate_curve("circle", n=128), cfg)
    b = stable_dt(generate_curve("circle", n=256), cfg)
    assert a / b == pytest.approx(2.0, rel=1e-3)


def test_stable_dt_positive_on_degenerate_mesh():
    c = generate_curve("circle", n=64)
    pts = c.points.copy()
    pts[1] = pts[0] + 1e-9 * (pts[1] - pts[0])
    for scheme in Scheme:
        assert stable_dt(DiscreteCurve(pts), FlowConfig(scheme=scheme, dt_safety=1.0)) > 0


@pytest.mark.parametrize("kw", [{"dt_safety": 0.0}, {"dt_safety": 1.5}, {"resample_every": 0},
                                {"kappa_stop": -1.0}, {"n": 8}, {"t_max": 0.0}])
def test_flow_config_validation(kw):
    with pytest.raises(InvalidInputError):
        FlowConfig(**kw)


def test_circle_evolution(circle_run):
    assert circle_run.stop_reason is StopReason.CURVATURE_BLOWUP
    assert abs(circle_run.series.t[-1] - 0.5) < 0.005
    omega, _ = estimate_singularity_time(circle_run.series)
    assert abs(omega - 0.5) < 0.005


def test_circle_radius_along_run(circle_run):
    for t, c in circle_run.snapshots[::5]:
        r2 = np.einsum("ij,ij->i", c.points, c.points)
        assert np.max(np.abs(r2 - (1 - 2 * t))) < 5e-4


def test_trajectory_invariants(circle_run, ellipse_run):
    for traj in (circle_run, ellipse_run):
        assert np.all(np.diff(traj.series.t) > 0)
        assert np.all(np.diff(traj.times) > 0)
        assert np.all(np.diff(traj.series.L) < 0)
        assert traj.snapshots[0][0] == 0.0
        assert traj.snapshots[-1][0] == traj.series.t[-1]
        assert all(c.n == traj.config.n for _, c in traj.snapshots)


def test_ellipse_blows_up_with_decreasing_length(ellipse_run):
    assert ellipse_run.stop_reason is StopReason.CURVATURE_BLOWUP
    # Gage-Hamilton: convex planar curves round out; sup kappa * L -> 2 pi
    assert ellipse_run.series.D[-1] == pytest.approx(2 * np.pi, rel=0.05)


def test_time_cap():
    traj = evolve(generate_curve("circle", {"r": 10.0}, n=64), FlowConfig(n=64, t_max=1e-6))
    assert traj.stop_reason is StopReason.TIME_CAP
    assert traj.steps >= 1
    assert traj.series.t[-1] == pytest.approx(1e-6)


def test_length_floor():
    traj = evolve(generate_curve("circle", n=64), FlowConfig(n=64, length_min=5.0))
    assert traj.stop_reason is StopReason.LENGTH_FLOOR


def test_step_failure_keeps_partial_trajectory(monkeypatch):
    calls = {"n": 0}
    real = flow_mod.step

    def flaky(curve, dt, scheme):
        calls["n"] += 1
        if calls["n"] > 25:
            raise StepFailure("injected")
        return real(curve, dt, scheme)

    monkeypatch.setattr(flow_mod, "step", flaky)
    with pytest.raises(StepFailure) as info:
        evolve(generate_curve("circle", n=64), FlowConfig(n=64))
    traj = info.value.trajectory
    assert traj.stop_reason is StopReason.STEP_FAILURE
    assert len(traj.series) == 3


def test_custom_recorder():
    class Counter:
        def __init__(self):
            self.series = TimeSeries()
            self.calls = 0

        def record(self, t, curve):
            from csflab import sample
            self.calls += 1
            rec = sample(curve, t)
            self.series.append(rec)
            return rec

    rec = Counter()
    traj = evolve(generate_curve("circle", n=64), FlowConfig(n=64, t_max=0.01), rec)
    assert rec.calls == len(traj.series)


def test_estimate_exact_line():
    t = np.linspace(0, 0.4, 30)
    omega, resid = estimate_singularity_time(_series(t, 1 / (1 - 2 * t)))
    assert omega == pytest.approx(0.5, abs=1e-12)
    assert resid < 1e-14


def test_estimate_flags_type_ii_rate(circle_run):
    t = np.linspace(0, 0.45, 60)
    _, resid = estimate_singularity_time(_series(t, (0.5 - t) ** -2.0))
    _, circle_resid = estimate_singularity_time(circle_run.series)
    assert resid > 10 * circle_resid


def test_estimate_errors():
    with pytest.raises(InsufficientDataError):
        estimate_singularity_time(_series(np.arange(5) * 0.1, np.arange(1, 6)))
    t = np.linspace(0, 1, 20)
    with pytest.raises(NonmonotoneError):
        estimate_singularity_time(_series(t, 2 + np.cos(8 * t)))


def test_estimate_beyond_last_sample():
    t = np.linspace(0, 0.49, 40)
    omega, _ = estimate_singularity_time(_series(t, 1 / (0.5 - t) ** 1.5))
    assert omega > t[-1]

"""The positive-torsion regime on the toroidal coil.

The coil starts with torsion bounded away from zero.  Its torsion stays
positive until a near-inflection event, where ``sup |tau| / kappa`` spikes
and the torsion changes sign.  Before that event ``tau_l1`` grows at the
rate ``int kappa^2 |tau| ds``.
"""

import numpy as np

RESOLVED = 1e3  # sup |tau| / kappa below this: torsion well resolved in time


def _regime(series):
    ratio = series.sup_tau_over_kappa
    positive = series.inf_tau > 0
    ok = positive & (ratio < RESOLVED)
    return np.flatnonzero(np.cumsum(~ok) == 0)


def _central(series, values, idx):
    t = series.t
    idx = idx[(idx > 0) & (idx < idx[-1])]
    return idx, (values[idx + 1] - values[idx - 1]) / (t[idx + 1] - t[idx - 1])


def test_coil_starts_positive(coil_run):
    s = coil_run.series
    assert s.inf_tau[0] > 0.5
    assert len(_regime(s)) > 50


def test_rate_identity_until_event(coil_run):
    s = coil_run.series
    idx, fd = _central(s, s.tau_l1, _regime(s))
    rate_abs = np.array([r.rate_abs for r in s.records])[idx]
    assert np.all(rate_abs > 0)
    assert np.max(np.abs(fd - rate_abs) / rate_abs) < 0.05


def test_signed_identity_until_event(coil_run):
    s = coil_run.series
    signed = np.array([r.tau_signed for r in s.records])
    idx, fd = _central(s, signed, _regime(s))
    assert np.max(np.abs(fd - s.rate[idx]) / np.abs(s.rate[idx])) < 0.05


def test_tau_l1_nondecreasing_until_event(coil_run):
    a = coil_run.series.tau_l1[_regime(coil_run.series)]
    assert np.all(np.diff(a) >= -1e-4 * a[:-1])
    assert a[-1] > 1.2 * a[0]


def test_event_ends_positivity(coil_run):
    s = coil_run.series
    end = _regime(s)[-1]
    assert np.any(s.inf_tau[end:] < 0)
    assert np.max(s.sup_tau_over_kappa[end:]) > 1e4

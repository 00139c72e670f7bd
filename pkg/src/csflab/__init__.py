"""Curve shortening flow of closed space curves: discrete Frenet geometry,
semi-implicit evolution to near-singularity, torsion diagnostics,
singularity classification and Abresch-Langer reference shrinkers."""

__version__ = "0.1.0"

from .curve import (  # noqa: E402
    DiscreteCurve,
    FrenetField,
    frenet,
    inflection_points,
    periodic_diff,
    resample_uniform,
    speed,
    total_length,
)
from .diagnostics import (  # noqa: E402
    SingularityReport,
    TimeSeries,
    Verdict,
    classify,
    l1_torsion_rate,
    max_principle_probe,
    rescale_huisken,
    sample,
    speed_evolution_residual,
    torsion_evolution_residual,
    torsion_evolution_rhs,
)
from .errors import *  # noqa: E402,F401,F403
from .families import FAMILIES, generate_curve  # noqa: E402
from .flow import (  # noqa: E402
    FlowConfig,
    Scheme,
    StopReason,
    Trajectory,
    estimate_singularity_time,
    evolve,
    probe_window,
    stable_dt,
    step,
)
from .io import (  # noqa: E402
    emit_series_csv,
    emit_snapshot_json,
    emit_svg_plot,
    read_series_csv,
    read_snapshot_json,
)
from .shrinkers import ALProfile, shoot_closed, verify_shrinker  # noqa: E402
from .run import RunConfig, run, sweep  # noqa: E402

"""Torsion functionals along the flow.

Two space curves: the tilted saddle (mixed-sign torsion) and the toroidal
coil (positive torsion until a near-inflection event).
"""

import numpy as np

from csflab import (
    FlowConfig,
    evolve,
    generate_curve,
    max_principle_probe,
    probe_window,
    speed_evolution_residual,
    stable_dt,
    torsion_evolution_residual,
)

saddle = evolve(generate_curve("perturbed_circle", n=256), FlowConfig(n=256, t_max=0.2))
s = saddle.series
print("saddle: tau_l1", s.tau_l1[0], "->", s.tau_l1[-1], " min inf tau", s.inf_tau.min())

coil = evolve(generate_curve("torus_knot", n=256), FlowConfig(n=256, t_max=0.1))
s = coil.series
t, a = s.t, s.tau_l1
fd = np.gradient(a, t)
rate_abs = np.array([r.rate_abs for r in s.records])
for k in range(0, 60, 10):
    print(f"coil t={t[k]:.4f}  tau_l1={a[k]:.4f}  d/dt={fd[k]:.4f}  "
          f"int k^2|tau|={rate_abs[k]:.4f}  inf tau={s.inf_tau[k]:.3f}")

# Evolution formulas checked on a three-state window at fixed parametrization.
c = coil.snapshots[0][1]
w = probe_window(c, stable_dt(c, coil.config))
print("speed residual", speed_evolution_residual(w).relative)
print("torsion residual", torsion_evolution_residual(w).relative)

rep = max_principle_probe(coil)
print("probe statuses", {k: rep.status.count(k) for k in set(rep.status)})

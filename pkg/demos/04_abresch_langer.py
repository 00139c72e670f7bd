"""Abresch-Langer shrinkers by shooting on the curvature profile."""

from csflab import shoot_closed, verify_shrinker
from csflab.shrinkers import ADMISSIBLE_WINDOW, integrate_profile, turning_per_oscillation

print("admissible p/q window", ADMISSIBLE_WINDOW)
for kmax in (1.01, 1.5, 2.0, 4.0):
    prof = integrate_profile(kmax)
    print(f"kappa_max={kmax:<5} period {prof.period:.5f}  kappa_min {prof.kappa_min:.5f}  "
          f"turning/oscillation {turning_per_oscillation(kmax):.5f}")

al = shoot_closed(2, 3, n=512)
print("(2,3) kappa_max", al.kappa_max, " closure", al.closure_error,
      " sup kappa*L", al.sup_kappa_length)
for dt in (1e-4, 1e-5):
    print(f"dt={dt:g}  deviation {verify_shrinker(al, dt):.3e}  "
          f"normal part {verify_shrinker(al, dt, normal_only=True):.3e}")

"""Discrete Frenet geometry of sampled space curves."""

import numpy as np

from csflab import frenet, generate_curve, resample_uniform

# A circle in the plane: curvature 1, no torsion.
circle = generate_curve("circle", n=256)
f = frenet(circle)
print("circle   kappa range", f.kappa.min(), f.kappa.max(), " max|tau|", np.abs(f.tau).max())

# Lift the circle out of the plane with a third harmonic.
saddle = generate_curve("perturbed_circle", {"amp": 0.2, "freq": 3}, n=512)
f = frenet(saddle)
print("saddle   length", f.length, " tau in", (f.tau.min(), f.tau.max()))

# The toroidal coil winds around a torus five times; its torsion never vanishes.
coil = generate_curve("torus_knot", n=512)
f = frenet(coil)
print("coil     tau in", (f.tau.min(), f.tau.max()))

# Frenet data are invariant under rigid motions and scale like 1/length.
g = frenet(coil.transformed(scale=3.0, shift=np.array([1.0, -2.0, 0.5])))
print("scaled   max kappa ratio", f.kappa.max() / g.kappa.max())

# An ellipse sampled uniformly in angle, then resampled uniformly in arclength.
ellipse = generate_curve("ellipse", {"a": 2.0, "b": 1.0}, n=256)
print("ellipse  speed spread before", np.ptp(frenet(ellipse).v))
print("ellipse  speed spread after ", np.ptp(frenet(resample_uniform(ellipse, 256)).v))

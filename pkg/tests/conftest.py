"""Shared oracles and cached trajectories."""

import time

import numpy as np
import pytest
import sympy as sp

from csflab import FlowConfig, evolve, generate_curve
from csflab.curve import DiscreteCurve

U = sp.symbols("u", real=True)

# Analytic test curves given as sympy expressions in u on [0, 2 pi).
SYMBOLIC_CURVES = {
    "tilted_saddle": [sp.cos(U), sp.sin(U), sp.Rational(1, 4) * sp.sin(2 * U)],
    "trefoil": [sp.sin(U) + 2 * sp.sin(2 * U), sp.cos(U) - 2 * sp.cos(2 * U), -sp.sin(3 * U)],
}


class FrenetOracle:
    """Exact speed, curvature and torsion from sympy."""

    def __init__(self, expr):
        g = sp.Matrix(expr)
        g1 = g.diff(U)
        g2 = g1.diff(U)
        g3 = g2.diff(U)
        c = g1.cross(g2)
        v = sp.sqrt(g1.dot(g1))
        kappa = sp.sqrt(c.dot(c)) / v**3
        tau = sp.Matrix.hstack(g1, g2, g3).det() / c.dot(c)
        self._g = sp.lambdify(U, list(g), "numpy")
        self.v = sp.lambdify(U, v, "numpy")
        self.kappa = sp.lambdify(U, kappa, "numpy")
        self.tau = sp.lambdify(U, tau, "numpy")

    def curve(self, n):
        u = 2 * np.pi * np.arange(n) / n
        return DiscreteCurve(np.array([np.broadcast_to(c, u.shape) for c in self._g(u)]).T), u


@pytest.fixture(scope="session")
def oracles():
    return {k: FrenetOracle(e) for k, e in SYMBOLIC_CURVES.items()}


def _run(family, params=None, **kw):
    cfg = FlowConfig(**kw)
    start = time.perf_counter()
    traj = evolve(generate_curve(family, params or {}, n=cfg.n), cfg)
    traj.wall_time = time.perf_counter() - start
    return traj


@pytest.fixture(scope="session")
def circle_run():
    """Unit circle to kappa = 100 at N = 512."""
    return _run("circle", n=512, kappa_stop=100.0)


@pytest.fixture(scope="session")
def perturbed_run():
    """(cos u, sin u, 0.2 sin 3u) at N = 512 with default stopping."""
    return _run("perturbed_circle", {"amp": 0.2, "freq": 3}, n=512)


@pytest.fixture(scope="session")
def coil_run():
    """Positive-torsion toroidal coil, stopped shortly after its torsion
    first loses sign."""
    return _run("torus_knot", n=512, t_max=0.1)


@pytest.fixture(scope="session")
def ellipse_run():
    return _run("ellipse", {"a": 2.0, "b": 1.0}, n=256)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

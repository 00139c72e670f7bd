"""Initial curve families."""

from __future__ import annotations

import numpy as np

from .curve import DiscreteCurve, frenet
from .errors import InvalidInputError, InvalidParamsError

__all__ = ["FAMILIES", "DEFAULT_PARAMS", "generate_curve"]

DEFAULT_PARAMS = {
    "circle": {"r": 1.0},
    "ellipse": {"a": 2.0, "b": 1.0},
    "fourier_random": {"modes": 5, "amp": 0.3, "planar": False,
                       "positive_curvature": False, "max_tries": 100},
    "perturbed_circle": {"amp": 0.2, "freq": 3, "r": 1.0},
    # twist=+1 gives positive torsion for the (1, q) toroidal coil
    "torus_knot": {"R": 1.0, "r": 0.2, "p": 1, "q": 5, "twist": 1},
    "al_profile": {"p": 2, "q": 3},
}
FAMILIES = tuple(DEFAULT_PARAMS)


def _params(family, params):
    if family not in DEFAULT_PARAMS:
        raise InvalidParamsError(f"unknown family {family!r}; expected one of {FAMILIES}")
    merged = dict(DEFAULT_PARAMS[family])
    unknown = set(params or {}) - set(merged)
    if unknown:
        raise InvalidParamsError(f"unknown parameters for {family}: {sorted(unknown)}")
    merged.update(params or {})
    return merged


def _fourier(p, rng, u):
    cap = int(p["modes"])
    if cap < 2:
        raise InvalidParamsError("fourier_random needs modes >= 2")
    pts = np.c_[np.cos(u), np.sin(u), np.zeros_like(u)]
    ndim = 2 if p["planar"] else 3
    for m in range(2, cap + 1):
        coef = rng.standard_normal((2, ndim)) * p["amp"] / m**2
        pts[:, :ndim] += np.outer(np.cos(m * u), coef[0]) + np.outer(np.sin(m * u), coef[1])
    return pts


def generate_curve(family: str, params: dict | None = None, seed: int = 0,
                   n: int = 512) -> DiscreteCurve:
    """Sample an initial curve; deterministic in ``(family, params, seed, n)``.

    Raises
    ------
    InvalidParamsError
        For unknown families or keys and out-of-range values.
    """
    p = _params(family, params)
    if n < 16:
        raise InvalidParamsError("n must be >= 16")
    u = 2.0 * np.pi * np.arange(n) / n
    try:
        if family == "circle":
            if not p["r"] > 0:
                raise InvalidParamsError("r must be positive")
            pts = np.c_[p["r"] * np.cos(u), p["r"] * np.sin(u), np.zeros(n)]
        elif family == "ellipse":
            if not (p["a"] > 0 and p["b"] > 0):
                raise InvalidParamsError("axes must be positive")
            pts = np.c_[p["a"] * np.cos(u), p["b"] * np.sin(u), np.zeros(n)]
        elif family == "perturbed_circle":
            if int(p["freq"]) != p["freq"]:
                raise InvalidParamsError("freq must be an integer")
            r = p["r"]
            pts = np.c_[r * np.cos(u), r * np.sin(u), p["amp"] * np.sin(int(p["freq"]) * u)]
        elif family == "torus_knot":
            big, small = p["R"], p["r"]
            pk, qk = int(p["p"]), int(p["q"])
            if not big > small > 0 or pk < 1 or qk < 1 or p["twist"] not in (1, -1):
                raise InvalidParamsError("torus_knot needs R > r > 0, p, q >= 1, twist = +-1")
            rad = big + small * np.cos(qk * u)
            pts = np.c_[rad * np.cos(pk * u), rad * np.sin(pk * u),
                        -p["twist"] * small * np.sin(qk * u)]
        elif family == "al_profile":
            from .shrinkers import shoot_closed

            return shoot_closed(int(p["p"]), int(p["q"]), n=n).curve
        else:  # fourier_random
            rng = np.random.Generator(np.random.PCG64(int(seed)))
            for _ in range(int(p["max_tries"])):
                pts = _fourier(p, rng, u)
                if not p["positive_curvature"]:
                    break
                try:
                    f = frenet(DiscreteCurve(pts))
                except Exception:
                    continue
                if f.kappa.min() > 1e-3 * 2 * np.pi / f.length:
                    break
            else:
                raise InvalidParamsError("no inflection-free sample within max_tries")
        return DiscreteCurve(pts)
    except InvalidInputError as exc:
        raise InvalidParamsError(str(exc)) from exc

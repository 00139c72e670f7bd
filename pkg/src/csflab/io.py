"""Series CSV, curve snapshot JSON and SVG plots.

Floats are written with 17 significant digits, which round-trips every
64-bit value exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .curve import DiscreteCurve
from .diagnostics import SERIES_COLUMNS, Sample, TimeSeries
from .errors import InvalidInputError, UnknownQuantityError

__all__ = [
    "fmt",
    "emit_series_csv",
    "read_series_csv",
    "emit_snapshot_json",
    "read_snapshot_json",
    "emit_svg_plot",
    "read_svg_polyline",
    "PLOT_QUANTITIES",
]

CSV_HEADER = ",".join(SERIES_COLUMNS)
PLOT_QUANTITIES = SERIES_COLUMNS[1:] + ("Q",)
_LOG_QUANTITIES = {"M", "rate"}


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInputError(f"cannot serialize non-finite value {x}")
    return "%.17g" % x


def emit_series_csv(series: TimeSeries, path) -> Path:
    if len(series) == 0:
        raise InvalidInputError("series is empty")
    path = Path(path)
    lines = [CSV_HEADER]
    for rec in series.records:
        lines.append(",".join(fmt(v) for v in rec.row()))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_series_csv(path) -> TimeSeries:
    series = TimeSeries()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SERIES_COLUMNS:
            raise InvalidInputError(f"unexpected CSV header {header}")
        for row in reader:
            vals = dict(zip(SERIES_COLUMNS, row))
            kw = {k: float(v) for k, v in vals.items()}
            kw["n_inflections"] = int(vals["n_inflections"])
            series.append(Sample(**kw))
    return series


def _json_value(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_snapshot_json(curve: DiscreteCurve, t: float, path, rescaled: bool = False,
                       profile: dict | None = None) -> Path:
    """Write ``{"t", "n", "closed", "points"}``; ``rescaled`` and a
    ``profile`` metadata block are added when given."""
    doc = {"t": float(t), "n": curve.n, "closed": True}
    if rescaled:
        doc["rescaled"] = True
    if profile is not None:
        doc["profile"] = profile
    body = _json_value(doc)[:-1]
    rows = ",\n    ".join("[" + ", ".join(fmt(c) for c in p) + "]" for p in curve.points)
    text = body + ',\n  "points": [\n    ' + rows + "\n  ]\n}\n"
    path = Path(path)
    path.write_text(text)
    return path


def read_snapshot_json(path):
    """Return ``(t, curve, doc)``."""
    doc = json.loads(Path(path).read_text())
    if not doc.get("closed", False):
        raise InvalidInputError("only closed curves are supported")
    pts = np.array(doc["points"], dtype=np.float64)
    if pts.shape != (doc["n"], 3):
        raise InvalidInputError("point array does not match n")
    return float(doc["t"]), DiscreteCurve(pts), doc


_W, _H, _PAD = 640, 400, 60


def _plot_values(series, quantity, omega_hat):
    t = series.t
    if quantity == "Q":
        if omega_hat is None:
            raise InvalidInputError("quantity Q needs omega_hat")
        keep = t < omega_hat
        return t[keep], series.M[keep] * (omega_hat - t[keep])
    if quantity not in SERIES_COLUMNS or quantity == "t":
        raise UnknownQuantityError(quantity)
    return t, series.column(quantity).astype(float)


def emit_svg_plot(series: TimeSeries, quantity: str, path, omega_hat: float | None = None) -> Path:
    """Standalone SVG line plot of ``quantity`` against ``t``.

    ``M`` and ``rate`` use a log10 axis (``rate`` as ``|rate|``).
    """
    if quantity not in PLOT_QUANTITIES:
        raise UnknownQuantityError(quantity)
    x, y = _plot_values(series, quantity, omega_hat)
    log = quantity in _LOG_QUANTITIES
    label = quantity
    if log:
        y = np.log10(np.maximum(np.abs(y), 1e-300))
        label = f"log10 |{quantity}|" if quantity == "rate" else f"log10 {quantity}"
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    xs = (x1 - x0) or 1.0
    ys = (y1 - y0) or 1.0
    px = _PAD + (x - x0) / xs * (_W - 2 * _PAD)
    if y1 > y0:
        py = _H - _PAD - (y - y0) / ys * (_H - 2 * _PAD)
    else:
        py = np.full_like(y, _H / 2)
    pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">\n'
        f'  <rect width="{_W}" height="{_H}" fill="white"/>\n'
        f'  <line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" stroke="black"/>\n'
        f'  <line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" stroke="black"/>\n'
        f'  <text x="{_W / 2}" y="{_H - 15}" text-anchor="middle" font-size="14">t</text>\n'
        f'  <text x="15" y="{_H / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 15 {_H / 2})">{label}</text>\n'
        f'  <text x="{_PAD}" y="{_H - _PAD + 18}" font-size="11">{x0:.6g}</text>\n'
        f'  <text x="{_W - _PAD}" y="{_H - _PAD + 18}" text-anchor="end" font-size="11">{x1:.6g}</text>\n'
        f'  <text x="{_PAD - 5}" y="{_H - _PAD}" text-anchor="end" font-size="11">{y0:.6g}</text>\n'
        f'  <text x="{_PAD - 5}" y="{_PAD}" text-anchor="end" font-size="11">{y1:.6g}</text>\n'
        f'  <polyline fill="none" stroke="steelblue" stroke-width="1.5" '
        f'data-quantity="{quantity}" data-log="{int(log)}" '
        f'data-xmin="{fmt(x0)}" data-xmax="{fmt(x1)}" data-ymin="{fmt(y0)}" data-ymax="{fmt(y1)}" '
        f'points="{pts}"/>\n'
        "</svg>\n"
    )
    path = Path(path)
    path.write_text(svg)
    return path


def read_svg_polyline(path):
    """Recover ``(x, y)`` data coordinates (y on the plotted, possibly log,
    scale) from a plot written by :func:`emit_svg_plot`."""
    import xml.etree.ElementTree as ET

    root = ET.parse(path).getroot()
    line = next(el for el in root.iter() if el.tag.endswith("polyline"))
    px, py = np.array([tuple(map(float, p.split(","))) for p in line.get("points").split()]).T
    x0, x1 = float(line.get("data-xmin")), float(line.get("data-xmax"))
    y0, y1 = float(line.get("data-ymin")), float(line.get("data-ymax"))
    x = x0 + (px - _PAD) / (_W - 2 * _PAD) * ((x1 - x0) or 1.0)
    if y1 > y0:
        y = y0 + (_H - _PAD - py) / (_H - 2 * _PAD) * (y1 - y0)
    else:
        y = np.full_like(py, y0)
    return x, y

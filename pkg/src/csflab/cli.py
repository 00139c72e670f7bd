"""Command-line driver.

Subcommands: generate, evolve, diagnose, classify, rescale, al, sweep, plot.
Run flags mirror :class:`csflab.run.RunConfig`; ``--config FILE`` loads a
JSON config and explicit flags override it.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from .curve import frenet
from .diagnostics import classify, rescale_huisken, sample
from .errors import CSFError
from .families import FAMILIES, generate_curve
from .flow import Scheme, estimate_singularity_time
from .io import (
    PLOT_QUANTITIES,
    emit_snapshot_json,
    emit_svg_plot,
    read_series_csv,
    read_snapshot_json,
)
from .run import EMIT_CHOICES, RunConfig, run, sweep
from .shrinkers import shoot_closed, verify_shrinker


def _param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        value = json.loads(value)
    except json.JSONDecodeError:
        pass
    return key, value


def _emit_list(text):
    items = [s for s in text.split(",") if s]
    bad = set(items) - set(EMIT_CHOICES)
    if bad:
        raise argparse.ArgumentTypeError(f"unknown emit targets {sorted(bad)}")
    return items


def _add_curve_args(p):
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--param", action="append", type=_param, default=None,
                   metavar="KEY=VALUE", help="family parameter; repeatable")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)


def _add_run_args(p):
    p.add_argument("--config", type=Path, help="JSON RunConfig document")
    _add_curve_args(p)
    p.add_argument("--scheme", choices=[s.value for s in Scheme])
    p.add_argument("--dt-safety", type=float)
    p.add_argument("--resample-every", type=int)
    p.add_argument("--kappa-stop", type=float)
    p.add_argument("--length-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--implicit-accuracy", type=float)
    p.add_argument("--snapshot-every", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--emit", type=_emit_list, help="comma list from csv,json,svg")


def _run_config(args) -> RunConfig:
    data = json.loads(args.config.read_text()) if getattr(args, "config", None) else {}
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if f.name == "params":
            if args.param:
                data["params"] = {**data.get("params", {}), **dict(args.param)}
        elif val is not None:
            data[f.name] = val
    return RunConfig.from_dict(data)


def _print(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_generate(args):
    cfg = _run_config(args)
    curve = generate_curve(cfg.family, cfg.params, cfg.seed, cfg.n)
    emit_snapshot_json(curve, 0.0, args.out)
    return 0


def cmd_evolve(args):
    result = run(_run_config(args))
    m = result.manifest
    _print({k: m.get(k) for k in ("status", "stop_reason", "verdict", "omega_hat", "error")
            if k in m})
    return result.exit_code


def cmd_diagnose(args):
    t, curve, _ = read_snapshot_json(args.snapshot)
    rec = sample(curve, t, frenet(curve))
    _print({k: getattr(rec, k) for k in rec.__dataclass_fields__})
    return 0


def cmd_classify(args):
    series = read_series_csv(args.series)
    omega, resid = estimate_singularity_time(series)
    report = classify(series, omega, resid)
    _print(report.to_dict())
    return 0


def cmd_rescale(args):
    t, curve, _ = read_snapshot_json(args.snapshot)
    emit_snapshot_json(rescale_huisken(curve, t, args.omega), t, args.out, rescaled=True)
    return 0


def cmd_al(args):
    prof = shoot_closed(args.p, args.q, tol=args.tol, n=args.n)
    meta = prof.metadata()
    if args.verify_dt:
        meta["verify_deviation"] = verify_shrinker(prof, args.verify_dt)
    emit_snapshot_json(prof.curve, 0.0, args.out, profile=meta)
    _print(meta)
    return 0


def cmd_sweep(args):
    configs = [RunConfig.from_json(p) for p in args.configs]
    codes = sweep(configs, max_workers=args.workers)
    _print({str(p): c for p, c in zip(args.configs, codes)})
    return max(codes, default=0)


def cmd_plot(args):
    series = read_series_csv(args.series)
    omega = args.omega
    if args.quantity == "Q" and omega is None:
        omega, _ = estimate_singularity_time(series)
    emit_svg_plot(series, args.quantity, args.out, omega_hat=omega)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csflab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an initial curve snapshot")
    p.add_argument("--config", type=Path)
    _add_curve_args(p)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evolve", help="full run into an output directory")
    _add_run_args(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("diagnose", help="functionals of one snapshot")
    p.add_argument("snapshot", type=Path)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("classify", help="estimate omega and classify a series.csv")
    p.add_argument("series", type=Path)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("rescale", help="blow-up rescaling of a snapshot")
    p.add_argument("snapshot", type=Path)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_rescale)

    p = sub.add_parser("al", help="shoot a closed Abresch-Langer profile")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--verify-dt", type=float, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_al)

    p = sub.add_parser("sweep", help="run several JSON configs in parallel")
    p.add_argument("configs", type=Path, nargs="+")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG plot of one series column or Q")
    p.add_argument("series", type=Path)
    p.add_argument("quantity", choices=PLOT_QUANTITIES)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CSFError, OSError, json.JSONDecodeError) as exc:
        print(f"csflab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

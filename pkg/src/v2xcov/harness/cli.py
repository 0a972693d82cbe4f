"""Command line entry point: ``v2xcov coverage | sweep | validate``."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .. import __version__
from .._accel import backend_name
from ..analytic import coverage
from ..channel import db_to_linear
from ..config import RoadCase, VehicleModel
from ..errors import NumericalError, ParameterError
from ..montecarlo import estimate_coverage
from .configfile import load_config
from .output import emit_csv, emit_metadata, emit_svg
from .sweep import PRESETS, SweepError, run_sweep
from .validate import oracle_grid


def _common(p):
    p.add_argument("config", nargs="?", help="flat key: value config file (dBm / dB / degrees)")
    p.add_argument("--preset", choices=sorted(PRESETS), default="table2")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")


def _cmd_coverage(args) -> int:
    config, _ = load_config(args.config, args.preset)
    changes = {}
    if args.threshold_db is not None:
        changes["threshold"] = db_to_linear(args.threshold_db)
    if args.r0 is not None:
        changes["serving_distance"] = args.r0
    if args.frequency is not None:
        changes["frequency"] = args.frequency
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    config = config.replace(**changes)
    res = coverage(config, args.model, args.road_case)
    print(f"model={args.model} frequency={config.frequency.value} road_case={args.road_case} "
          f"r0={config.serving_distance:g} s={res.s:.6g}")
    print(f"p_cov={res.p_cov:.8f} p_out={res.p_out:.8f} (quadrature error <= {res.error:.2e})")
    print(f"factors: noise={res.noise_factor:.8f} los={res.los_factor:.8f} nlos={res.nlos_factor:.8f}")
    if args.mc_trials:
        est = estimate_coverage(config, args.model, args.road_case, args.mc_trials)
        lo, hi = est.wilson_interval()
        print(f"monte carlo: p_cov={est.p_hat:.6f} +/- {est.ci99_half_width:.2e} (99% Wald), "
              f"Wilson [{lo:.6f}, {hi:.6f}], trials={est.trials}")
    return 0


def _cmd_sweep(args) -> int:
    config, sweep = load_config(args.config, args.preset)
    if args.mc_trials is not None:
        sweep = sweep.with_trials(args.mc_trials)
    t0 = time.perf_counter()
    curve = run_sweep(config, sweep, seed=args.seed, workers=args.workers)
    dt = time.perf_counter() - t0
    if args.out_csv:
        emit_csv(curve, args.out_csv)
        emit_metadata(curve, Path(args.out_csv).with_suffix(".meta.json"))
    if args.out_svg:
        emit_svg(curve, args.out_svg)
    if not args.out_csv and not args.out_svg:
        from .output import curve_to_csv
        sys.stdout.write(curve_to_csv(curve))
    print(f"{len(curve.points)} points, {len(sweep.series)} series in {dt:.1f} s", file=sys.stderr)
    return 0


def _cmd_validate(args) -> int:
    config, _ = load_config(args.config, args.preset)
    seed = 2024 if args.seed is None else args.seed
    cells = oracle_grid(config, args.trials, seed)
    for c in cells:
        lo, hi = c.estimate.wilson_interval()
        print(f"{'PASS' if c.agrees else 'FAIL'} {c.label():<36} analytic={c.p_cov:.6f} "
              f"mc={c.estimate.p_hat:.6f} [{lo:.6f}, {hi:.6f}]")
    n_ok = sum(c.agrees for c in cells)
    ok = n_ok >= args.min_pass
    print(f"{'PASS' if ok else 'FAIL'}: {n_ok}/{len(cells)} cells agree (need {args.min_pass})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="v2xcov", description="Urban V2X downlink coverage / outage.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({backend_name()})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coverage", help="evaluate one configuration")
    _common(p)
    p.add_argument("--model", choices=[m.value for m in VehicleModel], default="PCP")
    p.add_argument("--road-case", choices=[c.value for c in RoadCase], default="Both")
    p.add_argument("--frequency", choices=["mmwave", "sub6"], default=None)
    p.add_argument("--threshold-db", type=float, default=None)
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--mc-trials", type=int, default=0)
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("sweep", help="outage curves as CSV / SVG")
    _common(p)
    p.add_argument("--mc-trials", type=int, default=None)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-svg", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="analytic vs Monte Carlo agreement grid")
    _common(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--min-pass", type=int, default=33)
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, NumericalError, SweepError, OSError) as exc:
        print(f"v2xcov: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

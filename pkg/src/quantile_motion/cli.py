"""Command-line entry point.

    quantile-motion simulate harmonic --output out/
    quantile-motion simulate custom --model free --param a=1.0 --x-min -30 --x-max 30
    quantile-motion compare out/quantile.csv out/bohm.csv --threshold 0.05
    quantile-motion ingest density.csv --quantiles 0.25,0.5,0.75 --output out/
    quantile-motion presets list

Exit status: 0 all checks passed, 2 invalid input or configuration,
3 a deviation/drift check failed, 4 the Bohm reference run aborted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .density import MASS_TOLERANCE, ingest_series
from .errors import AbortedTrajectoryError, QuantileMotionError
from .experiment import (DRIFT_TOLERANCE, ComparisonReport, RunConfig, compare_many,
                         run_experiment, run_ingested, write_outputs)
from .presets import PRESETS
from .trajectory import read_trajectories
from .wavefunctions import MODEL_KINDS, make_model

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CHECK_FAILED = 3
EXIT_ABORTED = 4


def _quantile_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x or x,y, got {text!r}")


def _param(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r} needs a number, got {value!r}")


def _add_trajectory_options(p):
    p.add_argument("--quantiles", type=_quantile_list, help="comma-separated P values in (0,1)")
    p.add_argument("--x0", type=_point, nargs="+", help="start points, 'x' or 'x,y' each")
    p.add_argument("--output", type=Path, help="output directory")
    p.add_argument("--format", choices=("long", "split"), default="long",
                   help="one CSV for all trajectories, or one per trajectory")
    p.add_argument("--method", choices=("quadratic", "linear"), default="quadratic",
                   help="trapezoid-top (quadratic) or linear CPF interpolation")
    p.add_argument("--no-renormalize", action="store_true",
                   help="do not rescale P by the table's total mass")
    p.add_argument("--drift-tolerance", type=float, default=DRIFT_TOLERANCE)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quantile-motion",
                                     description="Trajectories from left-probability conservation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a preset or custom analytic model")
    sim.add_argument("preset", choices=sorted(PRESETS) + ["custom"])
    sim.add_argument("--model", choices=sorted(MODEL_KINDS), help="model kind for 'custom'")
    sim.add_argument("--param", type=_param, action="append", default=[],
                     help="model parameter key=value (repeatable), e.g. omega=2")
    sim.add_argument("--dx", type=float)
    sim.add_argument("--dt", type=float)
    sim.add_argument("--t-max", type=float)
    sim.add_argument("--x-min", type=float)
    sim.add_argument("--x-max", type=float)
    sim.add_argument("--threshold", type=float, help="max allowed quantile-Bohm deviation")
    sim.add_argument("--nodal-threshold", type=float,
                     help="bound for samples next to near-empty cells")
    sim.add_argument("--bohm-start", choices=("exact", "grid"), default="exact")
    sim.add_argument("--no-bohm", action="store_true", help="skip the Bohm reference run")
    sim.add_argument("--write-density", action="store_true", help="also write the sampled density CSV")
    _add_trajectory_options(sim)

    cmp_ = sub.add_parser("compare", help="compare two trajectory CSV files pairwise")
    cmp_.add_argument("quantile_csv", type=Path)
    cmp_.add_argument("bohm_csv", type=Path)
    cmp_.add_argument("--threshold", type=float)
    cmp_.add_argument("--output", type=Path, help="write the JSON report here")

    ing = sub.add_parser("ingest", help="quantile trajectories for a density CSV file")
    ing.add_argument("density_csv", type=Path)
    ing.add_argument("--mass-tolerance", type=float, default=MASS_TOLERANCE)
    ing.add_argument("--strict-boundary", action="store_true",
                     help="require negligible density at both grid ends")
    _add_trajectory_options(ing)

    pre = sub.add_parser("presets", help="preset information")
    pre.add_argument("action", choices=("list",))
    return parser


def _starts_and_quantiles(args, default_quantiles=()):
    quantiles = args.quantiles
    starts = tuple(args.x0) if args.x0 else None
    if quantiles is None and starts is None and default_quantiles:
        quantiles = default_quantiles
    return quantiles, starts


def _summarize(report: ComparisonReport, out=None):
    out = out or sys.stdout
    for e in report.entries:
        parts = [f"{e.label:>24}"]
        if e.deviation is not None:
            parts.append(f"max|dx|={e.max_deviation:.3e}")
        if e.p_drift is not None:
            parts.append(f"max P-drift={e.max_p_drift:.1e}")
        print("  ".join(parts), file=out)
    status = "PASS" if report.passed else "FAIL"
    parts = []
    if any(e.deviation is not None for e in report.entries):
        parts.append(f"max deviation {report.max_deviation:.3e} (threshold {report.threshold})")
    if any(e.p_drift is not None for e in report.entries):
        parts.append(f"max P-drift {report.max_p_drift:.1e} (tolerance {report.drift_tolerance})")
    print(f"{status}: " + ", ".join(parts), file=out)


def _cmd_simulate(args) -> int:
    overrides = dict(dx=args.dx, dt=args.dt, t_max=args.t_max, x_min=args.x_min, x_max=args.x_max,
                     threshold=args.threshold, nodal_threshold=args.nodal_threshold,
                     bohm_start=args.bohm_start, method=args.method,
                     renormalize=not args.no_renormalize, drift_tolerance=args.drift_tolerance,
                     workers=args.workers)
    quantiles, starts = _starts_and_quantiles(args)
    overrides.update(quantiles=quantiles, starts=starts)
    if args.preset == "custom":
        if args.model is None:
            raise QuantileMotionError("custom: --model is required")
        model = make_model(args.model, **dict(args.param))
        lo, hi = model.default_range
        base = dict(name=f"custom-{model.kind}", model=model, dx=model.default_dx,
                    dt=model.default_dt, t_max=model.default_t_max, x_min=lo, x_max=hi,
                    quantiles=(0.1, 0.3, 0.5, 0.7, 0.9), ndim=1)
        if quantiles is not None or starts is not None:
            base["quantiles"] = ()
        base.update({k: v for k, v in overrides.items() if v is not None})
        config = RunConfig(**base)
    else:
        if args.model or args.param:
            raise QuantileMotionError("--model/--param only apply to 'custom'")
        config = RunConfig.from_preset(args.preset, **overrides)
    result = run_experiment(config, with_bohm=not args.no_bohm)
    if args.output:
        write_outputs(result, args.output, fmt=args.format, write_density=args.write_density)
    _summarize(result.report)
    return EXIT_OK if result.report.passed else EXIT_CHECK_FAILED


def _cmd_compare(args) -> int:
    qts = read_trajectories(args.quantile_csv)
    bts = read_trajectories(args.bohm_csv)
    report = compare_many(qts, bts, threshold=args.threshold,
                          parameters={"quantile_csv": str(args.quantile_csv),
                                      "bohm_csv": str(args.bohm_csv)})
    if args.output:
        args.output.write_text(report.to_json(), encoding="utf-8")
    _summarize(report)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _cmd_ingest(args) -> int:
    series = ingest_series(args.density_csv, mass_tolerance=args.mass_tolerance,
                           check_boundary=args.strict_boundary)
    quantiles, starts = _starts_and_quantiles(args, default_quantiles=(0.1, 0.3, 0.5, 0.7, 0.9))
    config = RunConfig(name=f"ingest:{args.density_csv.name}", quantiles=quantiles or (),
                       starts=starts or (), x_min=series.grid.x_min, x_max=series.grid.x_max,
                       dx=series.grid.dx, dt=series.dt or 1.0, t_max=float(series.times[-1]) or 1.0,
                       method=args.method, renormalize=not args.no_renormalize,
                       drift_tolerance=args.drift_tolerance, workers=args.workers)
    result = run_ingested(series, config)
    if args.output:
        write_outputs(result, args.output, fmt=args.format)
    _summarize(result.report)
    return EXIT_OK if result.report.passed else EXIT_CHECK_FAILED


def _cmd_presets(args) -> int:
    for name, p in sorted(PRESETS.items()):
        lo, hi = p.x_range
        what = (f"{len(p.quantiles)} quantiles" if p.quantiles else f"{len(p.starts)} start points")
        print(f"{name:10} {p.description}")
        print(f"{'':10} dx={p.dx:g} dt={p.dt:g} t=[0,{p.t_max:g}] x=[{lo:g},{hi:g}] "
              f"ndim={p.ndim} {what} threshold={p.threshold:g}")
    return EXIT_OK


COMMANDS = {"simulate": _cmd_simulate, "compare": _cmd_compare, "ingest": _cmd_ingest,
            "presets": _cmd_presets}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except AbortedTrajectoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORTED
    except (QuantileMotionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every analysis step is its own subcommand so experiments can be rerun from
config files alone::

    ddpscale run --preset paper-grid --out results/
    ddpscale fit --curve results/curves/DimeNet.csv --format json
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .config import RunConfig, load_config, load_preset
from .errors import AnalysisError, DdpscaleError, ValidationError
from .io import emit_curve, emit_plot, load_curve, write_report
from .scaling import (
    DEFAULT_KNEE_THRESHOLD,
    allocate_for_target,
    detect_knee,
    doubling_speedups,
    fit_power_law,
    make_report,
    speedup,
)
from .simulator import ScalingCurve, find_min_time, sweep

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_ANALYSIS = 3


def slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_") or "curve"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _with_label(exc: DdpscaleError, label: str) -> DdpscaleError:
    return type(exc)(f"experiment {label!r}: {exc}")


def analyze(curve: ScalingCurve, config: RunConfig) -> dict:
    """Fit, knee, speedups and allocation plans for one curve."""
    a = config.analysis
    fit = fit_power_law(curve, truncate_at_min=a.truncate_at_min)
    n_min, t_min = find_min_time(curve)
    grid = [n for n, _ in curve.points]
    baseline = a.baseline_n if a.baseline_n is not None else grid[0]
    if baseline not in grid:
        raise AnalysisError(f"analyze: count not in curve {curve.label!r}: baseline_n={baseline!r}")
    n_max = a.n_max if a.n_max is not None else grid[-1]
    plans = []
    for target in a.targets_for(curve.label):
        plan = allocate_for_target(fit, target, n_max)
        plans.append(plan.to_dict())
    return {
        "label": curve.label,
        "fit": fit.to_dict(),
        "min_epoch_time": {"n_gpus": n_min, "epoch_time_s": t_min},
        "baseline_n": baseline,
        "speedups_vs_baseline": [{"n_gpus": n, "speedup": speedup(curve, baseline, n)} for n in grid],
        "doubling_speedups": doubling_speedups(curve),
        "knee_threshold": a.knee_threshold,
        "knee_n_gpus": detect_knee(curve, a.knee_threshold) if len(curve) >= 2 else None,
        "allocations": plans,
    }


def run(config: RunConfig, out_dir: str | Path | None = None) -> dict[str, Path]:
    """Sweep, analyze and write every artifact; returns the written paths by name."""
    out = Path(out_dir if out_dir is not None else config.output.directory)
    curve_dir = out / "curves"
    curve_dir.mkdir(parents=True, exist_ok=True)
    fmt = config.output.curve_format
    written: dict[str, Path] = {}
    curves, fits, summaries, entries = [], [], [], []
    for exp in config.experiments:
        try:
            curve = sweep(exp)
            summary = analyze(curve, config)
        except DdpscaleError as exc:
            raise _with_label(exc, exp.label) from None
        fit = fit_power_law(curve, truncate_at_min=config.analysis.truncate_at_min)
        written[f"curve:{exp.label}"] = emit_curve(curve, curve_dir / f"{slug(exp.label)}.{fmt}", fmt)
        curves.append(curve)
        fits.append(fit)
        summaries.append(summary)
        entries.append((exp.label, exp.workload.param_count, fit))

    report = make_report(entries)
    rfmt = config.output.report_format
    written["report"] = write_report(report, out / f"report.{rfmt}", rfmt)
    if config.output.plot:
        written["plot"] = emit_plot(curves, fits, out / "scaling.svg")
    summary_path = out / "summary.json"
    summary_path.write_text(_dump({"experiments": summaries}), encoding="utf-8")
    written["summary"] = summary_path
    return written


def _load_run_config(args) -> RunConfig:
    if args.config and args.preset:
        raise ValidationError("cli: pass either --config or --preset, not both")
    if args.preset:
        config = load_preset(args.preset)
    elif args.config:
        config = load_config(args.config)
    else:
        raise ValidationError("cli: --config PATH or --preset NAME is required")
    if args.seed is not None:
        config = replace(config, experiments=tuple(replace(e, seed=args.seed) for e in config.experiments))
    if getattr(args, "threshold", None) is not None:
        config = replace(config, analysis=replace(config.analysis, knee_threshold=args.threshold))
    return config


def _emit(args, payload, table: list[tuple[str, object]]) -> None:
    fmt = args.format or "md"
    if fmt == "json":
        sys.stdout.write(_dump(payload))
    elif fmt == "csv":
        sys.stdout.write(",".join(k for k, _ in table) + "\n")
        sys.stdout.write(",".join(str(v) for _, v in table) + "\n")
    else:
        sys.stdout.write("| " + " | ".join(k for k, _ in table) + " |\n")
        sys.stdout.write("|" + "---|" * len(table) + "\n")
        sys.stdout.write("| " + " | ".join(str(v) for _, v in table) + " |\n")


def _curves(args) -> list[ScalingCurve]:
    if not args.curve:
        raise ValidationError("cli: at least one --curve PATH is required")
    return [load_curve(p) for p in args.curve]


def cmd_sweep(args) -> None:
    config = _load_run_config(args)
    out = Path(args.out or config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    fmt = args.format or config.output.curve_format
    if fmt not in ("csv", "json"):
        raise ValidationError(f"sweep: unsupported curve format {fmt!r}")
    for exp in config.experiments:
        path = emit_curve(sweep(exp), out / f"{slug(exp.label)}.{fmt}", fmt)
        print(path)


def cmd_fit(args) -> None:
    for curve in _curves(args):
        fit = fit_power_law(curve, truncate_at_min=args.truncate_at_min)
        _emit(args, {"label": curve.label, **fit.to_dict()},
              [("label", curve.label), ("alpha", fit.alpha), ("beta", fit.beta),
               ("r_squared", fit.r_squared), ("n_points", fit.n_points), ("two_point", fit.two_point)])


def cmd_speedup(args) -> None:
    for curve in _curves(args):
        s = speedup(curve, args.n_from, args.n_to)
        _emit(args, {"label": curve.label, "from": args.n_from, "to": args.n_to, "speedup": s},
              [("label", curve.label), ("from", args.n_from), ("to", args.n_to), ("speedup", s)])


def cmd_knee(args) -> None:
    threshold = args.threshold if args.threshold is not None else DEFAULT_KNEE_THRESHOLD
    for curve in _curves(args):
        knee = detect_knee(curve, threshold)
        _emit(args, {"label": curve.label, "threshold": threshold, "knee_n_gpus": knee},
              [("label", curve.label), ("threshold", threshold), ("knee_n_gpus", knee)])


def cmd_allocate(args) -> None:
    for curve in _curves(args):
        fit = fit_power_law(curve, truncate_at_min=args.truncate_at_min)
        n_max = args.n_max if args.n_max is not None else curve.points[-1][0]
        plan = allocate_for_target(fit, args.target, n_max)
        d = plan.to_dict()
        _emit(args, {"label": curve.label, **d}, [("label", curve.label), *d.items()])


def _curves_and_params(args):
    if args.config or args.preset:
        config = _load_run_config(args)
        return [(sweep(e), e.workload.param_count) for e in config.experiments]
    curves = _curves(args)
    params = args.param_count or []
    if len(params) != len(curves):
        raise ValidationError(
            f"cli: got {len(curves)} --curve but {len(params)} --param-count values"
        )
    return list(zip(curves, params))


def cmd_report(args) -> None:
    pairs = _curves_and_params(args)
    report = make_report([(c.label, p, fit_power_law(c)) for c, p in pairs])
    fmt = args.format or "md"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        print(write_report(report, out / f"report.{fmt}", fmt))
    elif fmt == "json":
        sys.stdout.write(json.dumps(report.to_records(), indent=2) + "\n")
    elif fmt == "csv":
        sys.stdout.write(report.to_csv())
    else:
        sys.stdout.write(report.to_markdown())


def cmd_plot(args) -> None:
    if args.config or args.preset:
        curves = [c for c, _ in _curves_and_params(args)]
    else:
        curves = _curves(args)
    fits = [fit_power_law(c) if len(c) >= 2 else None for c in curves]
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    print(emit_plot(curves, fits, out / "scaling.svg"))


def cmd_run(args) -> None:
    config = _load_run_config(args)
    written = run(config, args.out)
    for path in written.values():
        print(path)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="PATH", help="JSON run config")
    shared.add_argument("--preset", metavar="NAME", help="shipped preset config, e.g. paper-grid")
    shared.add_argument("--curve", metavar="PATH", action="append", help="curve CSV/JSON (repeatable)")
    shared.add_argument("--out", metavar="DIR", help="output directory")
    shared.add_argument("--format", choices=("csv", "json", "md"))
    shared.add_argument("--threshold", type=float, help="knee threshold (per-doubling speedup)")
    shared.add_argument("--seed", type=int, help="override every experiment's noise seed")

    parser = argparse.ArgumentParser(prog="ddpscale", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[shared], help="simulate epoch times over the GPU grid").set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", parents=[shared], help="fit t = alpha * n^-beta")
    p.add_argument("--truncate-at-min", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("speedup", parents=[shared], help="measured speedup between two GPU counts")
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)
    p.set_defaults(func=cmd_speedup)

    sub.add_parser("knee", parents=[shared], help="diminishing-returns point").set_defaults(func=cmd_knee)

    p = sub.add_parser("allocate", parents=[shared], help="GPUs needed for a target epoch time")
    p.add_argument("--target", type=float, required=True, help="target seconds per epoch")
    p.add_argument("--n-max", type=int)
    p.add_argument("--truncate-at-min", action="store_true")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("report", parents=[shared], help="model / parameters / beta / R2 table")
    p.add_argument("--param-count", type=float, action="append", help="parameter count per --curve")
    p.set_defaults(func=cmd_report)

    sub.add_parser("plot", parents=[shared], help="log-log SVG of curves and fits").set_defaults(func=cmd_plot)
    sub.add_parser("run", parents=[shared], help="sweep, analyze, report and plot a config").set_defaults(func=cmd_run)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"ddpscale {args.command}: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AnalysisError as exc:
        print(f"ddpscale {args.command}: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except OSError as exc:
        print(f"ddpscale {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

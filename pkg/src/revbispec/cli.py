"""Command-line front end.

::

    revbispec simulate --model MODEL --n N --seed S [--out DIR]
    revbispec analyze  (--model MODEL [--grid G] | --sample CSV [--segment-len L] [--segments M])
                       [--emit csv,json,svg] [--out DIR]
    revbispec verify   [--n-random N] [--seed S] [--model MODEL ...] [--tolerance NAME=VALUE ...]
    revbispec report   (--from-json REPORT.json | --model MODEL [--grid G]) [--out DIR]

``MODEL`` is a TOML file or an inline model such as ``1,0.5;centered_exponential``
(see :mod:`revbispec.fileio`). Exit status is 0 on success, 1 when a check
fails, and 2 for invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bispec import EstimationPlan, analytic_bispectrum, estimate_bispectrum
from .cumulant import model_cumulant_table, sample_cumulant_table
from .diagnose import DiagnosticReport, diagnose_model, diagnose_series
from .exceptions import InternalInconsistencyError
from .fileio import read_sample_csv, resolve_model, sample_to_csv, write_text_atomic
from .linmodel import simulate
from .phase import extract_phase, fit_phase
from .svg import field_layers_svg
from .verify import DEFAULT_TOLERANCES, format_results, run_battery

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT_ERROR = 0, 1, 2
EMIT_CHOICES = ("csv", "json", "svg")


def _emit_list(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in EMIT_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown emit format(s): {', '.join(bad)}; choose from {','.join(EMIT_CHOICES)}")
    return tuple(dict.fromkeys(items))


def _tolerance(text):
    name, eq, value = text.partition("=")
    name = name.strip()
    if not eq or name not in DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(
            f"expected NAME=VALUE with NAME in {', '.join(sorted(DEFAULT_TOLERANCES))}, got {text!r}"
        )
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name}: not a number: {value!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="revbispec",
        description="Bispectral reversibility diagnostics for linear time series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a linear model and write sample.csv")
    p.add_argument("--model", required=True, help="TOML model file or inline model")
    p.add_argument("--n", type=int, required=True, help="number of observations")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=".", help="output directory (default: current)")

    p = sub.add_parser("analyze", help="run the diagnostic pipeline on a model or a sample")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", help="TOML model file or inline model (analytic path)")
    src.add_argument("--sample", help="CSV sample with header 'x' (estimation path)")
    p.add_argument("--grid", type=int, default=None, help="grid size G for models (default: max(64, 8*(width+T)))")
    p.add_argument("--segment-len", type=int, default=128, help="segment length L for samples")
    p.add_argument("--segments", type=int, default=None, help="number of segments M (default: all that fit)")
    p.add_argument("--taper", choices=("none", "hann"), default="none")
    p.add_argument("--max-lag", type=int, default=None, help="cumulant table half-width T")
    p.add_argument("--seed", type=int, default=0, help="seed of the null calibration (samples only)")
    p.add_argument("--emit", type=_emit_list, default=("csv", "json"), help="comma list of csv,json,svg")
    p.add_argument("--out", default=".", help="output directory (default: current)")

    p = sub.add_parser("verify", help="run the cross-module oracle battery")
    p.add_argument("--n-random", type=int, default=500, help="random filters in the property checks")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--model", action="append", default=[], help="extra model for the correspondence check")
    p.add_argument("--tolerance", type=_tolerance, action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--out", default=None, help="also write verify.log into this directory")

    p = sub.add_parser("report", help="render a diagnostic report as structured text")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--from-json", help="report.json written by analyze")
    src.add_argument("--model", help="TOML model file or inline model")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out", default=None, help="also write report.txt into this directory")
    return parser


def _default_grid(model, T):
    return max(64, 8 * (model.filter.width + T))


def cmd_simulate(args):
    model = resolve_model(args.model)
    sample = simulate(model, args.n, args.seed)
    out = Path(args.out)
    write_text_atomic(out / "sample.csv", sample_to_csv(sample))
    x = sample.values
    y = x - x.mean()
    var = float(np.mean(y ** 2))
    skew = float(np.mean(y ** 3)) / var ** 1.5 if var > 0 else 0.0
    print(f"model: {model.identifier}")
    print(f"n: {x.size}")
    print(f"mean: {float(x.mean())!r}")
    print(f"variance: {var!r}")
    print(f"skewness: {skew!r}")
    print(f"wrote {out / 'sample.csv'}")
    return EXIT_OK


def _write_field(out, field, emit):
    if "csv" in emit:
        write_text_atomic(out / "bispectrum.csv", field.to_csv())
        write_text_atomic(out / "bispectrum.meta.json", field.metadata_text())
    if "svg" in emit:
        for layer, text in field_layers_svg(field).items():
            write_text_atomic(out / f"bispectrum_{layer}.svg", text)


def _write_report(out, report, emit):
    write_text_atomic(out / "report.txt", report.to_text())
    if "json" in emit:
        write_text_atomic(out / "report.json", report.to_json())


def cmd_analyze(args):
    out = Path(args.out)
    emit = args.emit
    if args.model is not None:
        model = resolve_model(args.model)
        T = args.max_lag if args.max_lag is not None else max(2, model.filter.width)
        G = args.grid if args.grid is not None else _default_grid(model, T)
        report = diagnose_model(model, G)
        field = analytic_bispectrum(model, G)
        if "csv" in emit:
            write_text_atomic(out / "cumulants.csv", model_cumulant_table(model, T).to_csv())
            decomp = fit_phase(extract_phase(model.filter, G), max(model.filter.width, 2 * max(abs(model.filter.k_min), abs(model.filter.k_max))))
            write_text_atomic(out / "phase.txt", decomp.to_text())
    else:
        sample = read_sample_csv(args.sample)
        n = len(sample)
        if args.segments is None:
            plan = EstimationPlan.for_length(n, args.segment_len, args.taper)
        else:
            plan = EstimationPlan(args.segment_len, args.segments, args.taper)
        report = diagnose_series(sample, plan, calibration_seed=args.seed)
        field = estimate_bispectrum(sample, plan)
        if "csv" in emit:
            T = args.max_lag if args.max_lag is not None else 4
            write_text_atomic(out / "cumulants.csv", sample_cumulant_table(sample, T).to_csv())
    _write_field(out, field, emit)
    _write_report(out, report, emit)
    sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_verify(args):
    extra = tuple(resolve_model(m) for m in args.model)
    results = run_battery(
        n_random=args.n_random,
        seed=args.seed,
        grid=args.grid,
        extra_models=extra,
        tolerances=dict(args.tolerance),
    )
    log = format_results(results)
    sys.stdout.write(log)
    if args.out is not None:
        write_text_atomic(Path(args.out) / "verify.log", log)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def cmd_report(args):
    if args.from_json is not None:
        try:
            report = DiagnosticReport.from_json(Path(args.from_json).read_text(encoding="utf-8"))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ValueError(f"{args.from_json}: not a diagnostic report ({exc})") from None
    else:
        model = resolve_model(args.model)
        G = args.grid if args.grid is not None else _default_grid(model, 2)
        report = diagnose_model(model, G)
    text = report.to_text()
    if args.out is not None:
        write_text_atomic(Path(args.out) / "report.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "analyze": cmd_analyze, "verify": cmd_verify, "report": cmd_report}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InternalInconsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (ValueError, OSError) as exc:
        # ModelFileError, GridTooCoarseError and InsufficientLengthError are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

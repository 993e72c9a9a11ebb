"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 calibration-cache or config error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import distributions, harness, streams
from .distributions import DistributionError
from .estimator import fit_ior
from .functions import SampleError, SortedSample
from .geometry import gcm
from .smoothing import KernelSpec, smoothed_cdf, smoothed_odds, smoothed_odds_rate, smoothed_pdf
from .testing import (
    DEFAULT_ALPHA,
    DEFAULT_REPS,
    CalibrationCacheMiss,
    CriticalValueTable,
    Method,
    calibrate_many,
    run_test,
)
from .ttt import empirical_cdf, normalize_ttt, ttt_inverse

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3


class InputError(Exception):
    pass


class ConfigError(Exception):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def read_sample(path: str) -> SortedSample:
    """One nonnegative decimal per line; blank lines and ``#`` comments skipped."""
    values = []
    try:
        fh = sys.stdin if path == "-" else open(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise InputError(f"{path}:{lineno}: cannot parse {text!r} as a number") from None
            if not math.isfinite(v):
                raise InputError(f"{path}:{lineno}: value must be finite")
            if v < 0:
                raise InputError(f"{path}:{lineno}: negative observation {text}")
            values.append(v)
    if len(values) < 2:
        raise InputError(f"{path}: need at least two observations, found {len(values)}")
    return SortedSample.from_values(values)


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in spec:
            start, stop, num = spec.split(":")
            return np.linspace(float(start), float(stop), int(num))
        return np.array([float(t) for t in spec.split(",") if t.strip()])
    except ValueError:
        raise InputError(f"bad grid {spec!r}; use start:stop:num or a comma list") from None


def print_config(items: dict, stream=None) -> None:
    stream = stream or sys.stdout
    for k, v in items.items():
        stream.write(f"# {k}={v}\n")


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


# -- estimate ---------------------------------------------------------------

def estimate_rows(sample: SortedSample, grid=None, bandwidth=None):
    est = fit_ior(sample)
    top = est.top
    xs = np.concatenate(([0.0], np.unique(sample.values)))
    if grid is not None:
        xs = np.concatenate((xs, grid[(grid >= 0) & (grid < top)]))
    xs = np.unique(xs[xs < top])
    kernel = KernelSpec(bandwidth) if bandwidth is not None else None
    rows = []
    for x in xs:
        row = [x, est.odds_rate(x), est.odds(x), est.cdf(x), est.pdf(x)]
        if kernel is not None:
            finite = x < top - kernel.bandwidth
            row += [
                smoothed_odds_rate(est, kernel, x),
                smoothed_odds(est, kernel, x),
                smoothed_cdf(est, kernel, x),
                smoothed_pdf(est, kernel, x) if finite else None,
            ]
        rows.append(row)
    # Atom at the top: odds and CDF columns hold left limits; the jump is 1 - F.
    last = [top, math.inf, float(est.Lambda_tilde.y[-1]), est.cdf_below_top, None]
    if kernel is not None:
        last += [math.inf, math.inf, 1.0, None]
    rows.append(last)
    header = ["x", "lambda", "Lambda", "F", "f"]
    if kernel is not None:
        header += ["lambda_s", "Lambda_s", "F_s", "f_s"]
    return header, rows


def cmd_estimate(args) -> int:
    sample = read_sample(args.input)
    grid = parse_grid(args.grid) if args.grid else None
    if args.smooth is not None and not args.smooth > 0:
        raise InputError("--smooth bandwidth must be positive")
    out, close = _open_out(args.out)
    config = {"command": "estimate", "input": args.input, "n": sample.n,
              "smooth": args.smooth, "grid": args.grid}
    print_config(config)
    header, rows = estimate_rows(sample, grid, args.smooth)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    finally:
        if close:
            out.close()
    return EXIT_OK


# -- test / calibrate ---------------------------------------------------------

def cmd_test(args) -> int:
    sample = read_sample(args.input)
    table = None
    if args.table:
        try:
            table = CriticalValueTable.read(args.table)
        except OSError as exc:
            raise ConfigError(f"cannot read table {args.table}: {exc.strerror}") from exc
    print_config({"command": "test", "input": args.input, "n": sample.n, "method": args.method,
                  "alpha": args.alpha, "reps": args.reps, "seed": args.seed,
                  "table": args.table or ""})
    report = run_test(sample, args.method, args.alpha, args.reps, args.seed, table,
                      workers=args.workers)
    print(report.summary())
    print("statistic,critical_value,p_value,reject")
    print(report.machine_line())
    return EXIT_OK


def _int_list(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    return [float(t) for t in text.split(",") if t.strip()]


def cmd_calibrate(args) -> int:
    methods = [Method(m.strip()) for m in args.method.split(",")]
    sizes = _int_list(args.n)
    alphas = _float_list(args.alphas)
    if args.out and args.out != "-" and os.path.exists(args.out) and not args.force:
        raise ConfigError(f"{args.out} exists; pass --force to overwrite")
    print_config({"command": "calibrate", "method": args.method, "n": args.n,
                  "reps": args.reps, "seed": args.seed, "alphas": args.alphas})
    nulls = []
    for n in sizes:
        nulls += list(calibrate_many(methods, n, args.reps, args.seed, args.workers).values())
    table = CriticalValueTable.from_null(nulls, alphas)
    if args.out and args.out != "-":
        table.write(args.out)
        print(f"# wrote {len(table)} rows to {args.out}")
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(CriticalValueTable.HEADER)
        for t, n, m, s, a, c in table.rows:
            w.writerow([t.value, n, m, s, fmt(a), fmt(c)])
    return EXIT_OK


# -- simulations --------------------------------------------------------------

def read_config_file(path) -> dict[str, str]:
    items = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                key, sep, value = text.partition("=")
                if not sep:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                items[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return items


def _study_config(study, args) -> harness.StudyConfig:
    items = read_config_file(args.config) if args.config else {}
    flags = {
        "families": args.families,
        "sizes": args.sizes,
        "reps": args.reps,
        "seed": args.seed,
        "workers": args.workers,
    }
    if study == "mse":
        flags["percentiles"] = args.percentiles
    else:
        flags.update(alpha=args.alpha, calib_reps=args.calib_reps, methods=args.methods)
    items.update({k: v for k, v in flags.items() if v is not None})
    try:
        return harness.StudyConfig.from_mapping(study, items)
    except (ValueError, DistributionError) as exc:
        raise ConfigError(str(exc)) from exc


def _run_study(study, args) -> int:
    config = _study_config(study, args)
    print_config(config.resolved())
    if study == "mse":
        rows = harness.mse_study(config)
    else:
        table = CriticalValueTable.read(args.table) if args.table else None
        rows = harness.power_study(config, table)
    text = harness.write_table(rows, config, None if args.out in (None, "-") else args.out)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        print(f"# wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_simulate_mse(args) -> int:
    return _run_study("mse", args)


def cmd_simulate_power(args) -> int:
    return _run_study("power", args)


# -- demo ---------------------------------------------------------------------

def _demo_sample(spec_text, n, seed):
    spec = distributions.parse_spec(spec_text)
    rng = streams.stream(seed, streams.DEMO, streams.label_key(spec_text), n)
    return spec, distributions.sample(spec, n, rng)


def demo_figure1(seed):
    spec, sample = _demo_sample("hs:0.6", 20, seed)
    est = fit_ior(sample)
    ecdf = empirical_cdf(sample)
    grid = np.linspace(0.0, 1.0, 201)[1:-1]
    header = ["x", "F", "F_n", "F_tilde", "lambda_F", "lambda_tilde"]
    rows = [[x, distributions.cdf(spec, x), ecdf(x), est.cdf(x),
             distributions.odds_rate(spec, x), est.odds_rate(x)] for x in grid]
    return header, rows


def demo_figure3(seed, bandwidth=0.25):
    spec, sample = _demo_sample("b2:2,3", 20, seed)
    est = fit_ior(sample)
    kernel = KernelSpec(bandwidth)
    grid = np.linspace(0.0, est.top, 401)[1:-1]
    header = ["x", "lambda_F", "lambda_tilde", "lambda_s", "f", "f_tilde", "f_s"]
    rows = []
    for x in grid:
        fs = smoothed_pdf(est, kernel, x) if x < est.top - bandwidth else None
        rows.append([x, distributions.odds_rate(spec, x), est.odds_rate(x),
                     smoothed_odds_rate(est, kernel, x), distributions.pdf(spec, x),
                     est.pdf(x), fs])
    return header, rows


def demo_figure5(seed):
    header = ["n", "curve", "x", "value"]
    rows = []
    for n in (50, 100):
        _, sample = _demo_sample("pw:5,1", n, seed)
        t_bar = normalize_ttt(ttt_inverse(sample))
        u, level = t_bar.y, t_bar.x
        keep = np.ones(u.size, dtype=bool)
        keep[1:] = np.diff(u) > 0
        minorant = gcm((u[keep], level[keep])).hull
        for ui, li in zip(u, level):
            rows.append([n, "T_bar", ui, li])
            rows.append([n, "T_bar_cx", ui, minorant(ui)])
        est = fit_ior(sample)
        ecdf = empirical_cdf(sample)
        for x in np.linspace(0.0, sample.top * 1.05, 301):
            rows.append([n, "F_n", x, ecdf(x)])
            rows.append([n, "F_tilde", x, est.cdf(x)])
    return header, rows


def cmd_demo(args) -> int:
    fig = args.figure
    settings = {"command": "demo", "figure": fig, "seed": args.seed}
    if fig in (2, 4):
        study = "mse" if fig == 2 else "power"
        items = {"seed": args.seed, "workers": args.workers}
        if args.reps is not None:
            items["reps"] = args.reps
        if fig == 4 and args.calib_reps is not None:
            items["calib_reps"] = args.calib_reps
        config = harness.StudyConfig.from_mapping(study, {k: str(v) for k, v in items.items()})
        print_config(settings | config.resolved())
        rows = harness.mse_study(config) if fig == 2 else harness.power_study(config)
        text = harness.write_table(rows, config, None if args.out in (None, "-") else args.out)
        if args.out in (None, "-"):
            sys.stdout.write(text)
        return EXIT_OK
    if fig == 1:
        settings |= {"family": "hs:0.6", "n": 20}
        header, rows = demo_figure1(args.seed)
    elif fig == 3:
        settings |= {"family": "b2:2,3", "n": 20, "h": 0.25, "kernel": "epanechnikov"}
        header, rows = demo_figure3(args.seed)
    else:
        settings |= {"family": "pw:5,1", "n": "50,100"}
        header, rows = demo_figure5(args.seed)
    print_config(settings)
    out, close = _open_out(args.out)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    finally:
        if close:
            out.close()
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="oddsrate",
        description="Estimation and testing under an increasing odds rate constraint.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="fit the constrained estimator and export CSV")
    e.add_argument("--input", required=True, help="file with one observation per line ('-' for stdin)")
    e.add_argument("--smooth", type=float, metavar="H", help="add kernel-smoothed columns with bandwidth H")
    e.add_argument("--grid", help="extra evaluation points: start:stop:num or comma list")
    e.add_argument("--out", help="output CSV (default stdout)")
    e.set_defaults(func=cmd_estimate)

    t = sub.add_parser("test", help="test the increasing odds rate hypothesis")
    t.add_argument("--input", required=True)
    t.add_argument("--method", required=True, choices=["kt", "ks"])
    t.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    t.add_argument("--reps", type=int, default=DEFAULT_REPS)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--table", help="critical-value CSV produced by 'calibrate'")
    t.add_argument("--workers", type=int, default=1)
    t.set_defaults(func=cmd_test)

    c = sub.add_parser("calibrate", help="Monte Carlo critical values under LL(1)")
    c.add_argument("--method", required=True, help="kt, ks or kt,ks")
    c.add_argument("--n", required=True, help="sample size(s), comma separated")
    c.add_argument("--reps", type=int, default=DEFAULT_REPS)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--alphas", default="0.01,0.05,0.1")
    c.add_argument("--out")
    c.add_argument("--force", action="store_true", help="overwrite an existing output file")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_calibrate)

    for name, study in (("simulate-mse", "mse"), ("simulate-power", "power")):
        s = sub.add_parser(name, help=f"{study} simulation study")
        s.add_argument("--config", help="flat key=value file; flags override it")
        s.add_argument("--families", help="space/semicolon separated specs, e.g. 'w:2;b2:2,3'")
        s.add_argument("--sizes", help="comma separated sample sizes")
        s.add_argument("--reps", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--workers", type=int)
        s.add_argument("--out")
        if study == "mse":
            s.add_argument("--percentiles")
            s.set_defaults(func=cmd_simulate_mse)
        else:
            s.add_argument("--alpha", type=float)
            s.add_argument("--calib-reps", type=int)
            s.add_argument("--methods")
            s.add_argument("--table", help="cached critical-value CSV")
            s.set_defaults(func=cmd_simulate_power)

    d = sub.add_parser("demo", help="regenerate the data behind a figure as CSV")
    d.add_argument("--figure", type=int, required=True, choices=[1, 2, 3, 4, 5])
    d.add_argument("--seed", type=int, default=1)
    d.add_argument("--reps", type=int, help="override replications (figures 2 and 4)")
    d.add_argument("--calib-reps", type=int, help="override calibration size (figure 4)")
    d.add_argument("--workers", type=int, default=1)
    d.add_argument("--out")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SampleError, DistributionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, CalibrationCacheMiss) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``copdep {compute,power,independence,null-sim}``.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import synthetic
from .ace import AceConfig
from .data import DataError, load_csv, substream
from .experiments import (DEFAULT_SEED, PermutationConfig, fmt, independence_study, null_sim,
                          permutation_pvalue, power_curve, summary_csv)
from .measures import MEASURES, Chi2Config, MeasureSettings, NumericError, RdcConfig, compute
from .smoothing import SmootherConfig

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_settings(p):
    g = p.add_argument_group("measure settings")
    g.add_argument("--smoother", choices=["running_mean", "supsmu"], default="running_mean",
                   help="ACE smoother (default: %(default)s)")
    g.add_argument("--span", type=float, default=0.3,
                   help="running-mean window as a fraction of n (default: %(default)s)")
    g.add_argument("--min-window", type=int, default=2, help="default: %(default)s")
    g.add_argument("--tolerance", type=float, default=1e-6,
                   help="ACE stopping tolerance on |r_t - r_(t-1)| (default: %(default)s)")
    g.add_argument("--max-iterations", type=int, default=100, help="default: %(default)s")
    g.add_argument("--rdc-k", type=int, default=20, help="RDC features per side (default: %(default)s)")
    g.add_argument("--rdc-s", type=float, default=1 / 6, help="RDC projection scale (default: 1/6)")
    g.add_argument("--rdc-ridge", type=float, default=1e-8, help="default: %(default)s")
    g.add_argument("--chi2-bins", type=int, default=4, help="bins per axis (default: %(default)s)")


def _add_common(p, reps, n=200):
    p.add_argument("--reps", type=int, default=reps, help="replications (default: %(default)s)")
    p.add_argument("--n", type=int, default=n, help="sample size (default: %(default)s)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="default: %(default)s")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads; output does not depend on it (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="copdep", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("compute", help="compute one statistic for two CSV files")
    p.add_argument("--x", required=True, help="CSV file, one row per observation")
    p.add_argument("--y", required=True, help="CSV file with the same number of rows")
    p.add_argument("--header", action="store_true", help="both files have a header line")
    p.add_argument("--measure", choices=sorted(MEASURES), default="cdc", help="default: %(default)s")
    p.add_argument("--perm", type=int, default=0, metavar="B",
                   help="also report a permutation p-value from B permutations (default: off)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="default: %(default)s")
    _add_settings(p)

    p = sub.add_parser("power", help="power curves over models x noise levels x measures")
    p.add_argument("--models", default="A1..A8", help="comma list or range (default: %(default)s)")
    p.add_argument("--measures", default="cdc,ace,rdc", help="default: %(default)s")
    p.add_argument("--noise-levels", type=int, default=10,
                   help="equally spaced noise variances from 1/30 to 3 (default: %(default)s)")
    p.add_argument("--B", type=int, default=100, help="permutations per test (default: %(default)s)")
    p.add_argument("--alpha", type=float, default=0.05, help="default: %(default)s")
    p.add_argument("--full-scale", action="store_true",
                   help="500 replications and B=200 (overrides --reps and --B)")
    p.add_argument("--out", required=True, help="output CSV (a .meta.json is written next to it)")
    _add_common(p, reps=100)
    _add_settings(p)

    p = sub.add_parser("independence", help="null mean/variance of CDC and RDC")
    p.add_argument("--out", help="output CSV (default: stdout)")
    _add_common(p, reps=500)
    _add_settings(p)

    p = sub.add_parser("null-sim", help="sample of a statistic under independence")
    p.add_argument("--measure", choices=sorted(MEASURES), default="cdc", help="default: %(default)s")
    p.add_argument("--dim", type=int, default=1, help="columns of x and of y (default: %(default)s)")
    p.add_argument("--out", help="output CSV (default: stdout)")
    _add_common(p, reps=500)
    _add_settings(p)
    return parser


def _settings(args) -> MeasureSettings:
    smoother = SmootherConfig(span=args.span, min_window=args.min_window, kind=args.smoother)
    return MeasureSettings(
        ace=AceConfig(args.max_iterations, args.tolerance, smoother),
        rdc=RdcConfig(k=args.rdc_k, s=args.rdc_s, ridge=args.rdc_ridge),
        chi2=Chi2Config(args.chi2_bins))


def parse_models(text: str) -> list[str]:
    models = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"([AB])(\d)\.\.([AB])?(\d)", part)
        if m:
            lo, hi = int(m.group(2)), int(m.group(4))
            models += [f"{m.group(1)}{i}" for i in range(lo, hi + 1)]
        elif part:
            models.append(part)
    for model in models:
        synthetic.model_spec(model)
    return models


def _echo(args):
    config = {k: v for k, v in sorted(vars(args).items())}
    print("# config: " + json.dumps(config, sort_keys=True, default=str), file=sys.stderr)


def _write(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_compute(args, settings):
    x = load_csv(args.x, has_header=args.header)
    y = load_csv(args.y, has_header=args.header)
    if x.n != y.n:
        raise DataError(f"row-count mismatch: {args.x} has {x.n} rows, {args.y} has {y.n}")
    stream = substream(args.seed, "compute", args.measure)
    result = compute(args.measure, x, y, settings, stream=stream)
    fields = [result.name, fmt(result.statistic)]
    if args.perm > 0:
        p = permutation_pvalue(x, y, args.measure, PermutationConfig(B=args.perm),
                               substream(args.seed, "compute-perm", args.measure), settings)
        fields.append(fmt(p))
    print(",".join(fields))


def _cmd_power(args, settings):
    if args.full_scale:
        args.reps, args.B = 500, 200
    grid = power_curve(args.model_list,
                       [m.strip() for m in args.measures.split(",") if m.strip()],
                       synthetic.noise_grid(args.noise_levels), n=args.n, reps=args.reps,
                       perm=PermutationConfig(args.B, args.alpha), seed=args.seed,
                       settings=settings, workers=args.threads)
    grid.write(args.out)


def _cmd_independence(args, settings):
    rows = independence_study(args.n, args.reps, args.seed, settings, workers=args.threads)
    _write(summary_csv(rows), args.out)


def _cmd_null_sim(args, settings):
    values = null_sim(args.measure, args.n, args.reps, args.seed, settings, d=args.dim,
                      workers=args.threads)
    lines = ["rep,measure,statistic"] + [f"{i},{args.measure},{fmt(v)}" for i, v in enumerate(values)]
    _write("\n".join(lines) + "\n", args.out)


_COMMANDS = {"compute": _cmd_compute, "power": _cmd_power,
             "independence": _cmd_independence, "null-sim": _cmd_null_sim}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "measures", None):
            unknown = set(m.strip() for m in args.measures.split(",")) - set(MEASURES)
            if unknown:
                raise UsageError(f"unknown measures: {', '.join(sorted(unknown))}")
        if args.command == "power":
            args.model_list = parse_models(args.models)
        settings = _settings(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"copdep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _echo(args)
    try:
        _COMMANDS[args.command](args, settings)
    except (NumericError, ArithmeticError) as exc:
        print(f"copdep: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError, ValueError, KeyError) as exc:
        print(f"copdep: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

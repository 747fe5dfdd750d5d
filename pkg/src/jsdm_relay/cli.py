"""Command-line entry point.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import sys
import warnings

from .analysis.averaging import QuadratureError
from .config import ExperimentConfig, load_config, parse_range
from .experiments import (CURVE_COLUMNS, SWEEP_VARS, assoc_summary, run_curve, run_sweep,
                          to_csv, validate, with_overrides)
from .params import ConfigError

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--seed", type=_u64)
    common.add_argument("--drops", type=_positive, help="Monte Carlo drops")
    common.add_argument("--thresholds", metavar="A:B:STEP", help="SINR thresholds in dB")

    p = argparse.ArgumentParser(prog="jsdm-relay",
                                description="Outage analysis of a relay-assisted mmWave cell.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("curve", parents=[common], help="outage versus SINR threshold (CSV)")
    sw = sub.add_parser("sweep", parents=[common], help="sweep d_ms, M or association rule")
    sw.add_argument("--var", choices=SWEEP_VARS, required=True)
    sub.add_parser("assoc", parents=[common], help="association probabilities")
    sub.add_parser("validate", parents=[common], help="analysis versus Monte Carlo gate")
    return p


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    th = parse_range(args.thresholds, "--thresholds") if args.thresholds else None
    return with_overrides(cfg, args.seed, args.drops, th)


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if args.command == "curve":
                _emit(to_csv(run_curve(cfg), CURVE_COLUMNS), args.out)
            elif args.command == "sweep":
                _emit(to_csv(run_sweep(cfg, args.var)), args.out)
            elif args.command == "assoc":
                _emit("".join(f"{k} = {v}\n" for k, v in assoc_summary(cfg).items()), args.out)
            else:
                report = validate(cfg)
                _emit(report.text() + "\n", args.out)
                if not report.passed:
                    print(f"validation failed: |gap| {report.max_gap:.4g} at "
                          f"{report.worst_threshold_dB:g} dB", file=sys.stderr)
                    return EXIT_VALIDATION
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

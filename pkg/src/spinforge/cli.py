"""Command-line entry point.

Subcommands either load a JSON sweep config (`run`) or build the default
config for one experiment (`qfi-scan`, `readout`, ...).  Results land in
<out>/<experiment>/<confighash>.csv with a `# config_hash=` first line, so a
re-run with the same config is byte-identical.  Exit codes: 0 success,
1 configuration error, 2 numerical failure; errors also go to stderr as a
one-line JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .dynamics import ConvergenceError
from .harness import (
    ConfigError,
    SweepConfig,
    default_config,
    run_experiment,
    run_validation,
    write_results,
)
from .readout import DegenerateReadoutError, ZeroResponseError

_EXIT_OK = 0
_EXIT_CONFIG = 1
_EXIT_NUMERICAL = 2


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": message, "kind": kind}), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinforge",
        description="Collective-spin twisting dynamics, QFI scans, and readout sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"spinforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads (env SPINFORGE_THREADS overrides)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0, help="reserved; all computations are deterministic")

    p_run = sub.add_parser("run", help="run a JSON sweep config")
    p_run.add_argument("config", help="path to the config file")
    add_common(p_run)

    for name, experiment in (
        ("qfi-scan", "qfi_scan"),
        ("qfi-vs-time", "qfi_vs_time"),
        ("scaling", "scaling_vs_n"),
        ("readout", "readout_scan"),
        ("noise-scan", "noise_scan"),
        ("floquet-check", "floquet_convergence"),
        ("semiclassical", "semiclassical"),
    ):
        p = sub.add_parser(name, help=f"run the default {experiment} experiment")
        p.add_argument("--n", type=int, default=100, help="particle number")
        p.set_defaults(experiment=experiment)
        add_common(p)

    sub.add_parser("validate", help="run the product-space oracle suite")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "validate":
        checks = run_validation(verbose=True)
        failed = [name for name, _, ok in checks if not ok]
        if failed:
            _emit_error("numerical", f"oracle checks failed: {failed}")
            return _EXIT_NUMERICAL
        print(f"all {len(checks)} oracle checks passed")
        return _EXIT_OK

    try:
        if args.command == "run":
            config = SweepConfig.from_json_file(args.config)
        else:
            config = default_config(args.experiment, n=args.n)
    except ConfigError as exc:
        _emit_error("config", str(exc))
        return _EXIT_CONFIG

    try:
        table = run_experiment(config, threads=args.threads)
        out_dir = config.output_path or args.out
        path = write_results(table, config, out_dir, fmt=args.format)
    except ConfigError as exc:
        _emit_error("config", str(exc))
        return _EXIT_CONFIG
    except (
        ConvergenceError,
        DegenerateReadoutError,
        ZeroResponseError,
        FloatingPointError,
        ValueError,
    ) as exc:
        _emit_error("numerical", str(exc))
        return _EXIT_NUMERICAL
    print(path)
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: run, validate, report, calibrate."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .experiment import (
    ConfigError,
    emit_report,
    load_config,
    run_experiment,
    validate_config,
)
from .noise import calibrate_rates
from .walks import ResourceLimitError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def _cmd_validate(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate_config(raw)
    if problems:
        print(f"{args.config}: invalid", file=sys.stderr)
        for p in problems:
            print(f"  {p}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = load_config(raw)
    print(f"{args.config}: valid (name={cfg['name']!r}, "
          f"{cfg['walk']['variant']} on {cfg['lattice']['kind']})")
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        paths = run_experiment(args.config, output_dir=args.output_dir,
                               workers=args.workers)
    except ConfigError as exc:
        print(f"error: invalid config {args.config}:", file=sys.stderr)
        for p in exc.messages:
            print(f"  {p}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    for p in paths:
        print(p)
    return EXIT_OK


def _cmd_report(args) -> int:
    outdir = args.output_dir or args.records_dir
    written = emit_report(args.records_dir, outdir)
    if len(written) <= 1:
        print(f"warning: no run records found in {args.records_dir}", file=sys.stderr)
    for p in written:
        print(p)
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    kwargs = {}
    if args.coupling is not None:
        from .noise import NoiseModel

        kwargs["template"] = NoiseModel(coupling=args.coupling)
    result = calibrate_rates(grid_points=args.grid_points, **kwargs)
    if args.json:
        print(json.dumps({
            "noise": result.model.to_dict(),
            "achieved": result.achieved,
            "residuals": result.residuals,
            "ssr": result.ssr,
        }, indent=2, sort_keys=True))
    else:
        print(result.summary())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcawalk",
        description="Quantum walk / walk-search simulator on cycles and tori "
                    "with ideal and noisy backends.",
    )
    parser.add_argument("--version", action="version", version=f"qcawalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--output-dir", default=None, help="override the output directory")
    p_run.add_argument("--workers", type=int, default=None,
                       help="concurrent sweep workers (default: $QCAWALK_WORKERS or 1)")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="schema-check a config without running it")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    p_rep = sub.add_parser("report", help="summarise run records into CSV tables")
    p_rep.add_argument("records_dir", help="directory containing run record JSON files")
    p_rep.add_argument("--output-dir", default=None,
                       help="where to write the tables (default: records dir)")
    p_rep.set_defaults(func=_cmd_report)

    p_cal = sub.add_parser("calibrate",
                           help="fit relaxation/dephasing rates to the native gate fidelities")
    p_cal.add_argument("--coupling", type=float, default=None,
                       help="qubit-qubit coupling in rad/s")
    p_cal.add_argument("--grid-points", type=int, default=17)
    p_cal.add_argument("--json", action="store_true", help="machine-readable output")
    p_cal.set_defaults(func=_cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

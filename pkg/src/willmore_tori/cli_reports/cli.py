"""willmore-tori command line: verify suites and reduction experiments with reproducible reports."""

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from willmore_tori.cli_reports.config import Command, ExperimentConfig, Suite, load_experiment_config
from willmore_tori.cli_reports.runners import prepare, run
from willmore_tori.logging_config import get_logger, setup_logging
from willmore_tori.settings import get_settings

logger = get_logger(__name__)

OUTPUT_ENV = "WILLMORE_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "reports"

COMMAND_HELP = {
    Command.VERIFY: "Run check suites against closed-form values",
    Command.EXPAND: "Fit energy expansions in eps, r or |omega| and compare leading coefficients",
    Command.LANDSCAPE: "Tabulate reduced energies and optionally extremize them",
    Command.SPECTRUM: "Near-kernel of the linearized operator on the torus family",
    Command.MOBIUS: "Area-preserving inversion offsets and their limits",
    Command.SCHWARZSCHILD: "Axis signs, asymptotic flatness and extrema in Schwarzschild",
}


def _json_object(text: str) -> Dict[str, Any]:
    try:
        value = json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"invalid JSON: {e}") from e
    if not isinstance(value, dict):
        raise argparse.ArgumentTypeError("expected a JSON object")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="willmore-tori",
        description="Willmore energy of Mobius-transformed Clifford tori in curved 3-manifolds.",
    )
    parser.add_argument("--log-level", default=None, help="Override the package log level")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for command in Command:
        sub = subparsers.add_parser(command.value, help=COMMAND_HELP[command])
        sub.add_argument("--config", type=Path, default=None, help="JSON experiment config")
        sub.add_argument("--out", type=Path, default=None, help=f"Output directory (default: ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT_DIR})")
        sub.add_argument("--resolution", type=int, default=None, help="Grid nodes per direction")
        sub.add_argument("--seed", type=int, default=None, help="Random seed")
        sub.add_argument("--model", type=_json_object, default=None,
                         help='Metric model, e.g. \'{"kind":"schwarzschild","m":1.0}\'')
        sub.add_argument("--workers", type=int, default=None, help="Worker pool size")
        if command is Command.VERIFY:
            sub.add_argument("--suite", choices=Suite.get_all_suites(), default=None, help="Check suite")
        if command is Command.MOBIUS:
            sub.add_argument("--eta", type=float, action="append", default=None,
                             help="Inversion radius. Repeatable.")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "model": args.model,
        "resolution": args.resolution,
        "seed": args.seed,
        "workers": args.workers,
        "suite": getattr(args, "suite", None),
        "eta_list": getattr(args, "eta", None),
        "output_dir": str(args.out) if args.out is not None else None,
    }


def resolve_output_dir(config: ExperimentConfig) -> Path:
    """--out (or output_dir in the config) wins over WILLMORE_OUTPUT_DIR."""
    if config.output_dir:
        return Path(config.output_dir)
    return Path(os.getenv(OUTPUT_ENV, DEFAULT_OUTPUT_DIR))


def _print_diagnostics(error: Exception) -> None:
    if isinstance(error, ValidationError):
        for item in error.errors():
            location = ".".join(str(part) for part in item["loc"]) or "<root>"
            print(f"[error] {location}: {item['msg']}", file=sys.stderr)
    else:
        print(f"[error] {error}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)

    settings = get_settings()
    setup_logging(
        log_level=args.log_level or settings.logging.level,
        console_level=settings.logging.console_level,
        loggers=settings.logging.loggers,
        max_file_size=settings.logging.max_file_size,
        backup_count=settings.logging.backup_count,
    )

    try:
        config = load_experiment_config(args.command, args.config, _overrides(args))
        context = prepare(config)
    except (ValidationError, ValueError, OSError) as e:
        logger.error(f"Invalid configuration: {e}", extra={"event": "config_error"})
        _print_diagnostics(e)
        return 2

    out_dir = resolve_output_dir(config)
    try:
        return run(config, out_dir, context)
    except Exception as e:
        logger.error(f"{args.command} aborted: {e}", exc_info=True, extra={"event": "run_aborted"})
        print(f"[error] {args.command} aborted: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

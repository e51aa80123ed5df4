"""
thzsim command-line entry point.

    thzsim simulate --config cfg.json --experiment fig1 --seed 7 --trials 100000 --out results/
    thzsim validate --config cfg.json

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from thzsim import __version__
from thzsim.config import get_settings
from thzsim.errors import ConfigError
from thzsim.services.config_service import canonical_echo, validate_config
from thzsim.services.experiment_service import PRESETS, get_preset, run_preset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thzsim",
        description="Monte Carlo SINR and outage simulator for multi-carrier THz links",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sim = subparsers.add_parser("simulate", help="Run an experiment and write CSV + manifest")
    sim.add_argument("--config", required=True, help="JSON experiment configuration")
    sim.add_argument("--experiment", required=True, choices=sorted(PRESETS))
    sim.add_argument("--seed", type=_u64, default=None, help="Override the config seed")
    sim.add_argument("--trials", type=_positive_int, default=None, help="Override n_trials")
    sim.add_argument("--out", default=None, help="Output directory (default: THZSIM_OUTPUT_DIR)")
    sim.add_argument("--threshold-mode", choices=["paper", "shannon"], default=None)
    sim.add_argument(
        "--keep-config-constants",
        action="store_true",
        help="Use the config's values for parameters a figure preset fixes",
    )

    val = subparsers.add_parser("validate", help="Validate a config and print its resolved form")
    val.add_argument("--config", required=True, help="JSON experiment configuration")
    return parser


def _simulate(args: argparse.Namespace) -> int:
    settings = get_settings()
    config = validate_config(args.config)

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["n_trials"] = args.trials
    if args.threshold_mode is not None:
        overrides["threshold_mode"] = args.threshold_mode

    result = run_preset(
        get_preset(args.experiment),
        config,
        args.out or settings.output_dir,
        config_overrides=overrides,
        keep_config_constants=args.keep_config_constants,
    )
    print(result.csv_path)
    return EXIT_OK


def _validate(args: argparse.Namespace) -> int:
    sys.stdout.write(canonical_echo(validate_config(args.config)))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the command and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        if args.command == "simulate":
            return _simulate(args)
        return _validate(args)
    except ConfigError as e:
        logger.error(str(e))
        for pointer, message in e.issues:
            print(f"config error at {pointer or '/'}: {message}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        logger.error(f"Invalid configuration after overrides: {e}")
        return EXIT_CONFIG
    except Exception as e:
        logger.exception(f"Simulation failed: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger
from ppm_engine.config import settings
from ppm_engine.harness.describe import describe, render
from ppm_engine.harness.loader import load_config
from ppm_engine.harness.presets import FULL_HORIZON, PRESETS
from ppm_engine.harness.run import analyze_from, price_from, run
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.utils import custom_serializer

COMMANDS = ("describe", "simulate", "price", "analyze", "run")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.PROJECT_NAME, description="Predator-prey market simulator")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        sub.add_argument("--config", type=Path, help="YAML experiment config")
        sub.add_argument("--preset", choices=sorted(PRESETS), help="Shipped experiment preset")
        sub.add_argument("--seed", type=int, help="Root seed of the run")
        sub.add_argument("--out", type=Path, help=f"Output directory (default {settings.OUTPUT_DIR}/<name>)")
        if command == "describe":
            sub.add_argument("--json", default=False, action="store_true", help="Print the report as JSON")
            continue
        sub.add_argument("--horizon", type=float, help="Simulated minutes")
        sub.add_argument("--full-horizon", default=False, action="store_true", help="Thirty simulated years")
        sub.add_argument("--seeds", type=int, help="Ensemble members")
        sub.add_argument("--workers", type=int, help="Worker processes for ensembles")
        if command in ("price", "analyze"):
            sub.add_argument("--input", type=Path, required=True, help="Directory written by an earlier stage")
    return parser


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    simulation: Dict[str, Any] = {}
    if args.seed is not None:
        simulation["seed"] = args.seed
    if getattr(args, "full_horizon", False):
        simulation["horizon"] = FULL_HORIZON
    if getattr(args, "horizon", None) is not None:
        simulation["horizon"] = args.horizon
    if getattr(args, "seeds", None) is not None:
        simulation["seeds"] = args.seeds

    overrides: Dict[str, Any] = {"simulation": simulation} if simulation else {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    return overrides


def execute(args: argparse.Namespace) -> None:
    if args.config is None and args.preset is None:
        raise PpmError("one of --config and --preset is required", error_code=PpmErrorCode.CONFIG_ERROR)
    config = load_config(args.config, args.preset, overrides_from(args))

    match args.command:
        case "describe":
            report = describe(config)
            print(json.dumps(report, indent=2, default=custom_serializer) if args.json else render(report))
        case "simulate":
            run(config, max_workers=args.workers, stages=frozenset({"simulate"}), command="simulate")
        case "price":
            price_from(config, args.input)
        case "analyze":
            analyze_from(config, args.input)
        case "run":
            run(config, max_workers=args.workers)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.remove()
    logger.add(sys.stderr, level=settings.LOG_LEVEL)

    try:
        execute(args)
    except PpmError as ex:
        logger.error(f"{args.command} failed: {repr(ex)}")
        return ex.exit_code
    except Exception as ex:
        logger.exception(f"{args.command} failed [UNHANDLED]: {repr(ex)}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

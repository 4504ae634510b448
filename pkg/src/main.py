import argparse
import json
import os
import sys
from typing import Any, Callable, Dict, List, Optional

from src.cli.fresnel import main as fresnel_handler
from src.cli.image import main as image_handler
from src.cli.peaks import main as peaks_handler
from src.cli.synth import main as synth_handler
from src.cli.theory import main as theory_handler
from src.models.errors import BfmError
from src.utils.logger import get_logger, set_level

logger = get_logger(__name__)

HANDLERS: Dict[str, Callable[..., Any]] = {
    "synth": synth_handler,
    "image": image_handler,
    "theory": theory_handler,
    "fresnel": fresnel_handler,
    "peaks": peaks_handler,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bfm",
        description="Bifocusing imaging of small inhomogeneities from bistatic scattering data",
    )
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synth", "synthesise a bistatic dataset for a scene"),
        ("image", "build the indicator map of a dataset and pick peaks"),
        ("theory", "tabulate kernel profiles and the series/quadrature residuals"),
        ("fresnel", "extract a fixed-angle dataset from a multistatic Fresnel table"),
        ("peaks", "re-extract and score peaks from a stored map"),
    ):
        command = commands.add_parser(name, help=help_text)
        command.add_argument("--config", type=str, required=True, help="YAML/JSON configuration file")
        command.add_argument("--alpha-deg", type=float, default=None, help="override the bistatic angle")
        command.add_argument("--freq-ghz", type=float, default=None, help="override the frequency")
        command.add_argument("--seed", type=int, default=None, help="override the noise seed")
        command.add_argument("--out", type=str, default=None, help="override the output directory")
    return parser


def run_command(command: str, config_path: str, overrides: Optional[Dict[str, Any]] = None) -> int:
    """
    Run one subcommand and translate failures into exit codes.

    :return: 0 on success, the error's ``exit_code`` for pipeline errors, 1 otherwise
    """
    try:
        logger.info(f"Running '{command}' with config {config_path}")
        HANDLERS[command](config_path, overrides)
        logger.info(f"'{command}' finished successfully")
        return 0
    except BfmError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure in '{command}': {str(e)}")
        return 1


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_level(args.log_level)
    overrides = {"alpha_deg": args.alpha_deg, "freq_ghz": args.freq_ghz, "seed": args.seed, "out": args.out}
    return run_command(args.command, args.config, overrides)


def lambda_handler(event, context):
    """
    AWS Lambda handler function.

    :param event: The event dictionary; ``command`` selects the subcommand and
        ``overrides`` optionally patches the configuration
    :param context: AWS Lambda execution context (not used here).
    :return: A response dictionary indicating success or failure.
    """
    trigger_source = detect_trigger_source(event)
    logger.info(f"Trigger Source: {trigger_source}")

    config_path = os.environ.get("config_path")
    # a dataset landing on the queue is imaged; anything else must name its command
    command = "image" if trigger_source == "SQS" else event.get("command")
    logger.info(f"Received config_path: {config_path}")
    logger.info(f"Received command: {command}")

    if command is None:
        return {"statusCode": 400, "body": json.dumps({"error": "event names no command"})}
    if command not in HANDLERS:
        return {"statusCode": 400, "body": json.dumps({"error": f"unknown command {command!r}"})}
    exit_code = run_command(command, config_path, event.get("overrides"))
    return {
        "statusCode": 200 if exit_code == 0 else 400,
        "body": json.dumps({"command": command, "config_path": config_path, "exit_code": exit_code}),
    }


def detect_trigger_source(event: Dict[str, Any]) -> str:
    """
    Detect the source of the Lambda trigger.

    Args:
        event (dict): Event payload

    Returns:
        str: Trigger source identifier
    """
    if "Records" in event and event["Records"][0].get("eventSource") == "aws:sqs":
        return "SQS"
    return "Other"


if __name__ == "__main__":
    sys.exit(main())

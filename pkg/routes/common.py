"""Common utilities and decorators for commands"""

import logging
import time
import traceback
from functools import wraps
from typing import List, Tuple

import click

from models.errors import UnknownSuite, ValidationError
from models.optimizer import OptimizerConfig
from services.fixtures import FixtureFile, inputs_digest, load_fixture

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


def run_command(func):
    """Decorator that logs the call, prints the returned RunReport and maps errors to exit codes"""

    @wraps(func)
    def wrapper(*args, output="text", **kwargs):
        ctx = click.get_current_context()
        logger.info(f"Command: {ctx.command_path}")
        logger.debug(f"Arguments: {kwargs}")
        started = time.perf_counter()
        code = EXIT_OK
        try:
            report = func(*args, **kwargs)
            report.wall_time = time.perf_counter() - started
            click.echo(report.to_json() if output == "json" else report.to_text())
            if not report.passed:
                code = EXIT_FAILURE
        except (ValidationError, UnknownSuite) as e:
            logger.warning(f"{ctx.command.name} rejected its input: {e}")
            click.echo(f"error: {e}", err=True)
            code = EXIT_INVALID
        except Exception as e:
            logger.error(f"Error in {func.__name__}: {str(e)}")
            logger.error(f"Full traceback: {traceback.format_exc()}")
            click.echo(f"error: {e}", err=True)
            code = EXIT_FAILURE

        logger.info(f"{ctx.command_path} finished with exit status {code}")
        ctx.exit(code)

    return wrapper


def output_option(func):
    return click.option(
        "--output",
        type=click.Choice(["text", "json"]),
        default="text",
        show_default=True,
        help="Human-readable text or a machine-readable JSON report",
    )(func)


def optimizer_options(func):
    """--seed, --restarts, --tol, --max-iters and --workers; unset values come from QDIST_* variables"""
    options = [
        click.option("--seed", type=click.IntRange(min=0), default=None, help="Base seed for restart streams"),
        click.option("--restarts", type=click.IntRange(min=1), default=None, help="Number of random restarts"),
        click.option("--tol", type=float, default=None, help="Windowed-improvement stopping tolerance"),
        click.option("--max-iters", type=click.IntRange(min=1), default=None, help="Iteration cap per restart"),
        click.option("--workers", type=click.IntRange(min=1), default=None, help="Threads running restarts"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def optimizer_config(seed=None, restarts=None, tol=None, max_iters=None, workers=None) -> OptimizerConfig:
    return OptimizerConfig.from_env(
        seed=seed, restarts=restarts, tol=tol, max_iters=max_iters, workers=workers
    )


def load_inputs(*references: str) -> Tuple[List[FixtureFile], str]:
    """Load fixtures by path or bundled name; returns them with the digest of their raw text"""
    loaded = [load_fixture(ref) for ref in references]
    return [f for f, _ in loaded], inputs_digest([text for _, text in loaded])

import os
import logging

import click
from dotenv import load_dotenv

from models import settings
from routes import ALL_COMMANDS

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def configure_logging(level: str) -> None:
    """Log to stderr, and also to QDIST_LOG_FILE when it is set; stdout carries reports only"""
    handlers = [logging.StreamHandler()]
    if settings.LOG_FILE:
        os.makedirs(os.path.dirname(settings.LOG_FILE) or ".", exist_ok=True)
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


@click.group(name="qdist")
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=settings.LOG_LEVEL if settings.LOG_LEVEL in LOG_LEVELS else "INFO",
    show_default=True,
)
@click.version_option("1.0.0", prog_name="qdist")
def cli(log_level: str):
    """Distinguishability of quantum states and operations"""
    configure_logging(log_level)


# Register all commands
for command in ALL_COMMANDS:
    cli.add_command(command)
    logger.debug(f"Registered command: {command.name}")


if __name__ == "__main__":
    cli()

"""Bundled fixture commands"""

import logging

import click

from models.errors import FixtureError
from services.fixtures import (FIXTURE_DIR, bundled_fixture_names,
                               check_bundled_fixtures, export_fixtures)
from services.reports import RunReport

from .common import output_option, run_command

logger = logging.getLogger(__name__)


@click.group("fixtures")
def fixtures():
    """Bundled ensemble fixtures"""


@fixtures.command("list")
@output_option
@run_command
def list_fixtures() -> RunReport:
    names = bundled_fixture_names()
    return RunReport(
        command="fixtures list",
        values={"directory": str(FIXTURE_DIR), "count": len(names)},
        lines=names,
    )


@fixtures.command("export")
@click.argument("directory", type=click.Path(file_okay=False))
@output_option
@run_command
def export(directory: str) -> RunReport:
    """Write every bundled fixture, rebuilt from its closed form, into DIRECTORY"""
    written = export_fixtures(directory)
    return RunReport(
        command="fixtures export",
        values={"count": len(written)},
        lines=[str(path) for path in written],
    )


@fixtures.command("check")
@output_option
@run_command
def check() -> RunReport:
    """Validate every bundled fixture"""
    results = check_bundled_fixtures()
    failed = [r for r in results if not r.passed]
    for result in failed:
        click.echo(f"{result.name}: {result.message}", err=True)
    if failed:
        names = ", ".join(r.name for r in failed)
        raise FixtureError(f"{len(failed)} bundled fixtures failed validation: {names}")
    return RunReport(
        command="fixtures check",
        values={"checked": len(results)},
        lines=[f"{r.name}: {r.message}" for r in results],
    )

"""Property-suite command"""

import logging
from typing import Optional

import click

from models.optimizer import OptimizerConfig
from services.property_suites import SUITES, run_suite
from services.reports import RunReport

from .common import output_option, run_command

logger = logging.getLogger(__name__)


@click.command("verify")
@click.option("--suite", required=True, help=f"One of: {', '.join(SUITES)}")
@click.option("--trials", type=click.IntRange(min=0), default=None, help="Defaults to the suite's own count")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--restarts", type=click.IntRange(min=1), default=None)
@click.option("--max-iters", type=click.IntRange(min=1), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@output_option
@run_command
def verify(suite: str, trials: Optional[int], seed: int, restarts: Optional[int],
           max_iters: Optional[int], workers: Optional[int]) -> RunReport:
    """Run a seeded property suite; exits 1 when any trial violates its law"""
    cfg = OptimizerConfig.for_verification(
        seed=seed, restarts=restarts, max_iters=max_iters, workers=workers
    )
    result = run_suite(suite, trials, seed, cfg)
    report = RunReport(
        command="verify",
        seed=seed,
        value=result.worst_violation,
        values={"suite": result.suite, "trials": result.trials, "failures": result.failures},
        diagnostics=dict(result.details),
        passed=result.passed,
    )
    report.lines.append(f"{result.suite}: {'PASS' if result.passed else 'FAIL'}")
    return report

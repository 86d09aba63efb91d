"""Random searches: the SU(2) pairwise/global paradox and fidelity/Holevo order disagreement"""

import logging

import click

from models.distinguish import paradox_ensembles
from models.searches import (SearchConfig, check_paradox,
                             order_disagreement_search, paradox_search)
from services.reports import RunReport

from .common import output_option, run_command

logger = logging.getLogger(__name__)


@click.command("paradox")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--trials", type=click.IntRange(min=0), default=200, show_default=True)
@click.option("--size", type=click.IntRange(min=2), default=3, show_default=True, help="Members per ensemble")
@click.option("--verify-ex3", "verify_ex3", is_flag=True, help="Also check the bundled ex3_u/ex3_v triples")
@output_option
@run_command
def paradox(seed: int, trials: int, size: int, verify_ex3: bool) -> RunReport:
    """
    Search Haar-random SU(2) ensembles for a pair where every member pair of
    one is less distinguishable, yet the whole ensemble is more distinguishable
    """
    hits = paradox_search(SearchConfig(seed=seed, trials=trials), size=size)
    report = RunReport(
        command="paradox",
        seed=seed,
        values={"trials": trials, "hits": len(hits)},
        diagnostics={"hits": [hit.to_dict() for hit in hits]},
    )
    if verify_ex3:
        first, second = paradox_ensembles()
        check = check_paradox(first, second)
        report.values["ex3_values"] = [check.first_value, check.second_value]
        report.lines.append("ex3: PARADOX CONFIRMED" if check.qualifies else "ex3: PARADOX NOT CONFIRMED")
        report.passed = check.qualifies
    return report


@click.command("order-search")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--trials", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--pure-only", is_flag=True, help="Draw pure members only")
@output_option
@run_command
def order_search(seed: int, trials: int, pure_only: bool) -> RunReport:
    """Search qubit ensemble pairs that fidelity and Holevo quantity rank in opposite orders"""
    witnesses = order_disagreement_search(SearchConfig(seed=seed, trials=trials, pure_only=pure_only))
    return RunReport(
        command="order-search",
        seed=seed,
        values={"trials": trials, "witnesses": len(witnesses)},
        diagnostics={"witnesses": [w.to_dict() for w in witnesses]},
    )

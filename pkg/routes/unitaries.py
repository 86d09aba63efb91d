"""Closed-form commands for unitary operations"""

import logging
from typing import List

import click
import numpy as np

from models.distinguish import (copies_upper_bound, min_copies_perfect,
                                su2_distinguishability,
                                two_unitary_distinguishability,
                                two_unitary_min_overlap)
from models.errors import FixtureError, NeverDistinguishable
from services.reports import RunReport

from .common import load_inputs, output_option, run_command

logger = logging.getLogger(__name__)


def _unitaries(fixture) -> List[np.ndarray]:
    if not fixture.operations or any(r.type != "unitary" for r in fixture.operations):
        raise FixtureError(f"Fixture {fixture.label} must contain only unitary operations")
    # channel() runs the unitarity check
    return [record.channel().u for record in fixture.operations]


@click.command("su2")
@click.argument("fixture")
@output_option
@run_command
def su2(fixture: str) -> RunReport:
    """Exact distinguishability of an SU(2) ensemble"""
    (loaded,), digest = load_inputs(fixture)
    ensemble = loaded.su2_ensemble()
    value, _ = su2_distinguishability(ensemble)
    overlaps = ensemble.pairwise_overlaps()
    return RunReport(
        command="su2",
        inputs_digest=digest,
        value=value,
        values={"pairwise_overlaps": [overlaps[k] for k in sorted(overlaps)]},
        bound_kind="exact",
    )


@click.command("pair")
@click.argument("fixture")
@output_option
@run_command
def pair(fixture: str) -> RunReport:
    """Minimum probe overlap of the first two unitaries, with their two-member distinguishability"""
    (loaded,), digest = load_inputs(fixture)
    unitaries = _unitaries(loaded)
    if len(unitaries) < 2:
        raise FixtureError(f"Fixture {loaded.label} needs two unitaries")
    weights = loaded.weights()
    total = weights[0] + weights[1]
    return RunReport(
        command="pair",
        inputs_digest=digest,
        value=two_unitary_min_overlap(unitaries[0], unitaries[1]),
        values={
            "distinguishability": two_unitary_distinguishability(
                unitaries[0], unitaries[1], weights[0] / total, weights[1] / total
            )
        },
        bound_kind="exact",
    )


@click.command("min-copies")
@click.argument("fixture")
@output_option
@run_command
def min_copies(fixture: str) -> RunReport:
    """Fewest parallel copies making the first two unitaries perfectly distinguishable"""
    (loaded,), digest = load_inputs(fixture)
    unitaries = _unitaries(loaded)
    if len(unitaries) < 2:
        raise FixtureError(f"Fixture {loaded.label} needs two unitaries")
    try:
        copies = min_copies_perfect(unitaries[0], unitaries[1])
    except NeverDistinguishable as e:
        logger.info(f"{loaded.label}: {e}")
        copies = "never"
    return RunReport(command="min-copies", inputs_digest=digest, values={"copies": copies})


@click.command("copies-bound")
@click.argument("fixture")
@output_option
@run_command
def copies_bound(fixture: str) -> RunReport:
    """Upper bound on the copies needed to tell every unitary of FIXTURE apart"""
    (loaded,), digest = load_inputs(fixture)
    unitaries = _unitaries(loaded)
    try:
        bound = copies_upper_bound(unitaries)
    except NeverDistinguishable as e:
        logger.info(f"{loaded.label}: {e}")
        bound = "never"
    return RunReport(command="copies-bound", inputs_digest=digest, values={"copies": bound})

"""Commands over channel ensembles: distinguishability, fidelity, capacity"""

import logging

import click

from models.distinguish import (capacity as channel_capacity, dist_ops as run_dist_ops,
                                eb_finite_copy_check, eb_overlap_condition,
                                fidelity_ops)
from models.errors import FixtureError
from models.qchannel import EBChannel
from services.reports import RunReport

from .common import (load_inputs, optimizer_config, optimizer_options,
                     output_option, run_command)

logger = logging.getLogger(__name__)


def _first_two(fixture):
    channels = fixture.channels()
    if len(channels) < 2:
        raise FixtureError(f"Fixture {fixture.label} needs at least two operations, has {len(channels)}")
    if len(channels) > 2:
        logger.info(f"Using the first two of {len(channels)} operations in {fixture.label}")
    return channels[0], channels[1]


@click.command("dist-ops")
@click.argument("fixture")
@optimizer_options
@output_option
@run_command
def dist_ops(fixture: str, **optimizer) -> RunReport:
    """Lower bound on the distinguishability D(E) of a channel ensemble"""
    (loaded,), digest = load_inputs(fixture)
    cfg = optimizer_config(**optimizer)
    result = run_dist_ops(loaded.channel_ensemble(), cfg)
    return RunReport.from_optimization("dist-ops", result, inputs_digest=digest, seed=cfg.seed)


@click.command("fid-ops")
@click.argument("fixture")
@optimizer_options
@output_option
@run_command
def fid_ops(fixture: str, **optimizer) -> RunReport:
    """Upper bound on the fidelity of the first two operations of FIXTURE"""
    (loaded,), digest = load_inputs(fixture)
    e1, e2 = _first_two(loaded)
    cfg = optimizer_config(**optimizer)
    result = fidelity_ops(e1, e2, cfg)
    return RunReport.from_optimization("fid-ops", result, inputs_digest=digest, seed=cfg.seed)


@click.command("capacity")
@click.argument("fixture")
@optimizer_options
@output_option
@run_command
def capacity(fixture: str, **optimizer) -> RunReport:
    """Lower bound on the capacity of the operations of FIXTURE; their weights are ignored"""
    (loaded,), digest = load_inputs(fixture)
    cfg = optimizer_config(**optimizer)
    result = channel_capacity(loaded.channels(), cfg)
    return RunReport.from_optimization("capacity", result, inputs_digest=digest, seed=cfg.seed)


@click.command("eb-check")
@click.argument("fixture")
@click.option("--copies", type=click.IntRange(1, 2), default=2, show_default=True)
@optimizer_options
@output_option
@run_command
def eb_check(fixture: str, copies: int, **optimizer) -> RunReport:
    """
    Minimized fidelity of the copies-fold tensor powers of two qubit channels;
    a value well above zero suggests they stay imperfectly distinguishable
    """
    (loaded,), digest = load_inputs(fixture)
    e1, e2 = _first_two(loaded)
    cfg = optimizer_config(**optimizer)
    check = eb_finite_copy_check(e1, e2, copies, cfg)

    report = RunReport.from_optimization("eb-check", check.result, inputs_digest=digest, seed=cfg.seed)
    report.values["copies"] = copies
    report.lines.append(
        "not perfectly distinguishable" if check.not_perfectly_distinguishable
        else "perfect distinguishability not ruled out"
    )
    if isinstance(e1, EBChannel) and isinstance(e2, EBChannel):
        report.values["overlap_condition"] = eb_overlap_condition(e1, e2)
    return report

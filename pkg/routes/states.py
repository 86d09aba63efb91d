"""State-level commands: entropy, Holevo quantity and fidelity"""

import logging
from typing import Optional

import click

from models.errors import FixtureError
from models.qstate import (fidelity_purification_search, holevo_quantity,
                           uhlmann_fidelity, von_neumann_entropy)
from services.reports import RunReport

from .common import (load_inputs, optimizer_config, optimizer_options,
                     output_option, run_command)

logger = logging.getLogger(__name__)


@click.command("entropy")
@click.argument("fixture")
@output_option
@run_command
def entropy(fixture: str) -> RunReport:
    """von Neumann entropy (bits) of the ensemble average state and of each member"""
    (loaded,), digest = load_inputs(fixture)
    ensemble = loaded.state_ensemble()
    return RunReport(
        command="entropy",
        inputs_digest=digest,
        value=von_neumann_entropy(ensemble.average()),
        values={"members": [von_neumann_entropy(s) for s in ensemble.states]},
        bound_kind="exact",
    )


@click.command("holevo")
@click.argument("fixture")
@output_option
@run_command
def holevo(fixture: str) -> RunReport:
    """Holevo quantity of a state ensemble"""
    (loaded,), digest = load_inputs(fixture)
    return RunReport(
        command="holevo",
        inputs_digest=digest,
        value=holevo_quantity(loaded.state_ensemble()),
        bound_kind="exact",
    )


@click.command("fidelity")
@click.argument("fixture")
@click.argument("other", required=False)
@click.option("--search", is_flag=True, help="Also maximize over purifications as a cross-check")
@optimizer_options
@output_option
@run_command
def fidelity(fixture: str, other: Optional[str], search: bool, **optimizer) -> RunReport:
    """
    Uhlmann fidelity of the first two states of FIXTURE, or of the first
    states of FIXTURE and OTHER
    """
    references = [fixture] + ([other] if other else [])
    fixtures, digest = load_inputs(*references)
    states = [s for f in fixtures for s in f.density_matrices()[: 1 if other else 2]]
    if len(states) < 2:
        raise FixtureError("fidelity needs two states")

    report = RunReport(
        command="fidelity",
        inputs_digest=digest,
        value=uhlmann_fidelity(states[0], states[1]),
        bound_kind="exact",
    )
    if search:
        cfg = optimizer_config(**optimizer)
        result = fidelity_purification_search(states[0], states[1], cfg)
        report.seed = cfg.seed
        report.values["purification_search"] = result.value
        report.diagnostics = result.diagnostics()
    return report

import json
import math
import os
import sys

import numpy as np
import pytest
from click.testing import CliRunner

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import cli
from models.distinguish import SU2Ensemble, paradox_ensembles
from models.optimizer import OptimizerConfig
from models.qchannel import ChannelEnsemble, pauli_channels
from models.qstate import DensityMatrix, PureState


@pytest.fixture
def runner():
    """Click test runner for the qdist command group"""
    return CliRunner()


@pytest.fixture
def invoke(runner):
    """Run `qdist <args>` and return the click Result"""

    def _invoke(*args):
        return runner.invoke(cli, [str(a) for a in args])

    return _invoke


@pytest.fixture
def small_cfg():
    """Optimizer budget small enough for unit tests"""
    return OptimizerConfig(restarts=4, max_iters=300, seed=7)


@pytest.fixture
def tiny_cfg():
    """Single short restart; only for plumbing checks"""
    return OptimizerConfig(restarts=1, max_iters=20, seed=0)


@pytest.fixture
def pauli_ensemble():
    return ChannelEnsemble.uniform(pauli_channels())


@pytest.fixture
def ex3_ensembles():
    """(U, V) triples of the pairwise/global paradox"""
    return paradox_ensembles()


@pytest.fixture
def ket0():
    return PureState.basis(2, 0)


@pytest.fixture
def ket_plus():
    return PureState([1 / math.sqrt(2), 1 / math.sqrt(2)])


@pytest.fixture
def commuting_pair():
    """diag(0.5, 0.5) and diag(0.8, 0.2)"""
    return DensityMatrix(np.diag([0.5, 0.5])), DensityMatrix(np.diag([0.8, 0.2]))


@pytest.fixture
def random_su2_pair():
    """Factory for seeded two-member SU(2) ensembles"""

    def _make(seed):
        return SU2Ensemble.random(2, [seed])

    return _make


@pytest.fixture
def report_of():
    """Parse the JSON report out of command output that may also carry log lines"""

    def _parse(output: str) -> dict:
        return json.loads(output[output.index("{"): output.rindex("}") + 1])

    return _parse

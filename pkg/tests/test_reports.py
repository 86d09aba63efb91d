import json

import numpy as np
import pytest

from models.errors import ConfigurationError, NotPSD, QDistError
from models.optimizer import OptimizationResult, ProbeState
from models.settings import Tolerances, env_int
from services.reports import RunReport


def optimization(value=1.25, bound_kind="lower", prior=None):
    result = OptimizationResult(
        value=value,
        probe=None,
        restarts_run=2,
        converged=True,
        per_restart_values=[value, value - 0.5],
        bound_kind=bound_kind,
        iterations=[10, 12],
        evaluations=100,
        converged_restarts=2,
        best_restart=0,
        point=np.zeros(8),
    )
    result = result.with_probe(ProbeState.maximally_entangled(2))
    return result.with_prior(prior) if prior is not None else result


class TestRunReport:

    def test_text_marks_lower_bound(self):
        """Optimizer values carry their bound kind"""
        report = RunReport.from_optimization("dist-ops", optimization(), seed=3)
        text = report.to_text()
        assert text.splitlines()[0] == "1.250000 (lower bound)"
        assert "seed: 3" in text
        assert "restarts_run=2" in text

    def test_exact_values_have_no_suffix(self):
        """Closed-form results print the bare value"""
        report = RunReport("su2", value=1.138, bound_kind="exact", values={"pairwise_overlaps": [0.5, 0.25]})
        lines = report.to_text().splitlines()
        assert lines[0] == "1.138000"
        assert lines[1] == "pairwise_overlaps: [0.500000, 0.250000]"

    def test_prior_is_reported(self):
        """Capacity priors land in values"""
        report = RunReport.from_optimization("capacity", optimization(prior=[0.25, 0.75]))
        assert report.values["prior"] == [0.25, 0.75]

    def test_json_round_trip(self):
        """from_json(to_json()) restores the report"""
        report = RunReport.from_optimization("fid-ops", optimization(0.5, "upper"), inputs_digest="ab", seed=1)
        report.wall_time = 0.25
        again = RunReport.from_json(report.to_json())
        assert again == report
        assert json.loads(report.to_json())["probe"][0] == pytest.approx([2 ** -0.5, 0.0])

    def test_stable_dict_drops_wall_time(self):
        """Timing is the only field allowed to vary between runs"""
        first = RunReport("entropy", value=1.0, wall_time=0.1)
        second = RunReport("entropy", value=1.0, wall_time=2.0)
        assert "wall_time" not in first.stable_dict()
        assert first.stable_dict() == second.stable_dict()


class TestErrors:

    def test_residual_in_message(self):
        """Errors with a residual print it"""
        assert str(NotPSD("Negative eigenvalue", residual=0.001)) == "Negative eigenvalue (residual 1.000e-03)"

    def test_no_residual(self):
        """Without a residual only the message is shown"""
        error = QDistError("plain")
        assert str(error) == "plain"
        assert error.residual is None


class TestSettings:

    def test_defaults(self, monkeypatch):
        """Unset variables keep the documented defaults"""
        monkeypatch.delenv("QDIST_TOL_HERMITIAN", raising=False)
        assert Tolerances.from_env().hermitian == 1e-9

    def test_override(self, monkeypatch):
        """QDIST_TOL_* overrides a single tolerance"""
        monkeypatch.setenv("QDIST_TOL_UNITARITY", "1e-6")
        assert Tolerances.from_env().unitarity == 1e-6

    @pytest.mark.parametrize("raw", ["abc", "-1", "0"])
    def test_rejects_bad_tolerance(self, monkeypatch, raw):
        """Tolerances must be positive numbers"""
        monkeypatch.setenv("QDIST_TOL_TRACE", raw)
        with pytest.raises(ConfigurationError):
            Tolerances.from_env()

    def test_env_int_minimum(self, monkeypatch):
        """Integers below the minimum are rejected"""
        monkeypatch.setenv("QDIST_TEST_INT", "0")
        with pytest.raises(ConfigurationError):
            env_int("QDIST_TEST_INT", 5)
        monkeypatch.setenv("QDIST_TEST_INT", "")
        assert env_int("QDIST_TEST_INT", 5) == 5

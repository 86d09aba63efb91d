import pytest

from models.errors import UnknownSuite
from models.optimizer import OptimizerConfig
from services.property_suites import (DEFAULT_TRIALS, SUITES, SuiteReport,
                                      run_suite)

EXACT_SUITES = [
    "holevo-mono",
    "fidelity-mono",
    "prop1",
    "majorization",
    "channel-laws",
    "holevo-additivity",
    "strong-subadditivity",
    "gram-spectrum",
]

OPTIMIZER_SUITES = ["prop2", "prop3", "prop4", "prop8"]


class TestSuiteReport:

    def test_record_counts_failures(self):
        """Only violations above the limit fail; the worst is kept"""
        report = SuiteReport("demo", trials=3, seed=0)
        report.record(1e-12, 1e-9)
        report.record(0.5, 1e-9)
        report.record(0.1, 1e-9)
        assert report.failures == 2
        assert report.worst_violation == 0.5
        assert not report.passed

    def test_note_max(self):
        """note_max keeps the largest value per key"""
        report = SuiteReport("demo", trials=1, seed=0)
        report.note_max("gap", -0.2)
        report.note_max("gap", -0.4)
        assert report.details == {"gap": -0.2}


class TestRunSuite:

    def test_tables_agree(self):
        """Every suite has a default trial count"""
        assert set(SUITES) == set(DEFAULT_TRIALS)

    def test_unknown_suite(self):
        """Unknown names raise UnknownSuite listing the choices"""
        with pytest.raises(UnknownSuite) as exc:
            run_suite("prop9")
        assert "majorization" in str(exc.value)

    @pytest.mark.parametrize("name", EXACT_SUITES)
    def test_exact_suites_pass(self, name):
        """Closed-form laws hold on a short run"""
        report = run_suite(name, trials=20, seed=0)
        assert report.passed, f"{name}: worst violation {report.worst_violation:.3e}"
        assert report.trials == 20
        assert report.suite == name

    @pytest.mark.parametrize("name", OPTIMIZER_SUITES)
    def test_optimizer_suites_pass(self, name):
        """Optimizer-backed bounds hold with a short search"""
        cfg = OptimizerConfig(restarts=1, max_iters=20, seed=0)
        report = run_suite(name, trials=1, seed=0, cfg=cfg)
        assert report.passed, f"{name}: worst violation {report.worst_violation:.3e}"

    def test_zero_trials_pass(self):
        """An empty run has nothing to fail"""
        report = run_suite("majorization", trials=0)
        assert report.passed
        assert report.worst_violation == 0.0

    def test_deterministic(self):
        """Same seed, same worst violation"""
        first = run_suite("holevo-additivity", trials=10, seed=4)
        second = run_suite("holevo-additivity", trials=10, seed=4)
        assert first.worst_violation == second.worst_violation

    def test_tensor_additivity_details(self):
        """The product probe gap is reported"""
        cfg = OptimizerConfig(restarts=1, max_iters=10, seed=0)
        report = run_suite("prop4", trials=1, seed=2, cfg=cfg)
        assert report.details["max_product_probe_gap"] <= 5e-3

    def test_fidelity_suite_default_count(self):
        """Symmetry and monotonicity of F hold over the full default run, rank-deficient draws included"""
        report = run_suite("fidelity-mono", seed=0)
        assert report.trials == DEFAULT_TRIALS["fidelity-mono"]
        assert report.passed, f"worst violation {report.worst_violation:.3e}"

    def test_majorization_covers_indefinite_matrices(self):
        """Odd trials draw Hermitian matrices with negative eigenvalues"""
        report = run_suite("majorization", trials=20, seed=0)
        assert report.passed
        assert report.details["most_negative_eigenvalue"] > 0.0

    @pytest.mark.slow
    @pytest.mark.parametrize("name", sorted(SUITES))
    def test_default_runs_pass(self, name):
        """Full default trial counts with the verification budget"""
        assert run_suite(name, seed=0).passed

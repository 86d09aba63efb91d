import numpy as np
import pytest

from models.errors import ConfigurationError, DimensionMismatch
from models.optimizer import (OptimizationResult, OptimizerConfig, ProbeState,
                              SphereOptimizer)
from models.qstate import PureState

TARGET = np.array([0.6, 0.0, 0.8])


def alignment(x: np.ndarray) -> float:
    return float(np.dot(x, TARGET))


class TestOptimizerConfig:

    def test_defaults(self):
        """Defaults follow the documented budget"""
        cfg = OptimizerConfig()
        assert (cfg.restarts, cfg.max_iters, cfg.step_init, cfg.tol) == (64, 2000, 0.1, 1e-7)
        assert cfg.workers == 1

    @pytest.mark.parametrize("field,value", [("restarts", 0), ("max_iters", -1), ("tol", 0.0), ("tol", 2.0), ("seed", -1)])
    def test_rejects_invalid(self, field, value):
        """Non-positive budgets and tol >= 1 raise ConfigurationError"""
        with pytest.raises(ConfigurationError):
            OptimizerConfig(**{field: value})

    def test_from_env(self, monkeypatch):
        """QDIST_* variables set defaults; explicit overrides win"""
        monkeypatch.setenv("QDIST_RESTARTS", "5")
        monkeypatch.setenv("QDIST_SEED", "9")
        cfg = OptimizerConfig.from_env(seed=3)
        assert cfg.restarts == 5
        assert cfg.seed == 3

    def test_from_env_rejects_garbage(self, monkeypatch):
        """Non-numeric environment values raise ConfigurationError"""
        monkeypatch.setenv("QDIST_MAX_ITERS", "many")
        with pytest.raises(ConfigurationError):
            OptimizerConfig.from_env()

    def test_for_verification(self, monkeypatch):
        """Suites default to the smaller verification budget"""
        monkeypatch.delenv("QDIST_VERIFY_RESTARTS", raising=False)
        monkeypatch.delenv("QDIST_VERIFY_MAX_ITERS", raising=False)
        cfg = OptimizerConfig.for_verification(seed=4)
        assert (cfg.restarts, cfg.max_iters, cfg.seed) == (8, 400, 4)


class TestProbeState:

    def test_from_real_is_normalized(self):
        """Real coordinates map to a unit vector on d x d"""
        probe = ProbeState.from_real(np.arange(8, dtype=float), 2)
        assert np.linalg.norm(probe.vec) == pytest.approx(1.0)
        assert probe.vec[1] == pytest.approx((1 + 5j) / np.linalg.norm(np.arange(8)))

    def test_dimension_check(self):
        """A probe must live on dim_in x dim_in"""
        with pytest.raises(DimensionMismatch):
            ProbeState(PureState.basis(3, 0), 2)

    def test_maximally_entangled(self):
        """Equal-weight superposition of |ii>"""
        probe = ProbeState.maximally_entangled(2)
        assert np.allclose(probe.vec, np.array([1, 0, 0, 1]) / np.sqrt(2))
        assert probe.to_list()[0] == pytest.approx([2 ** -0.5, 0.0])


class TestSphereOptimizer:

    def test_finds_linear_maximum(self):
        """max <x, t> over the unit sphere is |t|"""
        result = SphereOptimizer(alignment, [3], OptimizerConfig(restarts=3, max_iters=500, seed=1)).run()
        assert result.value == pytest.approx(1.0, abs=1e-6)
        assert np.allclose(result.point, TARGET, atol=1e-3)
        assert result.bound_kind == "lower"

    def test_minimize(self):
        """maximize=False finds the minimum and labels an upper bound"""
        result = SphereOptimizer(alignment, [3], OptimizerConfig(restarts=3, max_iters=500, seed=1), maximize=False).run()
        assert result.value == pytest.approx(-1.0, abs=1e-6)
        assert result.bound_kind == "upper"

    def test_product_of_spheres(self):
        """Each block is normalized on its own"""

        def objective(x):
            return float(x[0] + x[2])

        result = SphereOptimizer(objective, [2, 2], OptimizerConfig(restarts=2, max_iters=500, seed=2)).run()
        assert result.value == pytest.approx(2.0, abs=1e-6)
        assert np.linalg.norm(result.point[:2]) == pytest.approx(1.0)
        assert np.linalg.norm(result.point[2:]) == pytest.approx(1.0)

    def test_deterministic_per_seed(self):
        """Same seed, identical per-restart values"""
        cfg = OptimizerConfig(restarts=4, max_iters=50, seed=11)
        first = SphereOptimizer(alignment, [3], cfg).run()
        second = SphereOptimizer(alignment, [3], cfg).run()
        assert first.per_restart_values == second.per_restart_values

    def test_workers_match_sequential(self):
        """Threaded restarts give bit-identical results"""
        sequential = SphereOptimizer(alignment, [3], OptimizerConfig(restarts=6, max_iters=40, seed=5)).run()
        threaded = SphereOptimizer(alignment, [3], OptimizerConfig(restarts=6, max_iters=40, seed=5, workers=3)).run()
        assert sequential.per_restart_values == threaded.per_restart_values
        assert sequential.best_restart == threaded.best_restart

    def test_ties_go_to_lowest_restart(self):
        """A constant objective picks restart 0"""
        result = SphereOptimizer(lambda x: 1.0, [3], OptimizerConfig(restarts=5, max_iters=10)).run()
        assert result.best_restart == 0
        assert result.converged

    def test_initial_point_used_first(self):
        """initial_points replace the first random starts"""
        result = SphereOptimizer(alignment, [3], OptimizerConfig(restarts=2, max_iters=1), initial_points=[TARGET]).run()
        assert result.per_restart_values[0] == pytest.approx(1.0)

    def test_initial_point_length_checked(self):
        """Starting points must match the coordinate count"""
        optimizer = SphereOptimizer(alignment, [3], OptimizerConfig(restarts=1), initial_points=[np.ones(2)])
        with pytest.raises(DimensionMismatch):
            optimizer.run()

    def test_diagnostics(self):
        """Diagnostics carry per-restart statistics"""
        result = SphereOptimizer(alignment, [3], OptimizerConfig(restarts=3, max_iters=30)).run()
        diagnostics = result.diagnostics()
        assert diagnostics["restarts_run"] == 3
        assert len(diagnostics["per_restart_values"]) == 3
        assert len(diagnostics["iterations"]) == 3
        assert diagnostics["evaluations"] > 0

    def test_non_convergence_is_reported(self):
        """A one-iteration budget is not enough on a slope"""
        result = SphereOptimizer(alignment, [3], OptimizerConfig(restarts=1, max_iters=1, seed=3)).run()
        assert isinstance(result, OptimizationResult)
        assert result.converged_restarts <= result.restarts_run

    def test_rejects_empty_blocks(self):
        """At least one non-empty sphere is required"""
        with pytest.raises(DimensionMismatch):
            SphereOptimizer(alignment, [], OptimizerConfig())

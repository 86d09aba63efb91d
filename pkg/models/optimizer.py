"""
Multi-start projected gradient search on products of unit spheres.

Every max/min over probe states in the package goes through SphereOptimizer:
the search variable is a real vector split into blocks, each block kept on
its own unit sphere. Gradients are central finite differences projected onto
the tangent space; the step is halved on non-improvement and regrown on
success. Restart r draws its starting point from default_rng([seed, r]), so
results do not depend on how restarts are scheduled across workers.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Literal, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionMismatch
from .qstate import PureState
from .settings import env_float, env_int

logger = logging.getLogger(__name__)

BoundKind = Literal["lower", "upper", "exact"]

MIN_STEP = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iters: int = 2000
    step_init: float = 0.1
    tol: float = 1e-7
    seed: int = 0
    fd_step: float = 1e-5
    workers: int = 1
    window: int = 10

    def __post_init__(self):
        for name in ("restarts", "max_iters", "workers", "window"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        for name in ("step_init", "tol", "fd_step"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        if self.tol >= 1:
            raise ConfigurationError(f"tol must be below 1, got {self.tol!r}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed!r}")

    @classmethod
    def from_env(cls, **overrides) -> "OptimizerConfig":
        """Defaults from QDIST_* variables; explicit non-None overrides win"""
        values = dict(
            restarts=env_int("QDIST_RESTARTS", cls.restarts),
            max_iters=env_int("QDIST_MAX_ITERS", cls.max_iters),
            step_init=env_float("QDIST_STEP_INIT", cls.step_init),
            tol=env_float("QDIST_TOL", cls.tol),
            seed=env_int("QDIST_SEED", cls.seed, minimum=0),
            fd_step=env_float("QDIST_FD_STEP", cls.fd_step),
            workers=env_int("QDIST_WORKERS", cls.workers),
            window=env_int("QDIST_WINDOW", cls.window),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @classmethod
    def for_verification(cls, **overrides) -> "OptimizerConfig":
        """Smaller budget used by the property suites"""
        base = dict(
            restarts=env_int("QDIST_VERIFY_RESTARTS", 8),
            max_iters=env_int("QDIST_VERIFY_MAX_ITERS", 400),
        )
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_env(**base)

    def with_seed(self, seed: int) -> "OptimizerConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class ProbeState:
    """Pure input state on dim_in (x) dim_in"""

    state: PureState
    dim_in: int

    def __post_init__(self):
        if self.state.dim != self.dim_in * self.dim_in:
            raise DimensionMismatch(
                f"Probe of dimension {self.state.dim} does not live on {self.dim_in}x{self.dim_in}"
            )

    @classmethod
    def from_real(cls, x: np.ndarray, dim_in: int) -> "ProbeState":
        """Unit real vector of length 2*dim_in^2 (real parts, then imaginary parts)"""
        n = dim_in * dim_in
        return cls(PureState.normalized(x[:n] + 1j * x[n: 2 * n]), dim_in)

    @classmethod
    def maximally_entangled(cls, dim_in: int) -> "ProbeState":
        vec = np.eye(dim_in, dtype=np.complex128).reshape(-1) / math.sqrt(dim_in)
        return cls(PureState(vec, check=False), dim_in)

    @property
    def vec(self) -> np.ndarray:
        return self.state.vec

    def to_list(self) -> List[List[float]]:
        return [[float(z.real), float(z.imag)] for z in self.vec]


@dataclass(frozen=True)
class OptimizationResult:
    value: float
    probe: Optional[ProbeState]
    restarts_run: int
    converged: bool
    per_restart_values: List[float]
    bound_kind: BoundKind = "lower"
    iterations: List[int] = field(default_factory=list)
    evaluations: int = 0
    converged_restarts: int = 0
    best_restart: int = 0
    prior: Optional[List[float]] = None
    argument: Optional[np.ndarray] = None
    point: Optional[np.ndarray] = None

    def with_probe(self, probe: ProbeState) -> "OptimizationResult":
        return replace(self, probe=probe)

    def with_prior(self, prior: Sequence[float]) -> "OptimizationResult":
        return replace(self, prior=[float(p) for p in prior])

    def with_argument(self, argument) -> "OptimizationResult":
        return replace(self, argument=argument)

    def as_exact(self, value: float) -> "OptimizationResult":
        return replace(self, value=value, bound_kind="exact")

    def diagnostics(self) -> dict:
        return {
            "restarts_run": self.restarts_run,
            "converged": self.converged,
            "converged_restarts": self.converged_restarts,
            "best_restart": self.best_restart,
            "per_restart_values": [float(v) for v in self.per_restart_values],
            "iterations": list(self.iterations),
            "evaluations": self.evaluations,
        }


@dataclass(frozen=True)
class _RestartOutcome:
    value: float
    point: np.ndarray
    iterations: int
    evaluations: int
    converged: bool


def _normalize_blocks(x: np.ndarray, bounds: Sequence[slice]) -> np.ndarray:
    for block in bounds:
        norm = np.linalg.norm(x[block])
        if norm == 0.0:
            x[block] = 0.0
            x[block.start] = 1.0
        else:
            x[block] /= norm
    return x


class SphereOptimizer:
    """
    Maximize (or minimize) a real objective over a product of unit spheres

    Args:
        objective: maps a real vector of length sum(blocks) to a float
        blocks: sizes of the consecutive sphere factors
        cfg: search budget and seed
        maximize: False turns the search into a minimization
        initial_points: optional starting points used for the first restarts
            in place of random draws
    """

    def __init__(
        self,
        objective: Callable[[np.ndarray], float],
        blocks: Sequence[int],
        cfg: OptimizerConfig,
        maximize: bool = True,
        initial_points: Sequence[np.ndarray] = (),
    ):
        if not blocks or any(b < 1 for b in blocks):
            raise DimensionMismatch(f"Invalid sphere blocks {list(blocks)}")
        self.objective = objective
        self.cfg = cfg
        self.maximize = maximize
        self.size = int(sum(blocks))
        self.initial_points = [np.asarray(p, dtype=float) for p in initial_points]

        offsets = np.cumsum([0, *blocks])
        self.bounds = [slice(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:])]

    def _signed(self, x: np.ndarray) -> float:
        value = float(self.objective(x))
        return value if self.maximize else -value

    def _gradient(self, x: np.ndarray) -> np.ndarray:
        h = self.cfg.fd_step
        grad = np.empty_like(x)
        probe = x.copy()
        for k in range(x.size):
            probe[k] = x[k] + h
            upper = self._signed(probe)
            probe[k] = x[k] - h
            lower = self._signed(probe)
            probe[k] = x[k]
            grad[k] = (upper - lower) / (2.0 * h)
        for block in self.bounds:
            grad[block] -= np.dot(grad[block], x[block]) * x[block]
        return grad

    def _start(self, restart: int) -> np.ndarray:
        if restart < len(self.initial_points):
            x = self.initial_points[restart].copy()
            if x.size != self.size:
                raise DimensionMismatch(f"Initial point has length {x.size}, expected {self.size}")
        else:
            rng = np.random.default_rng([self.cfg.seed, restart])
            x = rng.standard_normal(self.size)
        return _normalize_blocks(x, self.bounds)

    def _run_restart(self, restart: int) -> _RestartOutcome:
        cfg = self.cfg
        x = self._start(restart)
        f = self._signed(x)
        evaluations = 1
        step = cfg.step_init
        history = [f]
        converged = False
        iterations = 0

        for iterations in range(1, cfg.max_iters + 1):
            grad = self._gradient(x)
            evaluations += 2 * x.size
            norm = float(np.linalg.norm(grad))
            if norm < MIN_STEP:
                converged = True
                break

            candidate = _normalize_blocks(x + (step / norm) * grad, self.bounds)
            f_candidate = self._signed(candidate)
            evaluations += 1
            if f_candidate > f:
                x, f = candidate, f_candidate
                step = min(2.0 * step, cfg.step_init)
            else:
                step /= 2.0
                if step < MIN_STEP:
                    converged = True
                    break

            history.append(f)
            if len(history) > cfg.window and history[-1] - history[-1 - cfg.window] < cfg.tol:
                converged = True
                break

        value = f if self.maximize else -f
        logger.debug(
            f"Restart {restart}: value {value:.10f} after {iterations} iterations "
            f"(converged={converged})"
        )
        return _RestartOutcome(value, x, iterations, evaluations, converged)

    def run(self) -> OptimizationResult:
        restarts = range(self.cfg.restarts)
        if self.cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                outcomes = list(pool.map(self._run_restart, restarts))
        else:
            outcomes = [self._run_restart(r) for r in restarts]

        best = 0
        for index, outcome in enumerate(outcomes):
            better = (
                outcome.value > outcomes[best].value
                if self.maximize
                else outcome.value < outcomes[best].value
            )
            if better:
                best = index

        converged_count = sum(o.converged for o in outcomes)
        winner = outcomes[best]
        if converged_count == 0:
            logger.warning(f"No restart converged within {self.cfg.max_iters} iterations")
        logger.info(
            f"Sphere search ({'max' if self.maximize else 'min'}) over {self.size} coordinates: "
            f"best {winner.value:.10f} from restart {best}, "
            f"{converged_count}/{len(outcomes)} restarts converged"
        )

        point = winner.point.copy()
        point.flags.writeable = False
        return OptimizationResult(
            value=winner.value,
            probe=None,
            restarts_run=len(outcomes),
            converged=winner.converged,
            per_restart_values=[o.value for o in outcomes],
            bound_kind="lower" if self.maximize else "upper",
            iterations=[o.iterations for o in outcomes],
            evaluations=sum(o.evaluations for o in outcomes),
            converged_restarts=converged_count,
            best_restart=best,
            point=point,
        )

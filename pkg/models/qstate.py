"""
Quantum states and the state-level distinguishability measures: von Neumann
entropy, Holevo quantity, Uhlmann fidelity, purification and the Gram-matrix
spectrum device.
"""

import logging
import math
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import settings
from .errors import DimensionMismatch, NotNormalized, ValidationError
from .numkernel import (ComplexMatrix, ProbVector, Seed, Spectrum, Subsystem,
                        as_complex_matrix, as_complex_vector, clip_eigenvalues,
                        dagger, floor_spectrum, hermitian_eig, matrix_sqrt_psd, partial_trace,
                        random_unitary, require_square, rng_for,
                        shannon_entropy, tensor_product)

logger = logging.getLogger(__name__)


class DensityMatrix:
    """Positive semidefinite, unit-trace operator"""

    def __init__(self, mat, check: bool = True):
        self.mat = as_complex_matrix(mat)
        self.dim = require_square(self.mat)
        if check:
            self._validate()

    def _validate(self) -> None:
        tol = settings.TOLERANCES
        trace = complex(np.trace(self.mat))
        residual = abs(trace - 1.0)
        if residual > tol.trace:
            raise ValidationError(f"Density matrix trace is {trace.real:.12g}", residual=residual)
        # hermitian_eig checks Hermiticity; clip_eigenvalues checks positivity
        clip_eigenvalues(self.spectrum.values)

    @classmethod
    def from_pure(cls, state: "PureState") -> "DensityMatrix":
        return cls(np.outer(state.vec, state.vec.conj()), check=False)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim, check=False)

    @cached_property
    def spectrum(self) -> Spectrum:
        return hermitian_eig(self.mat)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum with numerical noise clipped to zero"""
        return clip_eigenvalues(self.spectrum.values)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(tensor_product(self.mat, other.mat), check=False)

    def reduce(self, dims: Tuple[int, int], keep: Subsystem = "A") -> "DensityMatrix":
        return DensityMatrix(partial_trace(self.mat, dims, keep), check=False)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


class PureState:
    """Unit vector in a dim-dimensional Hilbert space"""

    def __init__(self, vec, check: bool = True):
        self.vec = as_complex_vector(vec)
        self.dim = self.vec.size
        if check:
            norm = float(np.linalg.norm(self.vec))
            if abs(norm - 1.0) > settings.TOLERANCES.norm:
                raise NotNormalized(f"State vector has norm {norm:.12g}", residual=abs(norm - 1.0))

    @classmethod
    def normalized(cls, vec) -> "PureState":
        raw = np.asarray(vec, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(raw)
        if norm == 0.0:
            raise NotNormalized("Cannot normalize the zero vector")
        return cls(raw / norm, check=False)

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        vec = np.zeros(dim, dtype=np.complex128)
        vec[index] = 1.0
        return cls(vec, check=False)

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(np.kron(self.vec, other.vec), check=False)

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


class StateEnsemble:
    """Weighted collection {rho_i, p_i} sharing one dimension"""

    def __init__(self, weights, states: Sequence[DensityMatrix]):
        self.weights = weights if isinstance(weights, ProbVector) else ProbVector(weights)
        self.states: List[DensityMatrix] = [
            s.density() if isinstance(s, PureState) else s for s in states
        ]
        if len(self.weights) != len(self.states):
            raise DimensionMismatch(
                f"{len(self.weights)} weights for {len(self.states)} states"
            )
        dims = {s.dim for s in self.states}
        if len(dims) != 1:
            raise DimensionMismatch(f"Ensemble states have mixed dimensions {sorted(dims)}")
        self.dim = dims.pop()

    def __len__(self) -> int:
        return len(self.states)

    def average(self) -> DensityMatrix:
        total = sum(w * s.mat for w, s in zip(self.weights, self.states))
        return DensityMatrix(total, check=False)

    def map(self, channel: Callable[[DensityMatrix], DensityMatrix]) -> "StateEnsemble":
        """Ensemble of channel outputs with the same weights"""
        return StateEnsemble(self.weights, [channel(s) for s in self.states])

    def reduce(self, dims: Tuple[int, int], keep: Subsystem = "A") -> "StateEnsemble":
        return StateEnsemble(self.weights, [s.reduce(dims, keep) for s in self.states])

    def tensor(self, other: "StateEnsemble") -> "StateEnsemble":
        """Product ensemble {rho_i (x) sigma_j, p_i q_j}"""
        states = [a.tensor(b) for a in self.states for b in other.states]
        return StateEnsemble(self.weights.outer(other.weights), states)


def entropy_of_values(values: np.ndarray) -> float:
    """von Neumann entropy (bits) of an already clipped eigenvalue list"""
    return shannon_entropy(values)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return entropy_of_values(rho.eigenvalues())


def holevo_quantity(ensemble: StateEnsemble) -> float:
    """chi = S(sum p_i rho_i) - sum p_i S(rho_i)"""
    average = von_neumann_entropy(ensemble.average())
    mixed = sum(
        w * von_neumann_entropy(s) for w, s in zip(ensemble.weights, ensemble.states) if w > 0.0
    )
    return max(0.0, average - mixed)


def _clip_unit(value: float) -> float:
    return min(1.0, max(0.0, value))


def uhlmann_fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """F = tr[(sqrt(rho1) rho2 sqrt(rho1))^(1/2)]"""
    if rho1.dim != rho2.dim:
        raise DimensionMismatch(f"Cannot compare dimensions {rho1.dim} and {rho2.dim}")
    root = matrix_sqrt_psd(rho1.mat)
    inner = root @ rho2.mat @ root
    inner = (inner + dagger(inner)) / 2.0
    # ||inner|| <= ||rho1|| ||rho2||; rounding noise scales with that bound, not with F^2
    scale = float(rho1.spectrum.values[0] * rho2.spectrum.values[0])
    values = floor_spectrum(hermitian_eig(inner).values, scale)
    return _clip_unit(float(np.sum(np.sqrt(values))))


def fidelity_pure(phi: PureState, psi: PureState) -> float:
    if phi.dim != psi.dim:
        raise DimensionMismatch(f"Cannot compare dimensions {phi.dim} and {psi.dim}")
    return _clip_unit(float(abs(np.vdot(phi.vec, psi.vec))))


def purify(rho: DensityMatrix) -> PureState:
    """
    Canonical purification sum_i sqrt(lambda_i) |v_i> (x) |i> on dim x dim,
    with the ancilla basis indexed by descending eigenvalue
    """
    spectrum = rho.spectrum
    roots = np.sqrt(floor_spectrum(spectrum.values))
    # column i of the coefficient matrix is sqrt(lambda_i) v_i; row index is the system
    coefficients = spectrum.vectors * roots
    return PureState.normalized(coefficients.reshape(-1))


def fidelity_purification_search(rho1: DensityMatrix, rho2: DensityMatrix, cfg=None):
    """
    Uhlmann's purification maximum searched directly over ancilla unitaries

    Maximizes |<Phi1|(I (x) W)|Phi2>| over unitary W using the canonical
    purifications. W is parameterized as the polar factor of an unconstrained
    complex matrix. The returned OptimizationResult value is a lower bound on
    the fidelity; `argument` holds the best W.
    """
    from .optimizer import OptimizerConfig, SphereOptimizer

    if rho1.dim != rho2.dim:
        raise DimensionMismatch(f"Cannot compare dimensions {rho1.dim} and {rho2.dim}")
    cfg = cfg or OptimizerConfig.from_env()
    d = rho1.dim
    phi1 = purify(rho1).vec.reshape(d, d)
    phi2 = purify(rho2).vec.reshape(d, d)
    # <Phi1|(I (x) W)|Phi2> = tr(phi1^dagger phi2 W^T)
    overlap = dagger(phi1) @ phi2

    def ancilla_unitary(x: np.ndarray) -> np.ndarray:
        z = (x[: d * d] + 1j * x[d * d:]).reshape(d, d)
        u, _, vh = np.linalg.svd(z)
        return u @ vh

    def objective(x: np.ndarray) -> float:
        return float(abs(np.sum(overlap * ancilla_unitary(x))))

    result = SphereOptimizer(objective, [2 * d * d], cfg, maximize=True).run()
    return result.with_argument(ancilla_unitary(result.point))


def gram_matrix(weights, states: Sequence[PureState]) -> ComplexMatrix:
    """M_ij = sqrt(p_i p_j) <phi_i|phi_j>"""
    weights = weights if isinstance(weights, ProbVector) else ProbVector(weights)
    if len(weights) != len(states):
        raise DimensionMismatch(f"{len(weights)} weights for {len(states)} states")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionMismatch(f"States have mixed dimensions {sorted(dims)}")
    scaled = np.array([math.sqrt(w) * s.vec for w, s in zip(weights, states)])
    gram = scaled.conj() @ scaled.T
    gram = (gram + dagger(gram)) / 2.0
    gram.flags.writeable = False
    return gram


def pure_ensemble_distinguishability(weights, states: Sequence[PureState]) -> float:
    """S(sum p_i |phi_i><phi_i|), evaluated on the n x n Gram matrix"""
    values = clip_eigenvalues(hermitian_eig(gram_matrix(weights, states)).values)
    return entropy_of_values(values)


def strong_subadditivity_gap(rho: DensityMatrix, dims: Tuple[int, int, int]) -> float:
    """S(rho_12) + S(rho_23) - S(rho_123) - S(rho_2); non-negative for valid states"""
    d1, d2, d3 = dims
    if d1 * d2 * d3 != rho.dim:
        raise DimensionMismatch(f"Cannot split dimension {rho.dim} as {d1}x{d2}x{d3}")
    rho12 = rho.reduce((d1 * d2, d3), keep="A")
    rho23 = rho.reduce((d1, d2 * d3), keep="B")
    rho2 = rho12.reduce((d1, d2), keep="B")
    return (
        von_neumann_entropy(rho12)
        + von_neumann_entropy(rho23)
        - von_neumann_entropy(rho)
        - von_neumann_entropy(rho2)
    )


def random_pure_state(d: int, seed: Seed) -> PureState:
    rng = rng_for(seed)
    return PureState.normalized(rng.standard_normal(d) + 1j * rng.standard_normal(d))


def random_density_matrix(d: int, seed: Seed, rank: Optional[int] = None) -> DensityMatrix:
    """Induced-measure random state: G G^dagger / tr for a d x rank Ginibre G"""
    rank = rank or d
    rng = rng_for(seed)
    factor = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = factor @ dagger(factor)
    mat = mat / np.trace(mat).real
    return DensityMatrix((mat + dagger(mat)) / 2.0, check=False)


def random_mixed_unitary_state(d: int, seed: Seed, weights: Sequence[float]) -> DensityMatrix:
    """Convex mixture of Haar-rotated basis projectors; used where a fixed spectrum is wanted"""
    u = random_unitary(d, seed)
    mat = (u * np.asarray(weights, dtype=float)) @ dagger(u)
    return DensityMatrix((mat + dagger(mat)) / 2.0, check=False)

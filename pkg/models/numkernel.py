"""
Numeric kernel - dense complex linear algebra and classical probability
utilities shared by states, channels and the optimizers.

Matrices are plain numpy arrays (complex128, row-major, read-only once
validated). Eigenproblems on Hermitian input go through a cyclic complex
Jacobi solver so that every entropy and fidelity in the package is computed
by the same deterministic routine.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from . import settings
from .errors import (DimensionMismatch, InvalidProbability, NonFiniteValue,
                     NonSquare, NotHermitian, NotPSD)

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray
Seed = Union[int, Sequence[int]]
Subsystem = Literal["A", "B"]

MAX_JACOBI_SWEEPS = 100


def as_complex(value) -> complex:
    """Coerce a scalar to complex, rejecting NaN and infinities"""
    number = complex(value)
    if not (math.isfinite(number.real) and math.isfinite(number.imag)):
        raise NonFiniteValue(f"Non-finite complex value: {number}")
    return number


def as_complex_matrix(data) -> ComplexMatrix:
    """Validated, read-only complex128 matrix built from nested sequences or an array"""
    matrix = np.array(data, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise DimensionMismatch(f"Expected a non-empty 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteValue("Matrix contains NaN or infinite entries")
    matrix.flags.writeable = False
    return matrix


def as_complex_vector(data) -> np.ndarray:
    vector = np.array(data, dtype=np.complex128).reshape(-1)
    if vector.size < 1:
        raise DimensionMismatch("Expected a non-empty vector")
    if not np.all(np.isfinite(vector)):
        raise NonFiniteValue("Vector contains NaN or infinite entries")
    vector.flags.writeable = False
    return vector


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return m.conj().T


def require_square(m: ComplexMatrix) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"Expected a square matrix, got shape {m.shape}")
    return m.shape[0]


def hermitian_residual(m: ComplexMatrix) -> float:
    return float(np.max(np.abs(m - dagger(m))))


def unitarity_residual(m: ComplexMatrix) -> float:
    """Frobenius distance between U U^dagger and the identity; compare against TOLERANCES.unitarity"""
    m = np.asarray(m, dtype=np.complex128)
    n = require_square(m)
    return float(np.linalg.norm(m @ dagger(m) - np.eye(n)))


class ProbVector:
    """Probability distribution; tiny negative weights are clipped to zero"""

    def __init__(self, weights: Iterable[float]):
        raw = np.array(list(weights), dtype=float)
        if raw.ndim != 1 or raw.size == 0:
            raise InvalidProbability("A probability vector needs at least one weight")
        if not np.all(np.isfinite(raw)):
            raise NonFiniteValue("Probability weights must be finite")

        tol = settings.TOLERANCES
        if raw.min() < -tol.prob_clip:
            raise InvalidProbability(
                f"Negative weight {raw.min():.3e}", residual=float(-raw.min())
            )
        clipped = np.clip(raw, 0.0, None)
        total = clipped.sum()
        if abs(total - 1.0) > tol.prob_sum:
            raise InvalidProbability(
                f"Weights sum to {total!r}", residual=float(abs(total - 1.0))
            )

        self.weights = clipped / total
        self.weights.flags.writeable = False

    @classmethod
    def uniform(cls, n: int) -> "ProbVector":
        return cls(np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return self.weights.size

    def __iter__(self) -> Iterator[float]:
        return iter(float(w) for w in self.weights)

    def __getitem__(self, index: int) -> float:
        return float(self.weights[index])

    def __repr__(self) -> str:
        return f"ProbVector({self.weights.tolist()})"

    def outer(self, other: "ProbVector") -> "ProbVector":
        """Joint distribution p_i q_j flattened in row-major order"""
        return ProbVector(np.outer(self.weights, other.weights).reshape(-1))


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    vectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        return (self.vectors * self.values) @ dagger(self.vectors)


def _off_diagonal_mass(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    phase = apq / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    sp, sq = s * phase, s * phase.conjugate()

    col_p, col_q = a[:, p].copy(), a[:, q].copy()
    a[:, p] = c * col_p - sq * col_q
    a[:, q] = sp * col_p + c * col_q

    row_p, row_q = a[p, :].copy(), a[q, :].copy()
    a[p, :] = c * row_p - sp * row_q
    a[q, :] = sq * row_p + c * row_q

    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
    v[:, p] = c * vec_p - sq * vec_q
    v[:, q] = sp * vec_p + c * vec_q


def hermitian_eig(m: ComplexMatrix) -> Spectrum:
    """
    Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps

    Args:
        m: square matrix, Hermitian within the configured tolerance

    Returns:
        Spectrum with eigenvalues in descending order and eigenvectors as
        columns. Ties keep the order produced by the rotation schedule.
    """
    m = np.asarray(m, dtype=np.complex128)
    n = require_square(m)
    residual = hermitian_residual(m)
    if residual > settings.TOLERANCES.hermitian:
        raise NotHermitian("Matrix is not Hermitian", residual=residual)

    a = (m + dagger(m)) / 2.0
    v = np.eye(n, dtype=np.complex128)
    threshold = settings.TOLERANCES.jacobi * max(1.0, float(np.linalg.norm(a)))

    sweeps = 0
    while _off_diagonal_mass(a) >= threshold:
        if sweeps == MAX_JACOBI_SWEEPS:
            logger.warning(
                f"Jacobi solver stopped after {sweeps} sweeps with off-diagonal mass "
                f"{_off_diagonal_mass(a):.3e}"
            )
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)
        sweeps += 1

    values = a.diagonal().real.copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    values.flags.writeable = False
    vectors.flags.writeable = False
    return Spectrum(values=values, vectors=vectors)


def clip_eigenvalues(values: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues in [-psd_clip, 0); anything more negative is an error"""
    floor = -settings.TOLERANCES.psd_clip
    worst = float(values.min())
    if worst < floor:
        raise NotPSD(f"Eigenvalue {worst:.3e} below tolerance", residual=-worst)
    return np.clip(values, 0.0, None)


def floor_spectrum(values: np.ndarray, scale: Optional[float] = None) -> np.ndarray:
    """
    clip_eigenvalues, then zero every value below spectral_floor * scale

    scale defaults to the largest value. Pass the norm of the matrix the
    eigenvalues came from when rounding in its construction sets the noise
    level. Rank-deficient matrices come back with an exact null space.
    """
    clipped = clip_eigenvalues(values)
    if clipped.size == 0:
        return clipped
    reference = float(clipped.max()) if scale is None else scale
    return np.where(clipped < settings.TOLERANCES.spectral_floor * reference, 0.0, clipped)


def matrix_sqrt_psd(m: ComplexMatrix) -> ComplexMatrix:
    spectrum = hermitian_eig(m)
    roots = np.sqrt(floor_spectrum(spectrum.values))
    result = (spectrum.vectors * roots) @ dagger(spectrum.vectors)
    result.flags.writeable = False
    return result


def tensor_product(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    result = np.kron(a, b)
    result.flags.writeable = False
    return result


def _bipartite_view(m: ComplexMatrix, dims: Tuple[int, int]) -> np.ndarray:
    n = require_square(m)
    d_a, d_b = dims
    if d_a < 1 or d_b < 1 or d_a * d_b != n:
        raise DimensionMismatch(f"Cannot split dimension {n} as {d_a}x{d_b}")
    return np.asarray(m).reshape(d_a, d_b, d_a, d_b)


def partial_trace(m: ComplexMatrix, dims: Tuple[int, int], keep: Subsystem = "A") -> ComplexMatrix:
    """Trace out one factor of a bipartite operator on dims[0] x dims[1]"""
    view = _bipartite_view(m, dims)
    if keep == "A":
        result = np.einsum("ijkj->ik", view)
    elif keep == "B":
        result = np.einsum("ijil->jl", view)
    else:
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    result = np.ascontiguousarray(result)
    result.flags.writeable = False
    return result


def partial_transpose(m: ComplexMatrix, dims: Tuple[int, int], which: Subsystem = "B") -> ComplexMatrix:
    view = _bipartite_view(m, dims)
    if which == "B":
        swapped = view.transpose(0, 3, 2, 1)
    elif which == "A":
        swapped = view.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")
    result = np.ascontiguousarray(swapped).reshape(dims[0] * dims[1], -1)
    result.flags.writeable = False
    return result


def _as_weights(p: Union[ProbVector, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(p, ProbVector):
        return p.weights
    return np.asarray(p, dtype=float)


def majorizes(p: Union[ProbVector, Sequence[float]], q: Union[ProbVector, Sequence[float]]) -> bool:
    """True iff p majorizes q (q is "more mixed" than p)"""
    a, b = _as_weights(p), _as_weights(q)
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    slack = settings.TOLERANCES.majorization

    partial_a = np.cumsum(np.sort(a)[::-1])
    partial_b = np.cumsum(np.sort(b)[::-1])
    if abs(partial_a[-1] - partial_b[-1]) > slack:
        return False
    return bool(np.all(partial_a >= partial_b - slack))


def shannon_entropy(p: Union[ProbVector, Sequence[float]]) -> float:
    """Entropy in bits with 0 log 0 = 0"""
    weights = _as_weights(p)
    support = weights[weights > 0.0]
    return float(-np.sum(support * np.log2(support)))


def rng_for(seed: Seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_unitary(d: int, seed: Seed) -> ComplexMatrix:
    """Haar unitary: QR of a complex Ginibre matrix with the phases of R's diagonal removed"""
    if d < 1:
        raise DimensionMismatch(f"Dimension must be positive, got {d}")
    rng = rng_for(seed)
    ginibre = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2.0)
    q, r = np.linalg.qr(ginibre)
    diagonal = np.diag(r)
    phases = diagonal / np.abs(diagonal)
    result = q * phases
    result.flags.writeable = False
    return result

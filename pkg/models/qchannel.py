"""
Quantum channels (CPT maps) in operator-sum form.

Every channel is a KrausChannel. UnitaryChannel and EBChannel lower to Kraus
operators but keep their defining data (the unitary, or the prepared states
and measurement vectors) for the closed-form paths that need it.
"""

import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import settings
from .errors import (DimensionMismatch, IncompletePOVM, NotTracePreserving,
                     NotUnitary, ValidationError)
from .numkernel import (ComplexMatrix, ProbVector, Seed, as_complex_matrix,
                        as_complex_vector, dagger, random_unitary,
                        unitarity_residual)
from .qstate import DensityMatrix, PureState

logger = logging.getLogger(__name__)

PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
for _matrix in PAULI.values():
    _matrix.flags.writeable = False


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class KrausChannel:
    """rho -> sum_i A_i rho A_i^dagger with sum_i A_i^dagger A_i = I"""

    kind = "kraus"

    def __init__(self, ops: Sequence, check: bool = True):
        matrices = [as_complex_matrix(op) for op in ops]
        if not matrices:
            raise ValidationError("A channel needs at least one Kraus operator")
        shapes = {m.shape for m in matrices}
        if len(shapes) != 1:
            raise DimensionMismatch(f"Kraus operators have mixed shapes {sorted(shapes)}")
        self.ops = _readonly(np.stack(matrices))
        self.dim_out, self.dim_in = self.ops.shape[1:]
        if check:
            residual = self.completeness_residual()
            if residual > settings.TOLERANCES.completeness:
                raise NotTracePreserving("Kraus operators are not complete", residual=residual)

    @property
    def kraus_rank(self) -> int:
        return self.ops.shape[0]

    @property
    def is_unitary(self) -> bool:
        return False

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        return apply(self, rho)

    def completeness_residual(self) -> float:
        """Frobenius norm of sum_i A_i^dagger A_i - I"""
        total = np.einsum("iba,ibc->ac", self.ops.conj(), self.ops)
        return float(np.linalg.norm(total - np.eye(self.dim_in)))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim_in={self.dim_in}, dim_out={self.dim_out}, rank={self.kraus_rank})"


class UnitaryChannel(KrausChannel):
    """rho -> U rho U^dagger"""

    kind = "unitary"

    def __init__(self, u, check: bool = True):
        matrix = as_complex_matrix(u)
        if matrix.shape[0] != matrix.shape[1]:
            raise NotUnitary(f"Unitary must be square, got shape {matrix.shape}")
        if check:
            residual = unitarity_residual(matrix)
            if residual > settings.TOLERANCES.unitarity:
                raise NotUnitary("Matrix is not unitary", residual=residual)
        self.u = matrix
        super().__init__([matrix], check=False)

    @property
    def is_unitary(self) -> bool:
        return True


class EBChannel(KrausChannel):
    """
    Entanglement-breaking channel in measure-and-prepare form

    rho -> sum_i |phi_i><phi_i| <psi_i|rho|psi_i>, where the psi_i form a
    complete rank-one POVM and each phi_i is a normalized output state.
    """

    kind = "eb"

    def __init__(self, phis: Sequence, psis: Sequence, check: bool = True):
        if len(phis) != len(psis) or not phis:
            raise DimensionMismatch(f"{len(phis)} output states for {len(psis)} measurement vectors")
        self.phis: List[PureState] = [
            p if isinstance(p, PureState) else PureState(p, check=check) for p in phis
        ]
        self.psis: List[np.ndarray] = [as_complex_vector(v) for v in psis]
        if len({v.size for v in self.psis}) != 1 or len({p.dim for p in self.phis}) != 1:
            raise DimensionMismatch("Measurement vectors or output states have mixed dimensions")
        if check:
            residual = self.povm_residual()
            if residual > settings.TOLERANCES.completeness:
                raise IncompletePOVM("Measurement vectors do not resolve the identity", residual=residual)
        ops = [np.outer(phi.vec, psi.conj()) for phi, psi in zip(self.phis, self.psis)]
        super().__init__(ops, check=False)

    def povm_residual(self) -> float:
        d = self.psis[0].size
        total = sum(np.outer(v, v.conj()) for v in self.psis)
        return float(np.linalg.norm(total - np.eye(d)))


Channel = Union[KrausChannel, UnitaryChannel, EBChannel]


@dataclass(frozen=True)
class ChannelReport:
    passed: bool
    kind: str
    completeness_residual: float
    unitarity_residual: Optional[float] = None
    povm_residual: Optional[float] = None

    @property
    def max_residual(self) -> float:
        values = [self.completeness_residual, self.unitarity_residual, self.povm_residual]
        return max(v for v in values if v is not None)


def validate(ch: Channel) -> ChannelReport:
    """Report-style trace-preservation check; never raises for an invalid channel"""
    tol = settings.TOLERANCES
    completeness = ch.completeness_residual()
    passed = completeness <= tol.completeness
    unitarity = povm = None
    if isinstance(ch, UnitaryChannel):
        unitarity = unitarity_residual(ch.u)
        passed = passed and unitarity <= tol.unitarity
    if isinstance(ch, EBChannel):
        povm = ch.povm_residual()
        passed = passed and povm <= tol.completeness
    if not passed:
        logger.warning(f"{ch!r} failed validation (completeness residual {completeness:.3e})")
    return ChannelReport(passed, ch.kind, completeness, unitarity, povm)


def _finish_output(out: np.ndarray) -> DensityMatrix:
    out = (out + dagger(out)) / 2.0
    trace = float(np.trace(out).real)
    residual = abs(trace - 1.0)
    if residual > settings.TOLERANCES.channel_trace:
        raise NotTracePreserving(f"Channel output has trace {trace:.12g}", residual=residual)
    return DensityMatrix(out / trace, check=False)


def apply(ch: Channel, rho: DensityMatrix) -> DensityMatrix:
    if rho.dim != ch.dim_in:
        raise DimensionMismatch(f"Channel expects dimension {ch.dim_in}, state has {rho.dim}")
    if isinstance(ch, UnitaryChannel):
        return _finish_output(ch.u @ rho.mat @ dagger(ch.u))
    out = np.einsum("iab,bc,idc->ad", ch.ops, rho.mat, ch.ops.conj())
    return _finish_output(out)


def _ancilla_dim(ch: Channel, total: int) -> int:
    if total % ch.dim_in != 0:
        raise DimensionMismatch(f"Dimension {total} does not factor as {ch.dim_in} x k")
    return total // ch.dim_in


def branch_vectors(ch: Channel, state: PureState) -> np.ndarray:
    """
    Rows are (A_i (x) I_k)|phi>, so (E (x) I_k)(|phi><phi|) = sum_i |row_i><row_i|
    """
    k = _ancilla_dim(ch, state.dim)
    coefficients = state.vec.reshape(ch.dim_in, k)
    return np.einsum("iab,bk->iak", ch.ops, coefficients).reshape(ch.kraus_rank, -1)


def apply_extended(ch: Channel, state: Union[DensityMatrix, PureState]) -> DensityMatrix:
    """(E (x) I_k)(rho) for a state on dim_in x k"""
    k = _ancilla_dim(ch, state.dim)
    if isinstance(state, PureState):
        branches = branch_vectors(ch, state)
        return _finish_output(branches.T @ branches.conj())
    view = state.mat.reshape(ch.dim_in, k, ch.dim_in, k)
    out = np.einsum("iac,ckel,ibe->akbl", ch.ops, view, ch.ops.conj())
    size = ch.dim_out * k
    return _finish_output(out.reshape(size, size))


def transform_pure(ch: UnitaryChannel, state: PureState) -> PureState:
    """(U (x) I_k)|phi>; the output of a unitary channel on a pure state stays pure"""
    k = _ancilla_dim(ch, state.dim)
    out = (ch.u @ state.vec.reshape(ch.dim_in, k)).reshape(-1)
    return PureState(out, check=False)


def compose_sequential(e: Channel, f: Channel) -> KrausChannel:
    """e o f: apply f, then e"""
    if f.dim_out != e.dim_in:
        raise DimensionMismatch(f"Cannot feed dimension {f.dim_out} into a channel on {e.dim_in}")
    if isinstance(e, UnitaryChannel) and isinstance(f, UnitaryChannel):
        return UnitaryChannel(e.u @ f.u, check=False)
    ops = np.einsum("iab,jbc->ijac", e.ops, f.ops).reshape(-1, e.dim_out, f.dim_in)
    return KrausChannel(ops, check=False)


def compose_tensor(e: Channel, f: Channel) -> KrausChannel:
    if isinstance(e, UnitaryChannel) and isinstance(f, UnitaryChannel):
        return UnitaryChannel(np.kron(e.u, f.u), check=False)
    ops = [np.kron(a, b) for a in e.ops for b in f.ops]
    return KrausChannel(ops, check=False)


def tensor_power(ch: Channel, n: int) -> KrausChannel:
    if n < 1:
        raise ValidationError(f"Tensor power needs n >= 1, got {n}")
    return reduce(compose_tensor, [ch] * n)


def eb_to_kraus(ch: EBChannel) -> KrausChannel:
    """Kraus operators |phi_i><psi_i| of a measure-and-prepare channel"""
    residual = ch.povm_residual()
    if residual > settings.TOLERANCES.completeness:
        raise IncompletePOVM("Measurement vectors do not resolve the identity", residual=residual)
    return KrausChannel(ch.ops, check=False)


def _orthonormal_completion(columns: np.ndarray) -> List[np.ndarray]:
    """Extend orthonormal columns to a basis, scanning the standard basis in order"""
    n = columns.shape[0]
    basis = [columns[:, j] for j in range(columns.shape[1])]
    extra = []
    for j in range(n):
        if len(basis) == n:
            break
        w = np.zeros(n, dtype=np.complex128)
        w[j] = 1.0
        for _ in range(2):
            for b in basis:
                w = w - np.vdot(b, w) * b
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            w = w / norm
            basis.append(w)
            extra.append(w)
    return extra


def dilate(ch: Channel) -> Tuple[ComplexMatrix, int]:
    """
    Stinespring unitary on system (x) ancilla with the ancilla prepared in |0>

    Returns:
        (U, r) where r is the Kraus rank and
        tr_ancilla[U (rho (x) |0><0|) U^dagger] = E(rho)
    """
    if ch.dim_in != ch.dim_out:
        raise DimensionMismatch(f"Dilation needs a square channel, got {ch.dim_in} -> {ch.dim_out}")
    d, r = ch.dim_in, ch.kraus_rank
    if isinstance(ch, UnitaryChannel):
        return ch.u, 1

    # isometry rows are indexed by (system a, ancilla k)
    isometry = ch.ops.transpose(1, 0, 2).reshape(d * r, d)
    fill = iter(_orthonormal_completion(isometry))
    unitary = np.zeros((d * r, d * r), dtype=np.complex128)
    for col in range(d * r):
        if col % r == 0:
            unitary[:, col] = isometry[:, col // r]
        else:
            unitary[:, col] = next(fill)
    residual = unitarity_residual(unitary)
    if residual > settings.TOLERANCES.completeness:
        raise NotUnitary("Dilation did not produce a unitary", residual=residual)
    return _readonly(unitary), r


def random_channel(d: int, rank: int, seed: Seed) -> KrausChannel:
    """Random isometry d -> d*rank, sliced into rank Kraus blocks"""
    if not 1 <= rank <= d * d:
        raise ValidationError(f"Kraus rank must lie in [1, {d * d}], got {rank}")
    if rank == 1:
        return UnitaryChannel(random_unitary(d, seed), check=False)
    isometry = random_unitary(d * rank, seed)[:, :d]
    return KrausChannel(isometry.reshape(rank, d, d), check=False)


def identity_channel(d: int) -> UnitaryChannel:
    return UnitaryChannel(np.eye(d), check=False)


def pauli_channels() -> List[UnitaryChannel]:
    return [UnitaryChannel(PAULI[name], check=False) for name in "IXYZ"]


def depolarizing_channel(p: float = 1.0) -> KrausChannel:
    """Qubit depolarizing channel; p = 1 is the completely depolarizing map"""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"Depolarizing strength must lie in [0, 1], got {p}")
    weights = [1.0 - 3.0 * p / 4.0, p / 4.0, p / 4.0, p / 4.0]
    return KrausChannel([math.sqrt(w) * PAULI[name] for w, name in zip(weights, "IXYZ")])


def measure_reprepare_channel(d: int, outputs: Optional[Sequence[PureState]] = None) -> EBChannel:
    """Measure in the computational basis, prepare outputs[i] (|i> by default)"""
    basis = [PureState.basis(d, i) for i in range(d)]
    return EBChannel(outputs or basis, [b.vec for b in basis])


class ChannelEnsemble:
    """Weighted collection {E_i, p_i} with shared input and output dimensions"""

    def __init__(self, weights, channels: Sequence[Channel]):
        self.weights = weights if isinstance(weights, ProbVector) else ProbVector(weights)
        self.channels = list(channels)
        if len(self.weights) != len(self.channels):
            raise DimensionMismatch(f"{len(self.weights)} weights for {len(self.channels)} channels")
        dims = {(c.dim_in, c.dim_out) for c in self.channels}
        if len(dims) != 1:
            raise DimensionMismatch(f"Ensemble channels have mixed dimensions {sorted(dims)}")
        self.dim_in, self.dim_out = dims.pop()

    @classmethod
    def uniform(cls, channels: Sequence[Channel]) -> "ChannelEnsemble":
        return cls(ProbVector.uniform(len(channels)), channels)

    def __len__(self) -> int:
        return len(self.channels)

    @property
    def is_unitary(self) -> bool:
        return all(isinstance(c, UnitaryChannel) for c in self.channels)

    def post_compose(self, channel: Channel) -> "ChannelEnsemble":
        """{N o E_i, p_i}"""
        return ChannelEnsemble(self.weights, [compose_sequential(channel, c) for c in self.channels])

    def compose(self, other: "ChannelEnsemble") -> "ChannelEnsemble":
        """{E_i o F_j, p_i q_j}"""
        channels = [compose_sequential(e, f) for e in self.channels for f in other.channels]
        return ChannelEnsemble(self.weights.outer(other.weights), channels)

    def tensor(self, other: "ChannelEnsemble") -> "ChannelEnsemble":
        """{E_i (x) F_j, p_i q_j}"""
        channels = [compose_tensor(e, f) for e in self.channels for f in other.channels]
        return ChannelEnsemble(self.weights.outer(other.weights), channels)

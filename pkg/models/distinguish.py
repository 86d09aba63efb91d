"""
Distinguishability of quantum operations.

Channel fidelity F(E1, E2) and ensemble distinguishability D(E) are searched
over pure probe states on d (x) d with SphereOptimizer. Closed forms cover
pairs of unitaries (distance from the origin to the convex hull of the
eigenvalues of U1^dagger U2) and SU(2) ensembles (entropy of the matrix
sqrt(p_i p_j) tr(U_i^dagger U_j)/2, reached at the maximally entangled probe).
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from shapely.geometry import MultiPoint, Point

from . import settings
from .errors import (CrossCheckFailed, DimensionMismatch, NeverDistinguishable, NotSU2,
                     NotUnitary, ValidationError)
from .numkernel import (ComplexMatrix, ProbVector, Seed, as_complex_matrix,
                        clip_eigenvalues, dagger, floor_spectrum, hermitian_eig,
                        random_unitary, unitarity_residual)
from .optimizer import (OptimizationResult, OptimizerConfig, ProbeState,
                        SphereOptimizer)
from .qchannel import (Channel, ChannelEnsemble, EBChannel, UnitaryChannel,
                       branch_vectors, tensor_power)
from .qstate import PureState, entropy_of_values

logger = logging.getLogger(__name__)

UnitaryLike = Union[UnitaryChannel, ComplexMatrix, Sequence]

NOT_PERFECT_THRESHOLD = 1e-3
MAX_HULL_CHECK_COPIES = 64


def _unitary_matrix(u: UnitaryLike) -> ComplexMatrix:
    if isinstance(u, UnitaryChannel):
        return u.u
    return UnitaryChannel(u).u


# --- probe objectives -------------------------------------------------------


def _mixture_entropy(rows: np.ndarray) -> float:
    """Entropy of sum_k |row_k><row_k|, taken on whichever Gram side is smaller"""
    if rows.shape[0] <= rows.shape[1]:
        mat = rows.conj() @ rows.T
    else:
        mat = rows.T @ rows.conj()
    mat = (mat + dagger(mat)) / 2.0
    return entropy_of_values(clip_eigenvalues(hermitian_eig(mat).values))


def _trace_norm(m: np.ndarray) -> float:
    gram = dagger(m) @ m
    gram = (gram + dagger(gram)) / 2.0
    return float(np.sum(np.sqrt(floor_spectrum(hermitian_eig(gram).values))))


def _require_probe(dim_in: int, probe: ProbeState) -> None:
    if probe.dim_in != dim_in:
        raise DimensionMismatch(f"Probe lives on {probe.dim_in}x{probe.dim_in}, channels on {dim_in}")


def ensemble_holevo_at(ensemble: ChannelEnsemble, probe: ProbeState) -> float:
    """
    Holevo quantity of the output ensemble {(E_i (x) I)(|phi><phi|), p_i}

    Outputs of a pure probe are mixtures of the branch vectors (A_k (x) I)|phi>,
    so every entropy is evaluated on a Gram matrix of those vectors.
    """
    _require_probe(ensemble.dim_in, probe)
    branches = [branch_vectors(ch, probe.state) for ch in ensemble.channels]
    weighted = np.vstack([math.sqrt(w) * b for w, b in zip(ensemble.weights, branches)])
    average = _mixture_entropy(weighted)
    if ensemble.is_unitary:
        return max(0.0, average)
    members = sum(w * _mixture_entropy(b) for w, b in zip(ensemble.weights, branches) if w > 0.0)
    return max(0.0, average - members)


def probe_fidelity(e1: Channel, e2: Channel, probe: ProbeState) -> float:
    """F((E1 (x) I)(phi), (E2 (x) I)(phi)) as the trace norm of the branch overlap matrix"""
    _require_probe(e1.dim_in, probe)
    if isinstance(e1, UnitaryChannel) and isinstance(e2, UnitaryChannel):
        first, second = branch_vectors(e1, probe.state)[0], branch_vectors(e2, probe.state)[0]
        return min(1.0, float(abs(np.vdot(first, second))))
    overlaps = branch_vectors(e1, probe.state).conj() @ branch_vectors(e2, probe.state).T
    return min(1.0, max(0.0, _trace_norm(overlaps)))


def maximally_entangled_probe(d: int) -> ProbeState:
    return ProbeState.maximally_entangled(d)


def product_probe(phi1: ProbeState, phi2: ProbeState) -> ProbeState:
    """phi1 (x) phi2 reordered from (A1 B1 A2 B2) to (A1 A2)(B1 B2)"""
    d1, d2 = phi1.dim_in, phi2.dim_in
    joint = np.kron(phi1.vec, phi2.vec).reshape(d1, d1, d2, d2).transpose(0, 2, 1, 3)
    return ProbeState(PureState(joint.reshape(-1), check=False), d1 * d2)


def _probe_search(objective, dim_in: int, cfg: OptimizerConfig, maximize: bool,
                  initial: Sequence[ProbeState] = ()) -> OptimizationResult:
    starts = [np.concatenate([p.vec.real, p.vec.imag]) for p in initial]
    optimizer = SphereOptimizer(
        lambda x: objective(ProbeState.from_real(x, dim_in)),
        [2 * dim_in * dim_in],
        cfg,
        maximize=maximize,
        initial_points=starts,
    )
    result = optimizer.run()
    return result.with_probe(ProbeState.from_real(result.point, dim_in))


def dist_ops(ensemble: ChannelEnsemble, cfg: OptimizerConfig = None) -> OptimizationResult:
    """
    Lower bound on D(E) = max over probes of ensemble_holevo_at

    The first restart starts from the maximally entangled probe; the rest are
    random.
    """
    cfg = cfg or OptimizerConfig.from_env()
    d = ensemble.dim_in
    result = _probe_search(
        lambda probe: ensemble_holevo_at(ensemble, probe),
        d,
        cfg,
        maximize=True,
        initial=[maximally_entangled_probe(d)],
    )
    logger.info(f"D(E) lower bound {result.value:.6f} for {len(ensemble)} channels on d={d}")
    return result


def fidelity_ops(e1: Channel, e2: Channel, cfg: OptimizerConfig = None) -> OptimizationResult:
    """Upper bound on F(E1, E2) = min over probes of probe_fidelity"""
    if (e1.dim_in, e1.dim_out) != (e2.dim_in, e2.dim_out):
        raise DimensionMismatch(
            f"Channels map {e1.dim_in}->{e1.dim_out} and {e2.dim_in}->{e2.dim_out}"
        )
    cfg = cfg or OptimizerConfig.from_env()
    result = _probe_search(lambda probe: probe_fidelity(e1, e2, probe), e1.dim_in, cfg, maximize=False)
    logger.info(f"F(E1, E2) upper bound {result.value:.6f} on d={e1.dim_in}")
    return result


# --- unitary pairs ----------------------------------------------------------


def _relative_phases(u1: UnitaryLike, u2: UnitaryLike) -> np.ndarray:
    a, b = _unitary_matrix(u1), _unitary_matrix(u2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Unitaries have shapes {a.shape} and {b.shape}")
    eigenvalues = np.linalg.eigvals(dagger(a) @ b)
    return np.angle(eigenvalues)


def _hull_distance(phases: Sequence[float]) -> float:
    points = MultiPoint([(math.cos(t), math.sin(t)) for t in phases])
    distance = points.convex_hull.distance(Point(0.0, 0.0))
    return min(1.0, max(0.0, float(distance)))


def two_unitary_min_overlap(u1: UnitaryLike, u2: UnitaryLike) -> float:
    """
    min over probes of |<phi|(U1^dagger U2 (x) I)|phi>|

    Equals the distance from the origin to the convex hull of the eigenvalues
    of U1^dagger U2; zero when the hull contains the origin.
    """
    return _hull_distance(_relative_phases(u1, u2))


def eigenphase_arc(phases: Sequence[float]) -> float:
    """Length of the shortest arc of the unit circle holding every phase"""
    ordered = np.sort(np.mod(np.asarray(phases, dtype=float), 2.0 * math.pi))
    gaps = np.diff(np.append(ordered, ordered[0] + 2.0 * math.pi))
    return float(2.0 * math.pi - gaps.max())


def _n_fold_phases(phases: Sequence[float], n: int) -> List[float]:
    return [float(sum(combo)) for combo in combinations_with_replacement(phases, n)]


def min_copies_perfect(u1: UnitaryLike, u2: UnitaryLike) -> int:
    """
    Smallest N with U1^(x)N and U2^(x)N perfectly distinguishable

    Raises:
        DimensionMismatch: the unitaries are not 2x2
        NeverDistinguishable: the unitaries coincide up to a global phase
        CrossCheckFailed: the explicit hull at N or N-1 contradicts the arc width
    """
    perfect = settings.TOLERANCES.perfect
    phases = _relative_phases(u1, u2)
    if len(phases) != 2:
        raise DimensionMismatch(f"Copy counts need qubit unitaries, got dimension {len(phases)}")
    arc = eigenphase_arc(phases)
    if arc < perfect:
        raise NeverDistinguishable("Unitaries are equal up to a global phase", residual=arc)

    copies = max(1, math.ceil(math.pi / arc - 1e-9))
    if copies > MAX_HULL_CHECK_COPIES:
        logger.debug(f"Skipping hull cross-check for N={copies}")
        return copies

    at_n = _hull_distance(_n_fold_phases(phases, copies))
    below_n = _hull_distance(_n_fold_phases(phases, copies - 1)) if copies > 1 else 1.0
    if at_n > perfect:
        raise CrossCheckFailed(
            f"Arc width {arc:.12f} gives N={copies} but the hull misses the origin", residual=at_n
        )
    if below_n <= perfect:
        raise CrossCheckFailed(
            f"Arc width {arc:.12f} gives N={copies} but N={copies - 1} already reaches the origin",
            residual=below_n,
        )
    return copies


def copies_upper_bound(unitaries: Sequence[UnitaryLike]) -> int:
    """Sum of the m-1 largest pairwise copy counts"""
    if len(unitaries) < 2:
        raise ValidationError(f"Need at least two unitaries, got {len(unitaries)}")
    pairwise = sorted(
        (min_copies_perfect(a, b) for a, b in combinations(unitaries, 2)), reverse=True
    )
    return int(sum(pairwise[: len(unitaries) - 1]))


def two_unitary_distinguishability(u1: UnitaryLike, u2: UnitaryLike, p1: float, p2: float) -> float:
    """D of the two-element unitary ensemble; entropy of [[p1, r m], [r m, p2]], r = sqrt(p1 p2)"""
    weights = ProbVector([p1, p2])
    cross = math.sqrt(weights[0] * weights[1]) * two_unitary_min_overlap(u1, u2)
    mat = np.array([[weights[0], cross], [cross, weights[1]]], dtype=np.complex128)
    return entropy_of_values(clip_eigenvalues(hermitian_eig(mat).values))


# --- SU(2) ensembles --------------------------------------------------------


def haar_su2(seed: Seed) -> ComplexMatrix:
    u = np.array(random_unitary(2, seed))
    return u / np.sqrt(np.linalg.det(u))


class SU2Ensemble:
    """Weighted SU(2) unitaries {U_i, p_i}"""

    def __init__(self, weights, unitaries: Sequence):
        self.weights = weights if isinstance(weights, ProbVector) else ProbVector(weights)
        tol = settings.TOLERANCES
        matrices = []
        for index, u in enumerate(unitaries):
            matrix = u.u if isinstance(u, UnitaryChannel) else as_complex_matrix(u)
            if matrix.shape != (2, 2):
                raise NotSU2(f"Member {index} has shape {matrix.shape}, expected (2, 2)")
            residual = unitarity_residual(matrix)
            if residual > tol.unitarity:
                raise NotUnitary(f"Member {index} is not unitary", residual=residual)
            det_residual = abs(complex(np.linalg.det(matrix)) - 1.0)
            if det_residual > tol.su2_det:
                raise NotSU2(f"Member {index} does not have determinant 1", residual=det_residual)
            matrices.append(matrix)
        if len(matrices) != len(self.weights):
            raise DimensionMismatch(f"{len(self.weights)} weights for {len(matrices)} unitaries")
        self.unitaries: List[ComplexMatrix] = matrices

    @classmethod
    def uniform(cls, unitaries: Sequence) -> "SU2Ensemble":
        return cls(ProbVector.uniform(len(unitaries)), unitaries)

    @classmethod
    def random(cls, n: int, seed: Seed) -> "SU2Ensemble":
        """n Haar-random members with uniform weights; member i uses stream [*seed, i]"""
        base = [seed] if isinstance(seed, (int, np.integer)) else list(seed)
        return cls.uniform([haar_su2([*base, i]) for i in range(n)])

    @classmethod
    def from_channels(cls, ensemble: ChannelEnsemble) -> "SU2Ensemble":
        if not ensemble.is_unitary:
            raise NotSU2("Ensemble contains non-unitary channels")
        return cls(ensemble.weights, [c.u for c in ensemble.channels])

    def __len__(self) -> int:
        return len(self.unitaries)

    def channel_ensemble(self) -> ChannelEnsemble:
        return ChannelEnsemble(self.weights, [UnitaryChannel(u, check=False) for u in self.unitaries])

    def pairwise_overlaps(self) -> Dict[Tuple[int, int], float]:
        """|tr(U_i^dagger U_j)/2| for i < j"""
        return {
            (i, j): float(abs(np.trace(dagger(self.unitaries[i]) @ self.unitaries[j])) / 2.0)
            for i, j in combinations(range(len(self)), 2)
        }

    def permuted(self, order: Sequence[int]) -> "SU2Ensemble":
        return SU2Ensemble([self.weights[i] for i in order], [self.unitaries[i] for i in order])


def su2_gram(ensemble: SU2Ensemble) -> ComplexMatrix:
    """G_ij = sqrt(p_i p_j) tr(U_i^dagger U_j) / 2"""
    stacked = np.stack(ensemble.unitaries)
    traces = np.einsum("iba,jbc->ijac", stacked.conj(), stacked).trace(axis1=2, axis2=3)
    roots = np.sqrt(ensemble.weights.weights)
    gram = np.outer(roots, roots) * traces / 2.0
    gram = (gram + dagger(gram)) / 2.0
    gram.flags.writeable = False
    return gram


def su2_distinguishability(ensemble: SU2Ensemble) -> Tuple[float, ComplexMatrix]:
    """Exact D for an SU(2) ensemble: the entropy of su2_gram"""
    gram = su2_gram(ensemble)
    value = entropy_of_values(clip_eigenvalues(hermitian_eig(gram).values))
    return value, gram


# --- capacity and entanglement-breaking checks ------------------------------


def capacity(channels: Sequence[Channel], cfg: OptimizerConfig = None) -> OptimizationResult:
    """
    Lower bound on the single-letter capacity max over (prior, probe) of chi

    The prior is the elementwise square of a unit vector optimized jointly
    with the probe; the first restart starts at the uniform prior and the
    maximally entangled probe.
    """
    cfg = cfg or OptimizerConfig.from_env()
    channels = list(channels)
    if not channels:
        raise ValidationError("Capacity needs at least one channel")
    dims = {(c.dim_in, c.dim_out) for c in channels}
    if len(dims) != 1:
        raise DimensionMismatch(f"Channels have mixed dimensions {sorted(dims)}")
    n, d = len(channels), channels[0].dim_in
    probe_size = 2 * d * d

    def split(x: np.ndarray) -> Tuple[np.ndarray, ProbeState]:
        prior = x[:n] ** 2
        return prior / prior.sum(), ProbeState.from_real(x[n:], d)

    def objective(x: np.ndarray) -> float:
        prior, probe = split(x)
        return ensemble_holevo_at(ChannelEnsemble(prior, channels), probe)

    start_probe = maximally_entangled_probe(d).vec
    start = np.concatenate([np.full(n, 1.0 / math.sqrt(n)), start_probe.real, start_probe.imag])
    result = SphereOptimizer(objective, [n, probe_size], cfg, maximize=True, initial_points=[start]).run()
    prior, probe = split(result.point)
    logger.info(f"Capacity lower bound {result.value:.6f} for {n} channels on d={d}")
    return result.with_probe(probe).with_prior(prior)


@dataclass(frozen=True)
class FiniteCopyReport:
    copies: int
    fidelity_upper_bound: float
    not_perfectly_distinguishable: bool
    result: OptimizationResult


def eb_finite_copy_check(e1: Channel, e2: Channel, n: int, cfg: OptimizerConfig = None) -> FiniteCopyReport:
    """
    Minimized fidelity of the n-fold tensor powers, as evidence (not proof)
    that the two channels stay imperfectly distinguishable with n copies
    """
    if n not in (1, 2):
        raise ValidationError(f"Finite-copy check supports n = 1 or 2, got {n}")
    if e1.dim_in != 2 or e2.dim_in != 2:
        raise DimensionMismatch("Finite-copy check is defined for qubit channels")
    result = fidelity_ops(tensor_power(e1, n), tensor_power(e2, n), cfg)
    return FiniteCopyReport(
        copies=n,
        fidelity_upper_bound=result.value,
        not_perfectly_distinguishable=result.value > NOT_PERFECT_THRESHOLD,
        result=result,
    )


def eb_overlap_condition(e1: EBChannel, e2: EBChannel) -> bool:
    """True when every prepared state of e1 overlaps every prepared state of e2"""
    floor = settings.TOLERANCES.perfect
    return all(
        abs(np.vdot(a.vec, b.vec)) > floor for a in e1.phis for b in e2.phis
    )


# --- the three-member SU(2) pair with pairwise/global disagreement ----------


def su2_from_cosine(diagonal: float, phase_cos: float) -> ComplexMatrix:
    """[[c, s e^{-i t}], [-s e^{i t}, c]] with c = diagonal, s = sqrt(1 - c^2), cos t = phase_cos, sin t >= 0"""
    off = math.sqrt(1.0 - diagonal * diagonal)
    phase = complex(phase_cos, math.sqrt(max(0.0, 1.0 - phase_cos * phase_cos)))
    u = np.array(
        [[diagonal, off * phase.conjugate()], [-off * phase, diagonal]], dtype=np.complex128
    )
    u.flags.writeable = False
    return u


def paradox_ensembles() -> Tuple[SU2Ensemble, SU2Ensemble]:
    """
    Two uniform SU(2) triples where every pair of the first is less
    distinguishable than the matching pair of the second, yet the first
    triple as a whole is more distinguishable

    Pair overlaps are 1/sqrt(2), 1/sqrt(3), 1/4 against 1/sqrt(2.1),
    1/sqrt(3.1), 0.
    """
    first = SU2Ensemble.uniform([
        np.eye(2),
        su2_from_cosine(math.sqrt(1.0 / 2.0), 1.0),
        su2_from_cosine(math.sqrt(1.0 / 3.0), math.sqrt(3.0) / 4.0 - 1.0 / math.sqrt(2.0)),
    ])
    second = SU2Ensemble.uniform([
        np.eye(2),
        su2_from_cosine(math.sqrt(1.0 / 2.1), 1.0),
        su2_from_cosine(math.sqrt(1.0 / 3.1), -1.0 / math.sqrt(2.1 * 1.1)),
    ])
    return first, second

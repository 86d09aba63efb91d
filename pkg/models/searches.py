"""
Randomized searches for orderings that disagree.

paradox_search looks for pairs of uniform SU(2) triples where every pair of
members in the first triple is harder to tell apart than the matching pair in
the second, while the first triple as a whole is easier to tell apart.
order_disagreement_search looks for two-state qubit ensembles that fidelity
and the Holevo quantity rank in opposite order.
"""

import logging
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigurationError
from .numkernel import rng_for
from .qstate import (DensityMatrix, StateEnsemble, holevo_quantity,
                     random_density_matrix, random_pure_state,
                     uhlmann_fidelity)
from .distinguish import SU2Ensemble, haar_su2, su2_distinguishability

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 1e-6


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    trials: int = 1000
    margin: float = DEFAULT_MARGIN
    pure_only: bool = False

    def __post_init__(self):
        if self.trials < 0:
            raise ConfigurationError(f"trials must be non-negative, got {self.trials}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        if not self.margin > 0:
            raise ConfigurationError(f"margin must be positive, got {self.margin}")


@dataclass(frozen=True)
class ParadoxCheck:
    qualifies: bool
    first_value: float
    second_value: float
    first_overlaps: Dict[Tuple[int, int], float]
    second_overlaps: Dict[Tuple[int, int], float]

    @property
    def value_gap(self) -> float:
        return self.first_value - self.second_value

    @property
    def smallest_overlap_gap(self) -> float:
        return min(self.first_overlaps[k] - self.second_overlaps[k] for k in self.first_overlaps)


def check_paradox(first: SU2Ensemble, second: SU2Ensemble, margin: float = DEFAULT_MARGIN) -> ParadoxCheck:
    """
    first's pairs are all less distinguishable (larger |tr U_i^dagger U_j/2|)
    than second's matching pairs, yet first's distinguishability is larger
    """
    first_value, _ = su2_distinguishability(first)
    second_value, _ = su2_distinguishability(second)
    first_overlaps = first.pairwise_overlaps()
    second_overlaps = second.pairwise_overlaps()
    qualifies = (
        len(first) == len(second)
        and all(first_overlaps[k] - second_overlaps[k] >= margin for k in first_overlaps)
        and first_value - second_value >= margin
    )
    return ParadoxCheck(qualifies, first_value, second_value, first_overlaps, second_overlaps)


@dataclass(frozen=True)
class ParadoxHit:
    trial: int
    first: SU2Ensemble
    second: SU2Ensemble
    check: ParadoxCheck

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "first_value": self.check.first_value,
            "second_value": self.check.second_value,
            "first_overlaps": [self.check.first_overlaps[k] for k in sorted(self.check.first_overlaps)],
            "second_overlaps": [self.check.second_overlaps[k] for k in sorted(self.check.second_overlaps)],
            "first": [_matrix_to_pairs(u) for u in self.first.unitaries],
            "second": [_matrix_to_pairs(u) for u in self.second.unitaries],
        }


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _matched_hit(a: SU2Ensemble, b: SU2Ensemble, margin: float) -> Optional[Tuple[SU2Ensemble, SU2Ensemble, ParadoxCheck]]:
    """Try both roles and every member correspondence; first qualifying order wins"""
    for first, second in ((a, b), (b, a)):
        for order in permutations(range(len(second))):
            candidate = second.permuted(order)
            check = check_paradox(first, candidate, margin)
            if check.qualifies:
                return first, candidate, check
    return None


def paradox_search(cfg: SearchConfig, size: int = 3) -> List[ParadoxHit]:
    """Trial t draws both triples from streams [seed, t, 0] and [seed, t, 1]"""
    hits = []
    for trial in range(cfg.trials):
        a = SU2Ensemble.uniform([haar_su2([cfg.seed, trial, 0, i]) for i in range(size)])
        b = SU2Ensemble.uniform([haar_su2([cfg.seed, trial, 1, i]) for i in range(size)])
        found = _matched_hit(a, b, cfg.margin)
        if found:
            first, second, check = found
            logger.debug(f"Trial {trial}: paradox with value gap {check.value_gap:.3e}")
            hits.append(ParadoxHit(trial, first, second, check))
    logger.info(f"Paradox search: {len(hits)} hits in {cfg.trials} trials (seed {cfg.seed})")
    return hits


@dataclass(frozen=True)
class OrderWitness:
    """Ensemble `first` is more distinguishable by fidelity but less by Holevo quantity"""

    trial: int
    weight: float
    first: Tuple[DensityMatrix, DensityMatrix]
    second: Tuple[DensityMatrix, DensityMatrix]
    fidelity_first: float
    fidelity_second: float
    holevo_first: float
    holevo_second: float

    def verify(self, margin: float = DEFAULT_MARGIN) -> bool:
        """Recompute both measures and re-check both margins"""
        measured = _measure(self.weight, self.first, self.second)
        return _disagrees(*measured, margin)

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "weight": self.weight,
            "fidelity_first": self.fidelity_first,
            "fidelity_second": self.fidelity_second,
            "holevo_first": self.holevo_first,
            "holevo_second": self.holevo_second,
            "first": [_matrix_to_pairs(s.mat) for s in self.first],
            "second": [_matrix_to_pairs(s.mat) for s in self.second],
        }


def _measure(weight, first, second) -> Tuple[float, float, float, float]:
    weights = [weight, 1.0 - weight]
    return (
        uhlmann_fidelity(*first),
        uhlmann_fidelity(*second),
        holevo_quantity(StateEnsemble(weights, list(first))),
        holevo_quantity(StateEnsemble(weights, list(second))),
    )


def _disagrees(f1: float, f2: float, h1: float, h2: float, margin: float) -> bool:
    return f2 - f1 >= margin and h2 - h1 >= margin


def order_disagreement_search(cfg: SearchConfig) -> List[OrderWitness]:
    """
    Random pairs of two-member qubit ensembles sharing one weight p

    pure_only restricts members to pure states, where both measures are
    monotone in the single overlap and no witness exists.
    """
    witnesses = []
    for trial in range(cfg.trials):
        rng = rng_for([cfg.seed, trial])
        weight = float(rng.uniform(0.05, 0.95))
        seeds = [[cfg.seed, trial, k] for k in range(4)]
        if cfg.pure_only:
            states = [random_pure_state(2, s).density() for s in seeds]
        else:
            states = [random_density_matrix(2, s) for s in seeds]
        pairs = ((states[0], states[1]), (states[2], states[3]))

        for first, second in (pairs, pairs[::-1]):
            measured = _measure(weight, first, second)
            if _disagrees(*measured, cfg.margin):
                witness = OrderWitness(trial, weight, first, second, *measured)
                if witness.verify(cfg.margin):
                    witnesses.append(witness)
                else:
                    logger.warning(f"Trial {trial}: witness failed re-verification")
                break
    logger.info(
        f"Order search: {len(witnesses)} witnesses in {cfg.trials} trials "
        f"(seed {cfg.seed}, pure_only={cfg.pure_only})"
    )
    return witnesses

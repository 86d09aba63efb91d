"""
Property suites - seeded randomized checks of the monotonicity, additivity
and consistency laws the numerics must obey

Every trial t draws from its own stream [seed, t, ...], so a suite result
depends only on (suite, trials, seed, optimizer config).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from models.distinguish import (SU2Ensemble, dist_ops, ensemble_holevo_at,
                                maximally_entangled_probe, probe_fidelity,
                                product_probe, su2_distinguishability)
from models.errors import UnknownSuite
from models.numkernel import (dagger, hermitian_eig,
                              majorizes, partial_trace, partial_transpose,
                              random_unitary, rng_for, shannon_entropy)
from models.optimizer import OptimizerConfig, ProbeState
from models.qchannel import (EBChannel, apply, apply_extended,
                             compose_sequential, dilate, random_channel)
from models.qstate import (DensityMatrix, StateEnsemble, gram_matrix,
                           holevo_quantity, random_density_matrix,
                           random_pure_state, strong_subadditivity_gap,
                           uhlmann_fidelity)

logger = logging.getLogger(__name__)

LAW_SLACK = 1e-8
SPECTRUM_SLACK = 1e-9
OPTIMIZER_SLACK = 1e-3
PRODUCT_PROBE_SLACK = 5e-3


@dataclass
class SuiteReport:
    suite: str
    trials: int
    seed: int
    failures: int = 0
    worst_violation: float = 0.0
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, violation: float, limit: float) -> None:
        """violation > limit counts as a failure; the worst value is kept"""
        self.worst_violation = max(self.worst_violation, violation)
        if violation > limit:
            self.failures += 1

    def note_max(self, key: str, value: float) -> None:
        self.details[key] = max(self.details.get(key, float("-inf")), value)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return rng_for([seed, trial])


def _random_weights(rng: np.random.Generator, n: int) -> np.ndarray:
    raw = rng.uniform(0.05, 1.0, size=n)
    return raw / raw.sum()


def _random_state_ensemble(rng, seed, trial, d) -> StateEnsemble:
    n = int(rng.integers(2, 4))
    states = [random_density_matrix(d, [seed, trial, k], rank=int(rng.integers(1, d + 1))) for k in range(n)]
    return StateEnsemble(_random_weights(rng, n), states)


def holevo_monotonicity(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """chi does not grow under a channel or under a partial trace"""
    report = SuiteReport("holevo-mono", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        d = int(rng.integers(2, 5))
        ensemble = _random_state_ensemble(rng, seed, trial, d)
        channel = random_channel(d, int(rng.integers(1, d * d + 1)), [seed, trial, 100])
        before = holevo_quantity(ensemble)
        report.record(holevo_quantity(ensemble.map(channel)) - before, LAW_SLACK)

        bipartite = _random_state_ensemble(rng, seed, trial + trials, 4)
        report.record(
            holevo_quantity(bipartite.reduce((2, 2), keep="A")) - holevo_quantity(bipartite), LAW_SLACK
        )
    return report


def fidelity_monotonicity(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """F does not shrink under a channel or a partial trace; F is symmetric"""
    report = SuiteReport("fidelity-mono", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        d = int(rng.integers(2, 5))
        rho1 = random_density_matrix(d, [seed, trial, 0], rank=int(rng.integers(1, d + 1)))
        rho2 = random_density_matrix(d, [seed, trial, 1], rank=int(rng.integers(1, d + 1)))
        channel = random_channel(d, int(rng.integers(1, d * d + 1)), [seed, trial, 2])
        before = uhlmann_fidelity(rho1, rho2)
        report.record(before - uhlmann_fidelity(apply(channel, rho1), apply(channel, rho2)), LAW_SLACK)
        report.record(abs(before - uhlmann_fidelity(rho2, rho1)), SPECTRUM_SLACK)

        joint1 = random_density_matrix(4, [seed, trial, 3])
        joint2 = random_density_matrix(4, [seed, trial, 4])
        reduced = uhlmann_fidelity(joint1.reduce((2, 2), "A"), joint2.reduce((2, 2), "A"))
        report.record(uhlmann_fidelity(joint1, joint2) - reduced, LAW_SLACK)
    return report


def channel_fidelity_postprocessing(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """At every probe, post-processing both channels by N never lowers their output fidelity"""
    report = SuiteReport("prop1", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        d = 2
        e1 = random_channel(d, int(rng.integers(1, 5)), [seed, trial, 0])
        e2 = random_channel(d, int(rng.integers(1, 5)), [seed, trial, 1])
        post = random_channel(d, int(rng.integers(1, 5)), [seed, trial, 2])
        probe = ProbeState(random_pure_state(d * d, [seed, trial, 3]), d)
        before = probe_fidelity(e1, e2, probe)
        after = probe_fidelity(compose_sequential(post, e1), compose_sequential(post, e2), probe)
        report.record(before - after, LAW_SLACK)
    return report


def _random_su2(rng, seed, trial, tag, sizes=(2, 4)) -> SU2Ensemble:
    n = int(rng.integers(sizes[0], sizes[1]))
    ensemble = SU2Ensemble.random(n, [seed, trial, 10 + tag])
    return SU2Ensemble(_random_weights(rng, n), ensemble.unitaries)


def post_processing_monotonicity(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """D(N o E) found by the optimizer never exceeds the exact D(E)"""
    report = SuiteReport("prop2", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        ensemble = _random_su2(rng, seed, trial, 0)
        post = random_channel(2, int(rng.integers(1, 5)), [seed, trial, 1])
        exact, _ = su2_distinguishability(ensemble)
        found = dist_ops(ensemble.channel_ensemble().post_compose(post), cfg.with_seed(seed + trial))
        report.record(found.value - exact, OPTIMIZER_SLACK)
    return report


def composition_subadditivity(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """D(E o F) <= D(E) + D(F)"""
    report = SuiteReport("prop3", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        first = _random_su2(rng, seed, trial, 0, sizes=(2, 3))
        second = _random_su2(rng, seed, trial, 1, sizes=(2, 3))
        bound = su2_distinguishability(first)[0] + su2_distinguishability(second)[0]
        composed = first.channel_ensemble().compose(second.channel_ensemble())
        found = dist_ops(composed, cfg.with_seed(seed + trial))
        report.record(found.value - bound, OPTIMIZER_SLACK)
    return report


def tensor_additivity(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """The product probe reaches D1 + D2 on E1 (x) E2, and the optimizer does not exceed it"""
    report = SuiteReport("prop4", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        first = _random_su2(rng, seed, trial, 0, sizes=(2, 3))
        second = _random_su2(rng, seed, trial, 1, sizes=(2, 3))
        total = su2_distinguishability(first)[0] + su2_distinguishability(second)[0]
        joint = first.channel_ensemble().tensor(second.channel_ensemble())
        probe = product_probe(maximally_entangled_probe(2), maximally_entangled_probe(2))
        lower = ensemble_holevo_at(joint, probe)
        found = dist_ops(joint, cfg.with_seed(seed + trial))
        report.record(total - lower, PRODUCT_PROBE_SLACK)
        report.record(found.value - total, OPTIMIZER_SLACK)
        report.note_max("max_product_probe_gap", abs(total - lower))
        report.note_max("max_optimizer_excess", found.value - total)
    return report


def su2_closed_form(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """Optimizer and maximally entangled probe both agree with the SU(2) closed form"""
    report = SuiteReport("prop8", trials, seed)
    probe = maximally_entangled_probe(2)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        ensemble = _random_su2(rng, seed, trial, 0, sizes=(2, 5))
        exact, _ = su2_distinguishability(ensemble)
        channels = ensemble.channel_ensemble()
        at_probe = ensemble_holevo_at(channels, probe)
        found = dist_ops(channels, cfg.with_seed(seed + trial))
        report.record(abs(at_probe - exact), SPECTRUM_SLACK)
        report.record(abs(found.value - exact), OPTIMIZER_SLACK)
        report.note_max("max_optimizer_gap", abs(found.value - exact))
        # Holevo bound for pure outputs
        report.record(found.value - shannon_entropy(ensemble.weights), SPECTRUM_SLACK)
    return report


def _random_hermitian(d: int, seed) -> np.ndarray:
    """Hermitian matrix of unit Frobenius norm with eigenvalues of both signs in general"""
    rng = rng_for(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = (g + dagger(g)) / 2.0
    return m / np.linalg.norm(m)


def majorization_step(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """Spectrum of (M + T M T^dagger)/2 is majorized by the spectrum of Hermitian M"""
    report = SuiteReport("majorization", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        d = int(rng.integers(2, 7))
        if trial % 2:
            m = _random_hermitian(d, [seed, trial, 0])
        else:
            m = random_density_matrix(d, [seed, trial, 0]).mat
        t = random_unitary(d, [seed, trial, 1])
        mixed = 0.5 * m + 0.5 * (t @ m @ dagger(t))
        original = hermitian_eig(m).values
        averaged = hermitian_eig((mixed + dagger(mixed)) / 2.0).values
        report.note_max("most_negative_eigenvalue", float(-min(original.min(), 0.0)))
        report.record(0.0 if majorizes(original, averaged) else 1.0, 0.0)
    return report


def channel_laws(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """Trace preservation, complete positivity, linearity, dilation and EB separability"""
    report = SuiteReport("channel-laws", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        d = int(rng.integers(2, 4))
        channel = random_channel(d, int(rng.integers(1, d * d + 1)), [seed, trial, 0])
        rho1 = random_density_matrix(d, [seed, trial, 1])
        rho2 = random_density_matrix(d, [seed, trial, 2])
        p = float(rng.uniform())

        out1, out2 = apply(channel, rho1), apply(channel, rho2)
        report.record(abs(np.trace(out1.mat).real - 1.0), LAW_SLACK)

        mixed = apply(channel, DensityMatrix(p * rho1.mat + (1 - p) * rho2.mat, check=False))
        report.record(float(np.max(np.abs(mixed.mat - (p * out1.mat + (1 - p) * out2.mat)))), SPECTRUM_SLACK)

        entangled = random_density_matrix(d * d, [seed, trial, 3], rank=1)
        extended = apply_extended(channel, entangled)
        report.record(-float(hermitian_eig(extended.mat).values.min()), LAW_SLACK)

        unitary, ancilla = dilate(channel)
        lifted = np.kron(rho1.mat, np.diag([1.0] + [0.0] * (ancilla - 1)))
        reconstructed = partial_trace(unitary @ lifted @ dagger(unitary), (d, ancilla), keep="A")
        report.record(float(np.linalg.norm(reconstructed - out1.mat)), LAW_SLACK)

        eb = _random_eb_channel(rng, seed, trial)
        bell_like = random_density_matrix(4, [seed, trial, 4], rank=1)
        separable = apply_extended(eb, bell_like).mat
        transposed = partial_transpose(separable, (2, 2), which="B")
        report.record(-float(hermitian_eig(transposed).values.min()), LAW_SLACK)
    return report


def _random_eb_channel(rng, seed, trial) -> EBChannel:
    """Measurement in a random basis, followed by random pure preparations"""
    basis = random_unitary(2, [seed, trial, 5])
    outputs = [random_pure_state(2, [seed, trial, 6 + k]) for k in range(2)]
    return EBChannel(outputs, [basis[:, k] for k in range(2)])


def holevo_additivity(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """chi of a product ensemble is the sum of the factors' chi"""
    report = SuiteReport("holevo-additivity", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        first = _random_state_ensemble(rng, seed, trial, 2)
        second = _random_state_ensemble(rng, seed, trial + trials, 2)
        joint = holevo_quantity(first.tensor(second))
        report.record(abs(joint - holevo_quantity(first) - holevo_quantity(second)), LAW_SLACK)
    return report


def strong_subadditivity(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    report = SuiteReport("strong-subadditivity", trials, seed)
    for trial in range(trials):
        rho = random_density_matrix(8, [seed, trial])
        report.record(-strong_subadditivity_gap(rho, (2, 2, 2)), LAW_SLACK)
    return report


def gram_spectrum(trials: int, seed: int, cfg: OptimizerConfig) -> SuiteReport:
    """Gram matrix and average state share their nonzero spectrum"""
    report = SuiteReport("gram-spectrum", trials, seed)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        n, d = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        weights = _random_weights(rng, n)
        states = [random_pure_state(d, [seed, trial, k]) for k in range(n)]
        average = StateEnsemble(weights, states).average()
        size = max(n, d)
        gram_values = np.pad(hermitian_eig(gram_matrix(weights, states)).values, (0, size - n))
        state_values = np.pad(hermitian_eig(average.mat).values, (0, size - d))
        report.record(float(np.max(np.abs(np.sort(gram_values) - np.sort(state_values)))), SPECTRUM_SLACK)
    return report


SuiteRunner = Callable[[int, int, OptimizerConfig], SuiteReport]

SUITES: Dict[str, SuiteRunner] = {
    "holevo-mono": holevo_monotonicity,
    "fidelity-mono": fidelity_monotonicity,
    "prop1": channel_fidelity_postprocessing,
    "prop2": post_processing_monotonicity,
    "prop3": composition_subadditivity,
    "prop4": tensor_additivity,
    "prop8": su2_closed_form,
    "majorization": majorization_step,
    "channel-laws": channel_laws,
    "holevo-additivity": holevo_additivity,
    "strong-subadditivity": strong_subadditivity,
    "gram-spectrum": gram_spectrum,
}

DEFAULT_TRIALS = {
    "holevo-mono": 300,
    "fidelity-mono": 300,
    "prop1": 300,
    "prop2": 5,
    "prop3": 5,
    "prop4": 1,
    "prop8": 100,
    "majorization": 500,
    "channel-laws": 500,
    "holevo-additivity": 300,
    "strong-subadditivity": 300,
    "gram-spectrum": 300,
}


def run_suite(name: str, trials: Optional[int] = None, seed: int = 0,
              cfg: Optional[OptimizerConfig] = None) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuite(f"Unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    trials = DEFAULT_TRIALS[name] if trials is None else trials
    cfg = cfg or OptimizerConfig.for_verification(seed=seed)
    logger.info(f"Running suite {name} with {trials} trials (seed {seed})")
    report = SUITES[name](trials, seed, cfg)
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(
        level,
        f"Suite {name}: {report.failures} failures, worst violation {report.worst_violation:.3e}",
    )
    return report

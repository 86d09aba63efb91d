import math

import numpy as np
import pytest

from models.distinguish import (SU2Ensemble, capacity, copies_upper_bound,
                                dist_ops, eb_finite_copy_check,
                                eb_overlap_condition, eigenphase_arc,
                                ensemble_holevo_at, fidelity_ops, haar_su2,
                                maximally_entangled_probe, min_copies_perfect,
                                probe_fidelity, product_probe, su2_from_cosine,
                                su2_distinguishability, su2_gram,
                                two_unitary_distinguishability,
                                two_unitary_min_overlap)
from models.errors import (CrossCheckFailed, DimensionMismatch,
                           NeverDistinguishable, NotSU2, NotUnitary,
                           ValidationError)
from models.optimizer import OptimizerConfig, ProbeState
from models.qchannel import (PAULI, ChannelEnsemble, EBChannel,
                             UnitaryChannel, compose_sequential,
                             depolarizing_channel, identity_channel,
                             measure_reprepare_channel)
from models.qstate import PureState, random_pure_state

EX3_U_VALUE = 1.138
EX3_V_VALUE = 1.118
PUBLISHED_TOLERANCE = 5e-3


def phase_gate(angle: float) -> np.ndarray:
    return np.diag([1.0, complex(math.cos(angle), math.sin(angle))])


def x_basis_channel() -> EBChannel:
    s = 1 / math.sqrt(2.0)
    plus_minus = [[s, s], [s, -s]]
    return EBChannel(plus_minus, plus_minus)


class TestProbeObjectives:

    def test_pauli_at_maximally_entangled_probe(self, pauli_ensemble):
        """The Bell probe turns the Paulis into four orthogonal outputs"""
        value = ensemble_holevo_at(pauli_ensemble, maximally_entangled_probe(2))
        assert value == pytest.approx(2.0, abs=1e-9)

    def test_product_probe_is_weaker_for_paulis(self, pauli_ensemble):
        """Without entanglement the Paulis give at most one bit"""
        probe = ProbeState(PureState.basis(2, 0).tensor(PureState.basis(2, 0)), 2)
        assert ensemble_holevo_at(pauli_ensemble, probe) <= 1.0 + 1e-9

    def test_mixed_channels_subtract_member_entropy(self):
        """Identical depolarizing members carry nothing"""
        ensemble = ChannelEnsemble.uniform([depolarizing_channel(0.5), depolarizing_channel(0.5)])
        assert ensemble_holevo_at(ensemble, maximally_entangled_probe(2)) == pytest.approx(0.0, abs=1e-9)

    def test_probe_dimension_checked(self, pauli_ensemble):
        """A probe on 3x3 does not fit qubit channels"""
        with pytest.raises(DimensionMismatch):
            ensemble_holevo_at(pauli_ensemble, maximally_entangled_probe(3))

    def test_probe_fidelity_unitaries(self):
        """For unitaries the fidelity is |<phi|(U1^dagger U2 (x) I)|phi>|"""
        probe = ProbeState(random_pure_state(4, 3), 2)
        u1, u2 = UnitaryChannel(haar_su2(1)), UnitaryChannel(haar_su2(2))
        relative = np.kron(u1.u.conj().T @ u2.u, np.eye(2))
        expected = abs(np.vdot(probe.vec, relative @ probe.vec))
        assert probe_fidelity(u1, u2, probe) == pytest.approx(expected, abs=1e-12)

    def test_probe_fidelity_identity_vs_depolarizing(self):
        """Bell probe: F(Phi+, I/4) = 1/2"""
        value = probe_fidelity(identity_channel(2), depolarizing_channel(), maximally_entangled_probe(2))
        assert value == pytest.approx(0.5, abs=1e-9)

    def test_product_probe_of_bell_pairs(self):
        """Two reordered Bell pairs form the 4x4 maximally entangled state"""
        joint = product_probe(maximally_entangled_probe(2), maximally_entangled_probe(2))
        assert np.allclose(joint.vec, maximally_entangled_probe(4).vec)


class TestDistOps:

    def test_repeated_unitary_carries_nothing(self, tiny_cfg):
        """An ensemble of one unitary listed twice has zero distinguishability"""
        u = UnitaryChannel(haar_su2(12))
        result = dist_ops(ChannelEnsemble.uniform([u, u]), tiny_cfg)
        assert result.value == pytest.approx(0.0, abs=1e-9)

    def test_pauli_lower_bound(self, pauli_ensemble, tiny_cfg):
        """The search keeps the two bits reached at the Bell probe"""
        result = dist_ops(pauli_ensemble, tiny_cfg)
        assert 1.999 <= result.value <= 2.0 + 1e-9
        assert result.bound_kind == "lower"
        assert result.probe.dim_in == 2

    def test_ex3_u_matches_closed_form(self, ex3_ensembles, tiny_cfg):
        """The optimizer reaches but never exceeds the SU(2) closed form"""
        first, _ = ex3_ensembles
        exact, _ = su2_distinguishability(first)
        result = dist_ops(first.channel_ensemble(), tiny_cfg)
        assert abs(result.value - exact) <= 1e-3
        assert result.value <= exact + 1e-9

    def test_deterministic(self, pauli_ensemble, tiny_cfg):
        """Same seed, same result"""
        first = dist_ops(pauli_ensemble, tiny_cfg)
        second = dist_ops(pauli_ensemble, tiny_cfg)
        assert first.per_restart_values == second.per_restart_values
        assert np.array_equal(first.probe.vec, second.probe.vec)

    @pytest.mark.slow
    def test_ex3_u_default_budget(self, ex3_ensembles):
        """Sixty-four restarts land within 1e-3 of the closed form"""
        first, _ = ex3_ensembles
        exact, _ = su2_distinguishability(first)
        result = dist_ops(first.channel_ensemble(), OptimizerConfig())
        assert abs(result.value - exact) <= 1e-3
        assert result.value <= exact + 1e-9

    @pytest.mark.slow
    def test_additivity_spot_check(self, random_su2_pair):
        """Product probe and optimizer bracket D1 + D2 on E1 (x) E2"""
        first, second = random_su2_pair(40), random_su2_pair(41)
        total = su2_distinguishability(first)[0] + su2_distinguishability(second)[0]
        joint = first.channel_ensemble().tensor(second.channel_ensemble())
        lower = ensemble_holevo_at(joint, product_probe(maximally_entangled_probe(2), maximally_entangled_probe(2)))
        found = dist_ops(joint, OptimizerConfig(restarts=8, max_iters=400))
        assert -5e-3 <= lower - total <= 1e-3
        assert -5e-3 <= found.value - total <= 1e-3


class TestFidelityOps:

    def test_identity_vs_z_reaches_zero(self):
        """A balanced probe makes I and Z outputs orthogonal"""
        result = fidelity_ops(identity_channel(2), UnitaryChannel(PAULI["Z"]), OptimizerConfig(restarts=4, max_iters=1000, seed=0))
        assert result.value <= 1e-3

    def test_identity_vs_quarter_turn(self):
        """I vs diag(1, i) bottoms out at 1/sqrt(2) and never below"""
        result = fidelity_ops(identity_channel(2), UnitaryChannel(phase_gate(math.pi / 2)), OptimizerConfig(restarts=4, max_iters=1000, seed=0))
        assert result.value == pytest.approx(1 / math.sqrt(2.0), abs=1e-3)
        assert result.value >= 1 / math.sqrt(2.0) - 1e-9

    def test_identical_channels(self, tiny_cfg):
        """Identical channels have fidelity one at every probe"""
        result = fidelity_ops(identity_channel(2), identity_channel(2), tiny_cfg)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert result.bound_kind == "upper"

    @pytest.mark.parametrize("pair_seed", [0, 1, 2])
    def test_matches_two_unitary_closed_form(self, pair_seed):
        """Minimizing over probes reaches the hull distance"""
        u1, u2 = haar_su2([pair_seed, 0]), haar_su2([pair_seed, 1])
        result = fidelity_ops(UnitaryChannel(u1), UnitaryChannel(u2), OptimizerConfig(restarts=4, max_iters=1000, seed=pair_seed))
        assert result.value == pytest.approx(two_unitary_min_overlap(u1, u2), abs=1e-3)

    @pytest.mark.slow
    def test_matches_two_unitary_closed_form_25_pairs(self):
        """Twenty-five seeded SU(2) pairs agree within 1e-3"""
        cfg = OptimizerConfig(restarts=8, max_iters=1000)
        for pair_seed in range(25):
            u1, u2 = haar_su2([200, pair_seed, 0]), haar_su2([200, pair_seed, 1])
            result = fidelity_ops(UnitaryChannel(u1), UnitaryChannel(u2), cfg.with_seed(pair_seed))
            assert abs(result.value - two_unitary_min_overlap(u1, u2)) <= 1e-3

    def test_dimension_mismatch(self, tiny_cfg):
        """Channels must act on the same spaces"""
        with pytest.raises(DimensionMismatch):
            fidelity_ops(identity_channel(2), identity_channel(3), tiny_cfg)


class TestTwoUnitaries:

    def test_quarter_turn_overlap(self):
        """I vs diag(1, i): chord from 1 to i sits 1/sqrt(2) from the origin"""
        assert two_unitary_min_overlap(np.eye(2), phase_gate(math.pi / 2)) == pytest.approx(0.707107, abs=1e-6)

    def test_opposite_phases_overlap_zero(self):
        """I vs Z: the hull passes through the origin"""
        assert two_unitary_min_overlap(np.eye(2), PAULI["Z"]) == pytest.approx(0.0, abs=1e-12)

    def test_global_phase_overlap_one(self):
        """A global phase cannot be detected"""
        assert two_unitary_min_overlap(np.eye(2), 1j * np.eye(2)) == pytest.approx(1.0, abs=1e-12)

    def test_distinguishability_closed_form(self):
        """Orthogonal outputs give one bit; identical ones give nothing"""
        assert two_unitary_distinguishability(np.eye(2), PAULI["Z"], 0.5, 0.5) == pytest.approx(1.0)
        assert two_unitary_distinguishability(np.eye(2), np.eye(2), 0.5, 0.5) == pytest.approx(0.0, abs=1e-9)

    def test_rejects_non_unitary(self):
        """Unitarity is checked on raw matrices"""
        with pytest.raises(NotUnitary):
            two_unitary_min_overlap(np.eye(2), np.diag([1.0, 2.0]))


class TestCopyCounts:

    @pytest.mark.parametrize("angle,copies", [(math.pi, 1), (math.pi / 2, 2), (math.pi / 4, 4)])
    def test_min_copies(self, angle, copies):
        """Arc widths pi, pi/2, pi/4 need 1, 2, 4 copies"""
        assert min_copies_perfect(np.eye(2), phase_gate(angle)) == copies

    def test_three_element_bound(self):
        """Pairwise counts 2, 4, 4 give the bound 4 + 4"""
        unitaries = [np.eye(2), phase_gate(math.pi / 2), phase_gate(math.pi / 4)]
        assert copies_upper_bound(unitaries) == 8

    def test_never_for_global_phase(self):
        """Unitaries equal up to a phase never become distinguishable"""
        with pytest.raises(NeverDistinguishable):
            min_copies_perfect(np.eye(2), np.exp(0.3j) * np.eye(2))

    def test_bound_needs_two(self):
        """A single unitary has nothing to distinguish"""
        with pytest.raises(ValidationError):
            copies_upper_bound([np.eye(2)])

    def test_rejects_non_qubit(self):
        """Copy counts are defined for 2x2 unitaries only"""
        with pytest.raises(DimensionMismatch):
            min_copies_perfect(np.eye(3), np.diag([1.0, 1j, -1.0]))

    def test_hull_disagreement_raises(self, mocker):
        """A hull that misses the origin at N is reported with its distance"""
        mocker.patch("models.distinguish._hull_distance", return_value=0.5)
        with pytest.raises(CrossCheckFailed) as exc:
            min_copies_perfect(np.eye(2), phase_gate(math.pi / 2))
        assert exc.value.residual == 0.5

    def test_hull_reached_early_raises(self, mocker):
        """A hull that already holds the origin at N-1 is reported too"""
        mocker.patch("models.distinguish._hull_distance", return_value=0.0)
        with pytest.raises(CrossCheckFailed) as exc:
            min_copies_perfect(np.eye(2), phase_gate(math.pi / 2))
        assert exc.value.residual == 0.0

    def test_eigenphase_arc_wraps(self):
        """Phases on either side of zero span the short arc"""
        assert eigenphase_arc([-0.1, 0.2]) == pytest.approx(0.3)
        assert eigenphase_arc([0.0, math.pi / 2, math.pi]) == pytest.approx(math.pi)


class TestSU2Ensemble:

    def test_ex3_closed_form_values(self, ex3_ensembles):
        """D(U) ~ 1.138 and D(V) ~ 1.118"""
        first, second = ex3_ensembles
        assert su2_distinguishability(first)[0] == pytest.approx(EX3_U_VALUE, abs=PUBLISHED_TOLERANCE)
        assert su2_distinguishability(second)[0] == pytest.approx(EX3_V_VALUE, abs=PUBLISHED_TOLERANCE)

    def test_ex3_pairwise_table(self, ex3_ensembles):
        """Every pair of U is less distinguishable than its V counterpart"""
        first, second = ex3_ensembles
        u, v = first.pairwise_overlaps(), second.pairwise_overlaps()
        assert u[(0, 1)] == pytest.approx(1 / math.sqrt(2.0), abs=1e-9)
        assert u[(0, 2)] == pytest.approx(1 / math.sqrt(3.0), abs=1e-9)
        assert u[(1, 2)] == pytest.approx(0.25, abs=1e-9)
        assert v[(0, 1)] == pytest.approx(1 / math.sqrt(2.1), abs=1e-9)
        assert v[(0, 2)] == pytest.approx(1 / math.sqrt(3.1), abs=1e-9)
        assert v[(1, 2)] == pytest.approx(0.0, abs=1e-9)
        assert all(u[k] > v[k] for k in u)
        assert su2_distinguishability(first)[0] > su2_distinguishability(second)[0]

    def test_gram_has_unit_trace(self, ex3_ensembles):
        """sum_i p_i tr(I)/2 = 1"""
        gram = su2_gram(ex3_ensembles[0])
        assert np.trace(gram).real == pytest.approx(1.0)

    def test_closed_form_matches_probe(self):
        """The Bell probe reaches the closed form"""
        ensemble = SU2Ensemble.random(3, [9])
        value, _ = su2_distinguishability(ensemble)
        assert ensemble_holevo_at(ensemble.channel_ensemble(), maximally_entangled_probe(2)) == pytest.approx(value, abs=1e-9)

    def test_rejects_wrong_determinant(self):
        """diag(1, i) is unitary but not in SU(2)"""
        with pytest.raises(NotSU2):
            SU2Ensemble.uniform([np.eye(2), phase_gate(math.pi / 2)])

    def test_rejects_wrong_shape(self):
        """Members must be 2x2"""
        with pytest.raises(NotSU2):
            SU2Ensemble.uniform([np.eye(3)])

    def test_haar_and_cosine_builders(self):
        """Both builders produce determinant-one unitaries"""
        for u in (haar_su2(4), su2_from_cosine(0.3, -0.5)):
            assert np.linalg.det(u) == pytest.approx(1.0)
            assert np.allclose(u @ u.conj().T, np.eye(2))

    def test_permuted_and_from_channels(self, ex3_ensembles):
        """Reordering members permutes the pairwise overlaps"""
        first, _ = ex3_ensembles
        swapped = first.permuted([1, 0, 2])
        assert swapped.pairwise_overlaps()[(0, 2)] == pytest.approx(first.pairwise_overlaps()[(1, 2)])
        rebuilt = SU2Ensemble.from_channels(first.channel_ensemble())
        assert np.allclose(rebuilt.unitaries[2], first.unitaries[2])

    def test_from_channels_rejects_kraus(self):
        """Only unitary ensembles convert"""
        with pytest.raises(NotSU2):
            SU2Ensemble.from_channels(ChannelEnsemble.uniform([identity_channel(2), depolarizing_channel()]))


class TestCapacity:

    def test_pauli_capacity(self, tiny_cfg):
        """Two bits with a uniform prior over the Paulis"""
        result = capacity([UnitaryChannel(PAULI[k]) for k in "IXYZ"], tiny_cfg)
        assert 1.999 <= result.value <= 2.0 + 1e-9
        assert sum(result.prior) == pytest.approx(1.0)
        assert len(result.prior) == 4
        assert result.prior == pytest.approx([0.25] * 4, abs=5e-2)

    def test_identical_channels_carry_nothing(self, tiny_cfg):
        """Capacity of copies of one channel is zero"""
        result = capacity([identity_channel(2), identity_channel(2)], tiny_cfg)
        assert result.value == pytest.approx(0.0, abs=1e-9)

    def test_rejects_empty(self, tiny_cfg):
        """At least one channel is needed"""
        with pytest.raises(ValidationError):
            capacity([], tiny_cfg)


class TestEntanglementBreakingChecks:

    def test_single_copy_not_perfect(self, small_cfg):
        """Computational and |+>/|-> measure-and-prepare channels overlap at every probe"""
        report = eb_finite_copy_check(measure_reprepare_channel(2), x_basis_channel(), 1, small_cfg)
        assert report.copies == 1
        assert report.not_perfectly_distinguishable
        assert 0.0 < report.fidelity_upper_bound <= 1.0

    def test_two_copies_runs(self, tiny_cfg):
        """Two copies search probes on 4x4"""
        report = eb_finite_copy_check(measure_reprepare_channel(2), x_basis_channel(), 2, tiny_cfg)
        assert report.copies == 2
        assert report.result.probe.dim_in == 4

    def test_unitaries_after_measurement_stay_identical(self, tiny_cfg):
        """A phase applied after a computational-basis measure-and-prepare is invisible"""
        measure = measure_reprepare_channel(2)
        plain = compose_sequential(identity_channel(2), measure)
        phased = compose_sequential(UnitaryChannel(phase_gate(math.pi / 2)), measure)
        report = eb_finite_copy_check(plain, phased, 1, tiny_cfg)
        assert report.fidelity_upper_bound > 1e-3
        assert report.fidelity_upper_bound == pytest.approx(1.0, abs=1e-9)
        assert report.not_perfectly_distinguishable

    def test_identity_vs_z_is_perfect(self):
        """I and Z are told apart with a single copy"""
        report = eb_finite_copy_check(identity_channel(2), UnitaryChannel(PAULI["Z"]), 1, OptimizerConfig(restarts=4, max_iters=1000, seed=0))
        assert report.fidelity_upper_bound <= 1e-3
        assert not report.not_perfectly_distinguishable

    def test_copy_count_limited(self, tiny_cfg):
        """Only one or two copies are supported"""
        with pytest.raises(ValidationError):
            eb_finite_copy_check(measure_reprepare_channel(2), x_basis_channel(), 3, tiny_cfg)

    def test_qubits_only(self, tiny_cfg):
        """Higher-dimensional channels are rejected"""
        with pytest.raises(DimensionMismatch):
            eb_finite_copy_check(measure_reprepare_channel(3), measure_reprepare_channel(3), 1, tiny_cfg)

    def test_overlap_condition(self):
        """All prepared states overlap across Z and X channels but not within Z"""
        assert eb_overlap_condition(measure_reprepare_channel(2), x_basis_channel())
        assert not eb_overlap_condition(measure_reprepare_channel(2), measure_reprepare_channel(2))

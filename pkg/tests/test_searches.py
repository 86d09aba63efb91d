import math

import numpy as np
import pytest

from models.distinguish import SU2Ensemble, haar_su2
from models.errors import ConfigurationError
from models.qstate import (DensityMatrix, PureState, StateEnsemble,
                           holevo_quantity, uhlmann_fidelity)
from models.searches import (OrderWitness, ParadoxHit, SearchConfig,
                             check_paradox, order_disagreement_search,
                             paradox_search)


def close_pure_pair(overlap: float):
    tilted = PureState([overlap, math.sqrt(1.0 - overlap * overlap)])
    return PureState.basis(2, 0).density(), tilted.density()


class TestSearchConfig:

    @pytest.mark.parametrize("field,value", [("trials", -1), ("seed", -2), ("margin", 0.0)])
    def test_rejects_invalid(self, field, value):
        """Negative counts and non-positive margins are rejected"""
        with pytest.raises(ConfigurationError):
            SearchConfig(**{field: value})


class TestCheckParadox:

    def test_known_triples_qualify(self, ex3_ensembles):
        """U beats V overall while losing every pairwise comparison"""
        first, second = ex3_ensembles
        check = check_paradox(first, second)
        assert check.qualifies
        assert check.value_gap > 0.01
        assert check.smallest_overlap_gap > 0.0

    def test_reversed_roles_do_not_qualify(self, ex3_ensembles):
        """Swapping the triples breaks both conditions"""
        first, second = ex3_ensembles
        assert not check_paradox(second, first).qualifies

    def test_margin_is_enforced(self, ex3_ensembles):
        """A margin wider than the value gap rejects the pair"""
        first, second = ex3_ensembles
        assert not check_paradox(first, second, margin=0.5).qualifies


class TestParadoxSearch:

    def test_zero_trials(self):
        """No trials, no hits"""
        assert paradox_search(SearchConfig(trials=0)) == []

    def test_hits_are_genuine(self, ex3_ensembles, mocker):
        """A planted triple pair is found, and every reported hit passes a fresh check"""
        first, second = ex3_ensembles
        shuffled = second.permuted([2, 0, 1])

        def draw(seed):
            _, trial, role, i = seed
            if trial == 4:
                return (shuffled if role == 0 else first).unitaries[i]
            return haar_su2(seed)

        mocker.patch("models.searches.haar_su2", side_effect=draw)
        cfg = SearchConfig(seed=3, trials=8)
        hits = paradox_search(cfg)
        assert hits
        assert 4 in [h.trial for h in hits]
        for hit in hits:
            check = check_paradox(hit.first, hit.second)
            assert check.qualifies
            assert check.value_gap >= cfg.margin
            assert check.smallest_overlap_gap >= cfg.margin

    def test_identical_ensembles_never_qualify(self, ex3_ensembles):
        """An ensemble compared with itself has no gap to exploit"""
        for ensemble in (*ex3_ensembles, *(SU2Ensemble.random(3, [k]) for k in range(5))):
            assert not check_paradox(ensemble, ensemble).qualifies

    def test_identical_draws_give_no_hits(self, mocker):
        """Both roles drawing the same unitaries yields nothing under any member order"""
        mocker.patch("models.searches.haar_su2", side_effect=lambda seed: haar_su2([seed[0], seed[1], 0, seed[3]]))
        assert paradox_search(SearchConfig(seed=3, trials=10)) == []

    def test_deterministic(self):
        """Same seed, same trial indices"""
        first = paradox_search(SearchConfig(seed=1, trials=15))
        second = paradox_search(SearchConfig(seed=1, trials=15))
        assert [h.trial for h in first] == [h.trial for h in second]

    def test_hit_serializes(self, ex3_ensembles):
        """to_dict carries values, overlaps and matrices as (re, im) pairs"""
        first, second = ex3_ensembles
        data = ParadoxHit(0, first, second, check_paradox(first, second)).to_dict()
        assert len(data["first_overlaps"]) == 3
        assert data["first"][0][0][0] == [1.0, 0.0]
        assert data["first_value"] > data["second_value"]


class TestOrderDisagreement:

    def test_constructed_witness(self):
        """Commuting mixed pair against a close pure pair disagrees"""
        first = (DensityMatrix(np.diag([0.5, 0.5])), DensityMatrix(np.diag([0.8, 0.2])))
        second = close_pure_pair(0.96)
        f1, f2 = uhlmann_fidelity(*first), uhlmann_fidelity(*second)
        h1 = holevo_quantity(StateEnsemble([0.5, 0.5], list(first)))
        h2 = holevo_quantity(StateEnsemble([0.5, 0.5], list(second)))
        witness = OrderWitness(0, 0.5, first, second, f1, f2, h1, h2)
        assert f1 < f2
        assert h1 < h2
        assert witness.verify()
        assert witness.to_dict()["weight"] == 0.5

    def test_pure_pairs_agree(self):
        """Between two pure pairs a higher overlap loses on both measures"""
        witness = OrderWitness(0, 0.5, close_pure_pair(0.2), close_pure_pair(0.9), 0, 0, 0, 0)
        assert not witness.verify()

    def test_pure_only_search_finds_nothing(self):
        """Pure ensembles never produce a witness"""
        assert order_disagreement_search(SearchConfig(seed=2, trials=60, pure_only=True)) == []

    def test_mixed_witnesses_verify(self):
        """Any witness reported by the search re-verifies"""
        witnesses = order_disagreement_search(SearchConfig(seed=5, trials=80))
        assert all(w.verify() for w in witnesses)
        assert all(w.fidelity_first < w.fidelity_second for w in witnesses)

    def test_zero_trials(self):
        """No trials, no witnesses"""
        assert order_disagreement_search(SearchConfig(trials=0)) == []

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mulmin.multilinear import (
    MixedProfile,
    SelectorWeights,
    best_response,
    deviation_payoffs,
    expected_payoff,
    mixed_strategy,
    selector_value,
    unilateral_payoff,
)
from mulmin.tensor import PayoffTensor, random_game


def brute(t, player, strategies):
    total = 0.0
    for I in itertools.product(*(range(k) for k in t.shape.strategy_counts)):
        w = 1.0
        for k, j in enumerate(I):
            w *= strategies[k][j]
        total += t.payoffs[(player,) + I] * w
    return total


def random_profile(rng, counts):
    return MixedProfile(tuple(rng.dirichlet(np.ones(k)) for k in counts))


SHAPES = [(2, 2), (3, 2), (2, 3, 2), (1, 4), (2, 2, 2, 2)]


class TestMixedStrategy:
    def test_renormalizes_tiny_drift(self):
        v = mixed_strategy([0.5, 0.5 + 5e-13])
        assert abs(v.sum() - 1.0) <= 1e-15

    @pytest.mark.parametrize("probs", [[0.5, 0.6], [1.2, -0.2], [], [np.nan, 1.0]])
    def test_rejects(self, probs):
        with pytest.raises(ValueError):
            mixed_strategy(probs)

    def test_selector_positive_flag(self):
        assert SelectorWeights([0.2, 0.8]).strictly_positive
        assert not SelectorWeights([0.0, 1.0]).strictly_positive


class TestExpectedPayoff:
    def test_constant(self):
        t = PayoffTensor.constant((2, 3), 4.5)
        p = random_profile(np.random.default_rng(0), (2, 3))
        assert expected_payoff(t, 1, p) == pytest.approx(4.5, abs=1e-14)

    def test_pennies_uniform(self, pennies):
        p = MixedProfile.uniform(pennies.shape)
        assert brute(pennies, 0, p.strategies) == 0.0
        assert expected_payoff(pennies, 0, p) == 0.0

    @pytest.mark.parametrize("counts", SHAPES)
    def test_pure_profile_is_lookup(self, counts):
        t = random_game(counts, 3)
        I = tuple(k - 1 for k in counts)
        p = MixedProfile.pure(t.shape, I)
        for i in range(t.num_players):
            assert expected_payoff(t, i, p) == t.payoffs[(i,) + I]

    @pytest.mark.parametrize("counts", SHAPES)
    def test_matches_brute_force(self, counts):
        rng = np.random.default_rng(1)
        t = random_game(counts, 11)
        for _ in range(5):
            p = random_profile(rng, counts)
            for i in range(t.num_players):
                assert expected_payoff(t, i, p) == pytest.approx(brute(t, i, p.strategies), abs=1e-12)

    def test_shape_mismatch(self, pennies):
        with pytest.raises(ValueError):
            expected_payoff(pennies, 0, MixedProfile.uniform(random_game((3, 2), 0).shape))


class TestUnilateral:
    def test_same_strategy(self):
        rng = np.random.default_rng(2)
        t = random_game((2, 3, 2), 4)
        p = random_profile(rng, (2, 3, 2))
        assert unilateral_payoff(t, 1, p, p[1]) == pytest.approx(expected_payoff(t, 1, p), abs=1e-14)

    def test_pennies_first_action(self, pennies):
        p = MixedProfile.uniform(pennies.shape)
        # player 2 at (1/2,1/2): +1 and -1 equally likely
        assert unilateral_payoff(pennies, 0, p, [1.0, 0.0]) == 0.0

    def test_length_mismatch(self, pennies):
        with pytest.raises(ValueError):
            unilateral_payoff(pennies, 0, MixedProfile.uniform(pennies.shape), [1.0, 0.0, 0.0])

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
    def test_multilinearity(self, seed, lam):
        rng = np.random.default_rng(seed)
        counts = (2, 3, 2)
        t = random_game(counts, seed)
        p = random_profile(rng, counts)
        for i, k in enumerate(counts):
            x1, x2 = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
            mixed = lam * x1 + (1 - lam) * x2
            lhs = unilateral_payoff(t, i, p, mixed)
            rhs = lam * unilateral_payoff(t, i, p, x1) + (1 - lam) * unilateral_payoff(t, i, p, x2)
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("counts", SHAPES)
    def test_probability_weighted_identity(self, counts):
        rng = np.random.default_rng(7)
        t = random_game(counts, 8)
        p = random_profile(rng, counts)
        for i in range(t.num_players):
            assert p[i] @ deviation_payoffs(t, i, p) == pytest.approx(expected_payoff(t, i, p), abs=1e-10)


class TestBestResponse:
    def test_one_player(self):
        t = PayoffTensor.from_flat([2], [[3.0, 5.0]])
        assert best_response(t, 0, MixedProfile.uniform(t.shape)) == (5.0, 1)

    def test_constant_lowest_index(self):
        t = PayoffTensor.constant((3, 2), 2.0)
        assert best_response(t, 0, MixedProfile.uniform(t.shape)) == (2.0, 0)

    def test_dilemma_defect_against_cooperate(self, dilemma):
        p = MixedProfile.pure(dilemma.shape, (0, 0))
        # defecting against a cooperator pays T=5, cooperating pays R=3
        assert best_response(dilemma, 0, p) == (5.0, 1)

    @pytest.mark.parametrize("counts", SHAPES)
    def test_dominates_expected(self, counts):
        rng = np.random.default_rng(3)
        t = random_game(counts, 5)
        for _ in range(10):
            p = random_profile(rng, counts)
            for i in range(t.num_players):
                assert best_response(t, i, p)[0] >= expected_payoff(t, i, p) - 1e-12


class TestSelectorValue:
    def test_unit_selector(self):
        rng = np.random.default_rng(4)
        t = random_game((2, 3, 2), 6)
        p = random_profile(rng, (2, 3, 2))
        assert selector_value(t, [0, 1, 0], p) == pytest.approx(expected_payoff(t, 1, p), abs=1e-14)

    def test_zero(self):
        t = PayoffTensor.zeros((2, 2))
        assert selector_value(t, SelectorWeights.uniform(2), MixedProfile.uniform(t.shape)) == 0.0

    def test_pennies_zero_sum(self, pennies):
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = random_profile(rng, (2, 2))
            brute_val = 0.5 * brute(pennies, 0, p.strategies) + 0.5 * brute(pennies, 1, p.strategies)
            assert brute_val == pytest.approx(0.0, abs=1e-15)
            assert selector_value(pennies, [0.5, 0.5], p) == pytest.approx(0.0, abs=1e-15)

    def test_wrong_length(self, pennies):
        with pytest.raises(ValueError):
            selector_value(pennies, [1.0], MixedProfile.uniform(pennies.shape))

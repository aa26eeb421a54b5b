import numpy as np
import pytest

from mulmin import oracle
from mulmin.minimax import solve_minimax
from mulmin.multilinear import MixedProfile
from mulmin.nashmap import state
from mulmin.tensor import PayoffTensor, random_game


class TestPure:
    def test_dilemma(self, dilemma):
        assert oracle.pure_equilibria(dilemma) == [(1, 1)]

    def test_pennies(self, pennies):
        assert oracle.pure_equilibria(pennies) == []

    def test_constant(self):
        assert len(oracle.pure_equilibria(PayoffTensor.constant((2, 3, 2), 1.0))) == 12

    def test_sexes(self, sexes):
        assert oracle.pure_equilibria(sexes) == [(0, 0), (1, 1)]


class TestMixed2x2:
    def test_pennies(self, pennies):
        cert, degenerate = oracle.mixed_2x2(pennies)
        assert not degenerate
        assert cert.profile.to_lists() == [[0.5, 0.5], [0.5, 0.5]] and cert.residual == 0.0

    def test_dilemma(self, dilemma):
        assert oracle.mixed_2x2(dilemma) == (None, False)

    def test_sexes(self, sexes):
        cert, _ = oracle.mixed_2x2(sexes)
        np.testing.assert_allclose(cert.profile.to_lists(), [[2 / 3, 1 / 3], [1 / 3, 2 / 3]], atol=1e-15)
        assert cert.residual <= 1e-12
        assert state(sexes, cert.profile).residual <= 1e-12

    def test_degenerate(self):
        assert oracle.mixed_2x2(PayoffTensor.constant((2, 2), 1.0)) == (None, True)

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            oracle.mixed_2x2(random_game((2, 3), 0))


class TestSupportEnumeration:
    def test_pennies_unique(self, pennies):
        certs = oracle.support_enumeration(pennies)
        assert len(certs) == 1
        np.testing.assert_allclose(certs[0].profile.to_lists(), [[0.5, 0.5], [0.5, 0.5]])

    @pytest.mark.parametrize("seed", range(30))
    def test_2x2_is_pure_plus_closed_form(self, seed):
        t = random_game((2, 2), seed)
        expected = [MixedProfile.pure(t.shape, I) for I in oracle.pure_equilibria(t)]
        mixed, _ = oracle.mixed_2x2(t)
        if mixed is not None:
            expected.append(mixed.profile)
        found = [c.profile for c in oracle.support_enumeration(t)]
        assert len(found) == len(expected)
        for p in expected:
            assert any(max(np.max(np.abs(a - b)) for a, b in zip(p, f)) < 1e-9 for f in found)

    def test_zero_three_player_has_uniform(self):
        t = PayoffTensor.zeros((2, 2, 2))
        certs = oracle.support_enumeration(t)
        assert any(c.profile == MixedProfile.uniform(t.shape) and c.residual == 0.0 for c in certs)

    def test_budget_refusal(self):
        with pytest.raises(oracle.OracleRefusal):
            oracle.support_enumeration(random_game((3, 3), 0), max_supports=10)

    @pytest.mark.parametrize("counts", [(3, 3), (2, 2, 2), (3, 2, 2), (2, 2, 2, 2)])
    def test_sound_under_independent_gains(self, counts):
        for seed in range(4):
            t = random_game(counts, seed)
            certs = oracle.support_enumeration(t)
            assert certs
            for c in certs:
                assert c.residual <= 1e-9
                assert state(t, c.profile).residual <= 1e-9

    @pytest.mark.parametrize("counts", [(2, 2), (3, 3), (2, 2, 2)])
    def test_singletons_match_pure(self, counts):
        for seed in range(5):
            t = random_game(counts, seed)
            pure = {tuple(int(np.argmax(s)) for s in c.profile)
                    for c in oracle.support_enumeration(t) if c.kind == "pure"}
            assert pure == set(oracle.pure_equilibria(t))


class TestGrid:
    def test_zero(self):
        assert oracle.grid_minimax(PayoffTensor.zeros((2, 2)), 7) == 0.0

    def test_one_player(self):
        assert oracle.grid_minimax(PayoffTensor.from_flat([2], [[3.0, 5.0]]), 10) == 5.0

    def test_pennies(self, pennies):
        # objective is |x_1 - x_2|; 1000 is even so x = (1/2, 1/2) lies on the grid
        assert abs(oracle.grid_minimax(pennies, 1000)) <= 2 / 1000

    def test_refuses_four_players(self):
        with pytest.raises(oracle.OracleRefusal):
            oracle.grid_minimax(random_game((2, 2, 2, 2), 0), 10)

    @pytest.mark.parametrize("counts", [(2, 2), (3, 3), (2, 2, 2)])
    def test_converges_within_envelope(self, counts):
        t = random_game(counts, 6)
        value = solve_minimax(t).value
        prev = np.inf
        for r in (10, 100, 1000):
            g = oracle.grid_minimax(t, r)
            assert value - 1e-12 <= g <= value + oracle.lipschitz_envelope(t, r)
            assert g <= prev
            prev = g

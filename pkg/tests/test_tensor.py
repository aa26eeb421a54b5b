import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mulmin.tensor import (
    GameFormatError,
    GameShape,
    PayoffTensor,
    get_payoff,
    load_game,
    profile_iter,
    random_game,
    save_game,
)


class TestProfileIter:
    def test_2x2_row_major(self):
        assert list(profile_iter(GameShape((2, 2)))) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_singleton(self):
        assert list(profile_iter(GameShape((1, 1, 1)))) == [(0, 0, 0)]

    def test_2x3_third_profile(self):
        profiles = list(profile_iter(GameShape((2, 3))))
        assert len(profiles) == 6
        assert profiles[2] == (0, 2)  # (1,3) one-based

    @pytest.mark.parametrize("counts", [(3,), (2, 3, 2), (1, 4, 1, 2)])
    def test_count_and_distinct(self, counts):
        shape = GameShape(counts)
        profiles = list(profile_iter(shape))
        assert len(profiles) == len(set(profiles)) == shape.total_profiles()

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            GameShape(())
        with pytest.raises(ValueError):
            GameShape((2, 0))


class TestGetPayoff:
    def test_zero_tensor(self):
        t = PayoffTensor.zeros((2, 3))
        assert get_payoff(t, 1, (1, 2)) == 0.0

    def test_matching_pennies(self, pennies):
        assert get_payoff(pennies, 0, (0, 0)) == 1.0

    def test_one_player(self):
        t = PayoffTensor.from_flat([2], [[3.0, 5.0]])
        assert get_payoff(t, 0, (1,)) == 5.0

    @pytest.mark.parametrize("player,profile", [(2, (0, 0)), (-1, (0, 0)), (0, (2, 0)), (0, (0,))])
    def test_range_errors(self, pennies, player, profile):
        with pytest.raises(IndexError):
            get_payoff(pennies, player, profile)

    def test_agrees_with_flat_order(self):
        t = random_game((3, 2, 4), seed=9)
        for k, I in enumerate(profile_iter(t.shape)):
            for i in range(3):
                assert get_payoff(t, i, I) == t.flat[i, k]


class TestTensor:
    def test_immutable(self):
        t = random_game((2, 2), 1)
        with pytest.raises(ValueError):
            t.payoffs[0, 0, 0] = 1.0

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            PayoffTensor(np.array([[np.nan, 1.0]]))

    def test_rejects_bad_layout(self):
        with pytest.raises(ValueError):
            PayoffTensor(np.zeros((3, 2, 2)))


class TestRandomGame:
    def test_deterministic(self):
        assert random_game((2, 2), 42) == random_game((2, 2), 42)

    def test_seed_changes_entries(self):
        assert random_game((2, 2), 42) != random_game((2, 2), 43)

    def test_bounds(self):
        t = random_game((3, 3), 5, lo=2.0, hi=3.0)
        assert t.payoffs.min() >= 2.0 and t.payoffs.max() < 3.0

    @pytest.mark.parametrize("lo,hi", [(1.0, 1.0), (2.0, 1.0)])
    def test_bad_range(self, lo, hi):
        with pytest.raises(ValueError):
            random_game((2, 2), 0, lo, hi)

    def test_pinned_stream(self):
        # PCG64 stream is stable across platforms; pin the first draws.
        u = np.random.Generator(np.random.PCG64(42)).random(2)
        t = random_game((2, 2), 42, 0.0, 1.0)
        assert t.flat[0, :2].tolist() == u.tolist()


class TestFileFormat:
    def test_round_trip_100(self):
        rng = np.random.default_rng(0)
        for k in range(100):
            counts = tuple(int(c) for c in rng.integers(1, 4, size=rng.integers(1, 4)))
            t = random_game(counts, seed=k, lo=-1e3, hi=1e3)
            text = save_game(t)
            assert load_game(text) == t
            assert save_game(load_game(text)) == text

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=4, max_size=4),
           st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=4, max_size=4))
    def test_round_trip_exact_floats(self, a, b):
        t = PayoffTensor.from_flat([2, 2], [a, b])
        assert load_game(save_game(t)) == t

    def test_comments_and_layout(self):
        text = "# hi\nplayers 1\n# mid\nshape 3\npayoffs 1\n1 2\n  3\n"
        t = load_game(text)
        assert t.flat.tolist() == [[1.0, 2.0, 3.0]]

    @pytest.mark.parametrize("text,line,col", [
        ("player 2\n", 1, 1),
        ("players 2\nshape 2\n", 2, 1),  # runs out while reading shape
        ("players 1\nshape 2\npayoffs 1\n1 x\n", 4, 3),
        ("players 1\nshape 2\npayoffs 1\n1\n", 4, 1),
        ("players 1\nshape 2\npayoffs 1\n1 2 3\n", 4, 5),
        ("players 2\nshape 1 1\npayoffs 2\n1\n", 3, 9),
        ("players 1\nshape 0\n", 2, 7),
    ])
    def test_parse_errors_locate(self, text, line, col):
        with pytest.raises(GameFormatError) as err:
            load_game(text)
        assert err.value.line == line
        assert err.value.column == col

    def test_wrong_count_before_next_block(self):
        text = "players 2\nshape 2 1\npayoffs 1\n1\npayoffs 2\n1 2\n"
        with pytest.raises(GameFormatError) as err:
            load_game(text)
        assert "expected 2" in str(err.value)
        assert err.value.line == 5

"""Mixed strategies and the multilinear forms evaluated on them.

Notation used in names below: for player ``i`` and mixed profile ``p``,
``expected_payoff`` is ``A_i[p]``, ``unilateral_payoff`` is ``A_i[p | x]``
(player ``i``'s strategy swapped for ``x``) and ``selector_value`` is the
aggregate ``A_0[x, p] = sum_i x_i A_i[p]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .tensor import GameShape, PayoffTensor

RENORMALIZE_TOL = 1e-12


def simplex_vector(probs: Sequence[float], *, tol: float = RENORMALIZE_TOL, what: str = "strategy") -> np.ndarray:
    """Validate a probability vector and renormalize it once.

    Rejects negative entries and sums further than ``tol`` from one.
    """
    v = np.array(probs, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError(f"{what} is empty")
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise ValueError(f"{what} must be finite and nonnegative: {v.tolist()}")
    total = v.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"{what} sums to {float(total)!r}, not 1")
    v = v / total
    v.setflags(write=False)
    return v


def mixed_strategy(probs: Sequence[float], size: int | None = None) -> np.ndarray:
    v = simplex_vector(probs)
    if size is not None and v.size != size:
        raise ValueError(f"strategy has {v.size} entries, expected {size}")
    return v


@dataclass(frozen=True, eq=False)
class MixedProfile:
    """One mixed strategy per player."""

    strategies: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(mixed_strategy(s) for s in self.strategies))

    @classmethod
    def uniform(cls, shape: GameShape) -> MixedProfile:
        return cls(tuple(np.full(k, 1.0 / k) for k in shape.strategy_counts))

    @classmethod
    def pure(cls, shape: GameShape, profile: Sequence[int]) -> MixedProfile:
        profile = shape.check_profile(profile)
        return cls(tuple(np.eye(k)[j] for k, j in zip(shape.strategy_counts, profile)))

    def replace(self, player: int, strategy: Sequence[float]) -> MixedProfile:
        strategies = list(self.strategies)
        strategies[player] = strategy
        return MixedProfile(tuple(strategies))

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.strategies)

    def joint(self) -> np.ndarray:
        """Product distribution ``p(I)`` as an array of shape ``(n_1, ..., n_n)``."""
        out = self.strategies[0]
        for s in self.strategies[1:]:
            out = np.multiply.outer(out, s)
        return np.asarray(out)

    def to_lists(self) -> list[list[float]]:
        return [s.tolist() for s in self.strategies]

    def __len__(self):
        return len(self.strategies)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.strategies)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.strategies[i]

    def __eq__(self, other):
        if not isinstance(other, MixedProfile):
            return NotImplemented
        return len(self) == len(other) and all(
            a.shape == b.shape and np.array_equal(a, b) for a, b in zip(self, other)
        )

    def __repr__(self):
        return f"MixedProfile({self.to_lists()})"


@dataclass(frozen=True, eq=False)
class SelectorWeights:
    """Convex weights over players (a point of the player simplex)."""

    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", simplex_vector(self.weights, what="selector weights"))

    @property
    def strictly_positive(self) -> bool:
        return bool(self.weights.min() > 0)

    @classmethod
    def uniform(cls, n: int) -> SelectorWeights:
        return cls(np.full(n, 1.0 / n))

    def __len__(self):
        return self.weights.size


def _check_profile(t: PayoffTensor, p: MixedProfile) -> None:
    if p.strategy_counts != t.shape.strategy_counts:
        raise ValueError(
            f"profile shape {list(p.strategy_counts)} does not match game shape "
            f"{list(t.shape.strategy_counts)}"
        )


def _check_player(t: PayoffTensor, player: int) -> None:
    if not 0 <= player < t.num_players:
        raise IndexError(f"player {player} out of range for {t.num_players}-player game")


def expected_payoff(t: PayoffTensor, player: int, p: MixedProfile) -> float:
    """``A_player[p]``: sum over all pure profiles of payoff times ``p(I)``."""
    _check_player(t, player)
    _check_profile(t, p)
    return float(np.sum(t.payoffs[player] * p.joint()))


def expected_payoffs(t: PayoffTensor, p: MixedProfile) -> np.ndarray:
    """``A_i[p]`` for every player at once."""
    _check_profile(t, p)
    return t.flat @ p.joint().reshape(-1)


def unilateral_payoff(t: PayoffTensor, player: int, p: MixedProfile, x: Sequence[float]) -> float:
    _check_player(t, player)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (t.shape.strategy_counts[player],):
        raise ValueError(
            f"deviation has {x.size} entries, player {player} has "
            f"{t.shape.strategy_counts[player]} actions"
        )
    _check_profile(t, p)
    # Build p(I) with player's factor replaced; x need not be a distribution.
    out = np.ones(())
    for k, s in enumerate(p.strategies):
        out = np.multiply.outer(out, x if k == player else s)
    return float(np.sum(t.payoffs[player] * out))


def deviation_payoffs(t: PayoffTensor, player: int, p: MixedProfile) -> np.ndarray:
    """``A_player[p | e_j]`` for every pure action ``j`` of ``player``."""
    _check_player(t, player)
    _check_profile(t, p)
    others = np.ones(())
    for k, s in enumerate(p.strategies):
        others = np.multiply.outer(others, np.ones(1) if k == player else s)
    # others has a length-1 axis at `player`; broadcasting sums the rest out.
    axes = tuple(k for k in range(t.num_players) if k != player)
    return np.sum(t.payoffs[player] * others, axis=axes)


def best_response(t: PayoffTensor, player: int, p: MixedProfile) -> tuple[float, int]:
    """Best pure reply value and the lowest (0-based) action attaining it."""
    values = deviation_payoffs(t, player, p)
    action = int(np.argmax(values))
    return float(values[action]), action


def selector_value(t: PayoffTensor, x: SelectorWeights | Sequence[float], p: MixedProfile) -> float:
    weights = x.weights if isinstance(x, SelectorWeights) else np.asarray(x, dtype=np.float64)
    if weights.shape != (t.num_players,):
        raise ValueError(f"selector has {weights.size} entries, game has {t.num_players} players")
    return float(weights @ expected_payoffs(t, p))

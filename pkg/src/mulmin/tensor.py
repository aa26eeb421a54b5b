"""Payoff tensors for n-player normal-form games.

A game with ``n`` players and strategy counts ``(n_1, ..., n_n)`` is stored as
a dense float64 array of shape ``(n, n_1, ..., n_n)``; ``payoffs[i][I]`` is
player ``i``'s payoff at pure profile ``I``.  Profiles are flattened in
row-major order (last player's index varies fastest).  That order is shared
by LP columns, dual vectors ``q`` and the ``.mmg`` file format.

Indices are 0-based in this module's Python API and 1-based in every file
and CLI surface.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

FIXTURES = ("matching_pennies", "prisoners_dilemma", "battle_of_sexes")


class GameFormatError(ValueError):
    """Raised when a ``.mmg`` document cannot be parsed."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class GameShape:
    strategy_counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(k) for k in self.strategy_counts)
        if not counts:
            raise ValueError("a game needs at least one player")
        if any(k < 1 for k in counts):
            raise ValueError(f"strategy counts must be positive, got {counts}")
        object.__setattr__(self, "strategy_counts", counts)

    @property
    def num_players(self) -> int:
        return len(self.strategy_counts)

    def total_profiles(self) -> int:
        return math.prod(self.strategy_counts)

    def check_profile(self, profile: Sequence[int]) -> tuple[int, ...]:
        profile = tuple(int(k) for k in profile)
        if len(profile) != self.num_players:
            raise IndexError(
                f"profile {profile} has {len(profile)} entries, game has "
                f"{self.num_players} players"
            )
        for k, (idx, size) in enumerate(zip(profile, self.strategy_counts)):
            if not 0 <= idx < size:
                raise IndexError(f"action {idx} out of range for player {k} ({size} actions)")
        return profile

    def flat_index(self, profile: Sequence[int]) -> int:
        return int(np.ravel_multi_index(self.check_profile(profile), self.strategy_counts))


def profile_iter(shape: GameShape) -> Iterator[tuple[int, ...]]:
    """Yield every pure profile (0-based) in canonical row-major order."""
    return itertools.product(*(range(k) for k in shape.strategy_counts))


@dataclass(frozen=True, eq=False)
class PayoffTensor:
    """Immutable ``(n, n_1, ..., n_n)`` payoff array."""

    payoffs: np.ndarray
    shape: GameShape = field(init=False)

    def __post_init__(self):
        arr = np.array(self.payoffs, dtype=np.float64)
        if arr.ndim < 2 or arr.shape[0] != arr.ndim - 1:
            raise ValueError(
                f"payoff array must have shape (n, n_1, ..., n_n); got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("payoffs must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "payoffs", arr)
        object.__setattr__(self, "shape", GameShape(arr.shape[1:]))

    @classmethod
    def from_flat(cls, strategy_counts: Sequence[int], flat: Sequence[Sequence[float]]) -> PayoffTensor:
        """Build from one row-major payoff list per player."""
        shape = GameShape(tuple(strategy_counts))
        arr = np.asarray(flat, dtype=np.float64)
        expected = (shape.num_players, shape.total_profiles())
        if arr.shape != expected:
            raise ValueError(f"expected flat payoffs of shape {expected}, got {arr.shape}")
        return cls(arr.reshape((shape.num_players,) + shape.strategy_counts))

    @classmethod
    def zeros(cls, strategy_counts: Sequence[int]) -> PayoffTensor:
        shape = GameShape(tuple(strategy_counts))
        return cls(np.zeros((shape.num_players,) + shape.strategy_counts))

    @classmethod
    def constant(cls, strategy_counts: Sequence[int], value: float) -> PayoffTensor:
        shape = GameShape(tuple(strategy_counts))
        return cls(np.full((shape.num_players,) + shape.strategy_counts, float(value)))

    @property
    def num_players(self) -> int:
        return self.shape.num_players

    @property
    def flat(self) -> np.ndarray:
        """``(n, n_hat)`` view: row ``i`` is player ``i``'s payoffs in canonical order."""
        return self.payoffs.reshape(self.num_players, -1)

    def __eq__(self, other):
        if not isinstance(other, PayoffTensor):
            return NotImplemented
        return self.payoffs.shape == other.payoffs.shape and bool(
            np.array_equal(self.payoffs, other.payoffs)
        )

    def __hash__(self):
        return hash((self.payoffs.shape, self.payoffs.tobytes()))

    def __repr__(self):
        return f"PayoffTensor(shape={list(self.shape.strategy_counts)})"


def get_payoff(t: PayoffTensor, player: int, profile: Sequence[int]) -> float:
    """Payoff ``a(player, profile)``; both 0-based."""
    if not 0 <= player < t.num_players:
        raise IndexError(f"player {player} out of range for {t.num_players}-player game")
    return float(t.payoffs[(player,) + t.shape.check_profile(profile)])


def random_game(
    strategy_counts: Sequence[int], seed: int, lo: float = -1.0, hi: float = 1.0
) -> PayoffTensor:
    """I.i.d. uniform payoffs on ``[lo, hi)``.

    Uses numpy's PCG64 bit generator seeded with ``seed``; entries are
    ``lo + (hi - lo) * u`` with ``u`` drawn by ``Generator.random`` in
    canonical order, player 1 first.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    shape = GameShape(tuple(strategy_counts))
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random((shape.num_players,) + shape.strategy_counts)
    return PayoffTensor(lo + (hi - lo) * u)


def save_game(t: PayoffTensor) -> str:
    lines = [
        f"players {t.num_players}",
        "shape " + " ".join(str(k) for k in t.shape.strategy_counts),
    ]
    for i, row in enumerate(t.flat, start=1):
        lines.append(f"payoffs {i}")
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("#"):
            continue
        col = 0
        for tok in line.split():
            col = line.index(tok, col)
            yield tok, lineno, col + 1
            col += len(tok)


def load_game(text: str) -> PayoffTensor:
    """Parse a ``.mmg`` document; errors name the offending line and column."""
    toks = list(_tokens(text))
    pos = 0
    last_line = max(1, len(text.splitlines()))

    def take(what: str) -> tuple[str, int, int]:
        nonlocal pos
        if pos >= len(toks):
            raise GameFormatError(f"unexpected end of input, expected {what}", last_line)
        tok = toks[pos]
        pos += 1
        return tok

    def keyword(word: str) -> None:
        tok, line, col = take(f"'{word}'")
        if tok != word:
            raise GameFormatError(f"expected '{word}', found '{tok}'", line, col)

    def integer(what: str) -> int:
        tok, line, col = take(what)
        try:
            value = int(tok)
        except ValueError:
            raise GameFormatError(f"expected integer {what}, found '{tok}'", line, col) from None
        if value < 1:
            raise GameFormatError(f"{what} must be positive, found {value}", line, col)
        return value

    keyword("players")
    n = integer("player count")
    keyword("shape")
    counts = [integer(f"strategy count for player {k + 1}") for k in range(n)]
    n_hat = math.prod(counts)

    flat = np.empty((n, n_hat))
    for i in range(1, n + 1):
        keyword("payoffs")
        tok, line, col = take("player index")
        if tok != str(i):
            raise GameFormatError(f"expected payoffs block for player {i}, found '{tok}'", line, col)
        for k in range(n_hat):
            if pos >= len(toks) or toks[pos][0] == "payoffs":
                where = toks[pos][1:] if pos < len(toks) else (last_line, 1)
                raise GameFormatError(
                    f"player {i} has {k} payoffs, expected {n_hat}", *where
                )
            tok, line, col = take("payoff")
            try:
                value = float(tok)
            except ValueError:
                raise GameFormatError(f"non-numeric payoff '{tok}'", line, col) from None
            if not math.isfinite(value):
                raise GameFormatError(f"non-finite payoff '{tok}'", line, col)
            flat[i - 1, k] = value
    if pos < len(toks):
        tok, line, col = toks[pos]
        raise GameFormatError(f"trailing token '{tok}' (wrong payoff count?)", line, col)
    return PayoffTensor.from_flat(counts, flat)


def read_game(path: str | Path) -> PayoffTensor:
    return load_game(Path(path).read_text(encoding="utf-8"))


def write_game(t: PayoffTensor, path: str | Path) -> None:
    Path(path).write_text(save_game(t), encoding="utf-8")


def load_fixture(name: str) -> PayoffTensor:
    """One of the canonical 2x2 games shipped with the package (see ``FIXTURES``)."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    text = resources.files("mulmin.fixtures").joinpath(f"{name}.mmg").read_text(encoding="utf-8")
    return load_game(text)

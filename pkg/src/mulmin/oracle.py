"""Brute-force ground truth for tiny games.

Certification evaluates payoffs with plain loops over pure profiles, so it
shares no code with the vectorized evaluators it is used to check.
Certificates are only emitted after their best-reply residual has been
verified; unverifiable candidates are dropped.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .multilinear import MixedProfile
from .tensor import PayoffTensor

CERT_TOL = 1e-9
DEFAULT_BUDGET = 5000


class OracleRefusal(ValueError):
    """The requested enumeration is outside the oracle's budget."""


@dataclass(frozen=True, eq=False)
class EquilibriumCertificate:
    profile: MixedProfile
    kind: str  # pure | mixed_2x2_closed_form | support_enumeration
    residual: float


def _profiles(counts):
    return itertools.product(*(range(k) for k in counts))


def brute_payoff(t: PayoffTensor, player: int, strategies) -> float:
    total = 0.0
    for I in _profiles(t.shape.strategy_counts):
        w = 1.0
        for k, j in enumerate(I):
            w *= strategies[k][j]
        if w:
            total += t.payoffs[(player,) + I] * w
    return total


def brute_residual(t: PayoffTensor, strategies) -> float:
    """Largest gain any player gets from a pure unilateral deviation."""
    worst = 0.0
    for i, k in enumerate(t.shape.strategy_counts):
        base = brute_payoff(t, i, strategies)
        for j in range(k):
            dev = list(strategies)
            dev[i] = [1.0 if a == j else 0.0 for a in range(k)]
            worst = max(worst, brute_payoff(t, i, dev) - base)
    return worst


def pure_equilibria(t: PayoffTensor) -> list[tuple[int, ...]]:
    """All pure profiles (0-based) where no player gains by switching action."""
    counts = t.shape.strategy_counts
    found = []
    for I in _profiles(counts):
        stable = True
        for i, k in enumerate(counts):
            own = t.payoffs[(i,) + I]
            for j in range(k):
                alt = I[:i] + (j,) + I[i + 1:]
                if t.payoffs[(i,) + alt] > own:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            found.append(I)
    return found


def mixed_2x2(t: PayoffTensor) -> tuple[EquilibriumCertificate | None, bool]:
    """Closed-form fully mixed equilibrium of a 2x2 game.

    Returns ``(certificate, degenerate)``.  ``degenerate`` is true when an
    indifference equation has no unique solution (a player is indifferent
    between columns regardless of the opponent's mix).
    """
    if t.shape.strategy_counts != (2, 2):
        raise ValueError("mixed_2x2 needs a 2-player 2x2 game")
    A, B = t.payoffs[0], t.payoffs[1]
    # Player 1 mixes (a, 1-a) to make player 2 indifferent between columns.
    den_a = B[0, 0] - B[1, 0] - B[0, 1] + B[1, 1]
    # Player 2 mixes (b, 1-b) to make player 1 indifferent between rows.
    den_b = A[0, 0] - A[0, 1] - A[1, 0] + A[1, 1]
    if den_a == 0 or den_b == 0:
        return None, True
    a = (B[1, 1] - B[1, 0]) / den_a
    b = (A[1, 1] - A[0, 1]) / den_b
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        return None, False
    strategies = [[a, 1.0 - a], [b, 1.0 - b]]
    res = brute_residual(t, strategies)
    if res > CERT_TOL:
        return None, False
    return EquilibriumCertificate(MixedProfile(tuple(np.array(s) for s in strategies)),
                                  "mixed_2x2_closed_form", res), False


def _nonempty_subsets(k: int):
    for r in range(1, k + 1):
        yield from itertools.combinations(range(k), r)


def support_count(t: PayoffTensor) -> int:
    return math.prod(2 ** k - 1 for k in t.shape.strategy_counts)


def _indifference_2p(t: PayoffTensor, s1, s2):
    """Solve for both players' mixes on supports ``s1``, ``s2`` by least squares."""
    out = []
    for me, other, s_me, s_other in ((0, 1, s1, s2), (1, 0, s2, s1)):
        M = t.payoffs[me] if me == 0 else t.payoffs[me].T  # rows: my action
        # Unknowns: other's probabilities on s_other, then my value v.
        rows = [[M[j, l] for l in s_other] + [-1.0] for j in s_me]
        rows.append([1.0] * len(s_other) + [0.0])
        rhs = [0.0] * len(s_me) + [1.0]
        sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        full = np.zeros(t.shape.strategy_counts[other])
        full[list(s_other)] = sol[:-1]
        out.append((other, full))
    strategies = [None, None]
    for player, mix in out:
        strategies[player] = mix
    return strategies


def _indifference_np(t: PayoffTensor, supports):
    """Newton-type root solve of the n-player indifference system, seeded at uniform."""
    counts = t.shape.strategy_counts
    n = len(counts)
    sizes = [len(s) for s in supports]
    offsets = np.cumsum([0] + sizes)

    def unpack(z):
        strategies = []
        for i in range(n):
            mix = np.zeros(counts[i])
            mix[list(supports[i])] = z[offsets[i]:offsets[i + 1]]
            strategies.append(mix)
        return strategies, z[offsets[-1]:]

    letters = "abcdefghijklmnopqrstuvwxyz"[:n]

    def deviations(i, strategies):
        # contract every axis except player i's own
        ops = [strategies[k] for k in range(n) if k != i]
        subs = ",".join(letters[k] for k in range(n) if k != i)
        return np.einsum(f"{letters},{subs}->{letters[i]}", t.payoffs[i], *ops)

    def equations(z):
        strategies, values = unpack(z)
        eqs = []
        for i in range(n):
            dev = deviations(i, strategies)
            eqs.extend(dev[list(supports[i])] - values[i])
            eqs.append(strategies[i].sum() - 1.0)
        return np.array(eqs)

    z0 = np.concatenate([np.full(k, 1.0 / k) for k in sizes] + [np.zeros(n)])
    start, _ = unpack(z0)
    z0[offsets[-1]:] = [brute_payoff(t, i, start) for i in range(n)]
    sol = optimize.root(equations, z0, method="hybr")
    strategies, _ = unpack(sol.x)
    return strategies


def _clean(mix: np.ndarray) -> np.ndarray | None:
    if not np.all(np.isfinite(mix)) or mix.min() < -1e-9:
        return None
    mix = np.clip(mix, 0.0, None)
    total = mix.sum()
    if total <= 0 or abs(total - 1.0) > 1e-9:
        return None
    return mix / total


def support_enumeration(t: PayoffTensor, max_supports: int = DEFAULT_BUDGET) -> list[EquilibriumCertificate]:
    """Verified equilibria found by enumerating support combinations.

    Sound but not complete for three or more players: the per-support
    polynomial system is solved from a single start and any candidate whose
    residual exceeds ``1e-9`` is discarded.  Duplicates (within 1e-7) are
    merged.
    """
    total = support_count(t)
    if total > max_supports:
        raise OracleRefusal(f"{total} support combinations exceed the budget of {max_supports}")
    counts = t.shape.strategy_counts
    found: list[EquilibriumCertificate] = []
    seen: list[np.ndarray] = []
    for supports in itertools.product(*(_nonempty_subsets(k) for k in counts)):
        if all(len(s) == 1 for s in supports):
            strategies = [np.eye(k)[s[0]] for k, s in zip(counts, supports)]
        elif len(counts) == 2:
            strategies = _indifference_2p(t, *supports)
        else:
            strategies = _indifference_np(t, supports)
        cleaned = [_clean(np.asarray(s, dtype=np.float64)) for s in strategies]
        if any(c is None for c in cleaned):
            continue
        res = brute_residual(t, cleaned)
        if res > CERT_TOL:
            continue
        key = np.concatenate(cleaned)
        if any(np.max(np.abs(key - other)) <= 1e-7 for other in seen):
            continue
        seen.append(key)
        kind = "pure" if all(c.max() == 1.0 for c in cleaned) else "support_enumeration"
        found.append(EquilibriumCertificate(MixedProfile(tuple(cleaned)), kind, res))
    return found


def certificates(t: PayoffTensor, max_supports: int = DEFAULT_BUDGET) -> list[EquilibriumCertificate]:
    """Pure equilibria plus, for 2x2 games, the closed form, plus support enumeration."""
    certs = [
        EquilibriumCertificate(MixedProfile.pure(t.shape, I), "pure", 0.0)
        for I in pure_equilibria(t)
    ]
    if t.shape.strategy_counts == (2, 2):
        mixed, _ = mixed_2x2(t)
        if mixed is not None:
            certs.append(mixed)
    try:
        extra = support_enumeration(t, max_supports)
    except OracleRefusal:
        extra = []
    keys = [np.concatenate(c.profile.strategies) for c in certs]
    for c in extra:
        key = np.concatenate(c.profile.strategies)
        if all(np.max(np.abs(key - k)) > 1e-7 for k in keys):
            certs.append(c)
            keys.append(key)
    return certs


def _grid(n: int, r: int) -> np.ndarray:
    """All points of the player simplex with coordinates in ``{0, 1/r, ..., 1}``."""
    if n == 1:
        return np.ones((1, 1))
    pts = []
    for head in itertools.product(range(r + 1), repeat=n - 1):
        s = sum(head)
        if s <= r:
            pts.append(head + (r - s,))
    return np.array(pts, dtype=np.float64) / r


def grid_minimax(t: PayoffTensor, resolution: int) -> float:
    """Upper estimate of the minimax value by grid search over the player simplex.

    The inner maximum over mixed profiles is exact: a multilinear form
    peaks at a pure profile.
    """
    n = t.num_players
    if n > 3:
        raise OracleRefusal(f"grid search over a {n}-player simplex is not supported (n <= 3)")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    flat = t.payoffs.reshape(n, -1)
    best = math.inf
    for chunk in np.array_split(_grid(n, resolution), max(1, resolution // 50)):
        best = min(best, float(np.min(np.max(chunk @ flat, axis=1))))
    return best


def lipschitz_envelope(t: PayoffTensor, resolution: int) -> float:
    """Bound on ``grid_minimax(t, r) - value``: ``n * max|a| / r``."""
    return t.num_players * float(np.abs(t.payoffs).max()) / resolution

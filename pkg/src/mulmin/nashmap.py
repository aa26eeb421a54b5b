"""The gain-normalization map whose fixed points are Nash equilibria.

For player ``i`` and action ``j`` the gain is
``G[i][j] = max(0, A_i[p | e_j] - A_i[p])``; the map sends ``p^i_j`` to
``(p^i_j + G[i][j]) / (1 + sum_k G[i][k])``.  Iterating it is a diagnostic
only: it can cycle (matching pennies does) and nothing here promises
convergence.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .multilinear import MixedProfile, deviation_payoffs, expected_payoffs
from .tensor import PayoffTensor


@dataclass(frozen=True, eq=False)
class NashMapState:
    profile: MixedProfile
    gains: tuple[np.ndarray, ...]

    @property
    def gain_sums(self) -> np.ndarray:
        return np.array([g.sum() for g in self.gains])

    @property
    def residual(self) -> float:
        return float(max(g.max() for g in self.gains))


def gains(t: PayoffTensor, p: MixedProfile) -> tuple[np.ndarray, ...]:
    expected = expected_payoffs(t, p)
    return tuple(
        np.maximum(0.0, deviation_payoffs(t, i, p) - expected[i]) for i in range(t.num_players)
    )


def state(t: PayoffTensor, p: MixedProfile) -> NashMapState:
    return NashMapState(p, gains(t, p))


def _apply(p: MixedProfile, g: tuple[np.ndarray, ...]) -> MixedProfile:
    # Denominator is 1 + c_i because each p^i already sums to one.
    return MixedProfile(tuple((s + gi) / (1.0 + gi.sum()) for s, gi in zip(p, g)))


def nash_map_step(t: PayoffTensor, p: MixedProfile) -> MixedProfile:
    g = gains(t, p)
    if all(not gi.any() for gi in g):
        return p
    return _apply(p, g)


@dataclass(frozen=True, eq=False)
class NashMapTrace:
    final: NashMapState
    iterations: int
    residuals: tuple[float, ...]
    gain_sums: tuple[np.ndarray, ...]
    tol: float

    @property
    def converged(self) -> bool:
        return self.residuals[-1] <= self.tol


def iterate(t: PayoffTensor, p0: MixedProfile, max_iters: int = 1000, tol: float = 1e-9) -> NashMapTrace:
    """Apply the map until the max gain is ``<= tol`` or ``max_iters`` steps.

    Entry ``k`` of the trace describes the profile after ``k`` steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    st = state(t, p0)
    residuals = [st.residual]
    sums = [st.gain_sums]
    k = 0
    while st.residual > tol and k < max_iters:
        st = state(t, _apply(st.profile, st.gains))
        k += 1
        residuals.append(st.residual)
        sums.append(st.gain_sums)
    return NashMapTrace(st, k, tuple(residuals), tuple(sums), tol)


def trace_csv(trace: NashMapTrace) -> str:
    n = trace.gain_sums[0].size
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "residual"] + [f"c_{i + 1}" for i in range(n)])
    for k, (r, c) in enumerate(zip(trace.residuals, trace.gain_sums)):
        w.writerow([k, f"{r:.17g}"] + [f"{v:.17g}" for v in c])
    return buf.getvalue()

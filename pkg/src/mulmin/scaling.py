"""Diagonally scaled minimax problems and the projective reweighting of player weights.

Scaling player ``i``'s payoffs by ``d_i > 0`` leaves every equilibrium in
place but changes the minimax solution.  From the scaled selector ``x*(d)``
the next weights are ``d'_i = d_i x*_i(d) / sigma`` with
``sigma = sum_i d_i x*_i(d)``; each step yields the upper bound
``sum_i d'_i A_i[p_eq] <= sum_i d'_i A_i[p*(d)]`` for any equilibrium ``p_eq``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lp import LinearProgram, LpSolution, simplex_solve
from .minimax import MinimaxSolution, QualityReport, SolverError, quality, solve_minimax
from .multilinear import SelectorWeights, expected_payoffs
from .tensor import PayoffTensor

POS_TOL = 1e-9
CONV_TOL = 1e-9
MAX_ITERS = 100


def _weights(d: SelectorWeights | np.ndarray, n: int) -> SelectorWeights:
    d = d if isinstance(d, SelectorWeights) else SelectorWeights(d)
    if len(d) != n:
        raise ValueError(f"scaling weights have {len(d)} entries, game has {n} players")
    return d


def scale(t: PayoffTensor, d: SelectorWeights | np.ndarray) -> PayoffTensor:
    d = _weights(d, t.num_players)
    if not d.strictly_positive:
        raise ValueError("scaling weights must be strictly positive")
    w = d.weights.reshape((-1,) + (1,) * t.num_players)
    return PayoffTensor(t.payoffs * w)


@dataclass(frozen=True, eq=False)
class ScalingStep:
    d: SelectorWeights
    solution: MinimaxSolution
    sigma: float
    d_next: np.ndarray
    bound_rhs: float
    quality: QualityReport
    single_player_bound: tuple[int, float] | None = None

    @property
    def bound_weights(self) -> np.ndarray:
        return self.d_next

    def bound_lhs(self, t: PayoffTensor, equilibrium) -> float:
        """``sum_i d'_i A_i[p_eq]`` for a supplied equilibrium profile."""
        return float(self.d_next @ expected_payoffs(t, equilibrium))


def scaling_step(
    t: PayoffTensor,
    d: SelectorWeights | np.ndarray,
    solver: Callable[[LinearProgram], LpSolution] = simplex_solve,
    pos_tol: float = POS_TOL,
) -> ScalingStep:
    d = _weights(d, t.num_players)
    sol = solve_minimax(scale(t, d), solver=solver)
    weighted = d.weights * sol.x_star.weights
    sigma = float(weighted.sum())
    if sigma <= pos_tol:
        # cannot happen for d > 0 and x* in the simplex, guarded against anyway
        d_next = np.zeros_like(weighted)
    else:
        d_next = weighted / sigma
    payoffs = expected_payoffs(t, sol.p_star)
    single = None
    hot = np.flatnonzero(d_next > pos_tol)
    if hot.size == 1:
        i = int(hot[0])
        single = (i, float(payoffs[i]))
    return ScalingStep(
        d=d,
        solution=sol,
        sigma=sigma,
        d_next=d_next,
        bound_rhs=float(d_next @ payoffs),
        quality=quality(t, sol.p_star),
        single_player_bound=single,
    )


@dataclass(frozen=True, eq=False)
class ScalingTrace:
    steps: list[ScalingStep]
    stop_reason: str  # converged | boundary_hit | max_iters | solver_failure
    error: str | None = field(default=None)


def scaling_iterate(
    t: PayoffTensor,
    d0: SelectorWeights | np.ndarray,
    max_iters: int = MAX_ITERS,
    conv_tol: float = CONV_TOL,
    pos_tol: float = POS_TOL,
    solver: Callable[[LinearProgram], LpSolution] = simplex_solve,
) -> ScalingTrace:
    """Repeat ``d -> d'`` until it stalls, leaves the open simplex, or runs out of steps.

    A solver failure ends the trace with ``stop_reason="solver_failure"``;
    the steps completed so far are kept.
    """
    d = _weights(d0, t.num_players)
    if d.weights.min() <= pos_tol:
        raise ValueError("initial scaling weights must be strictly positive")
    steps: list[ScalingStep] = []
    while True:
        try:
            step = scaling_step(t, d, solver=solver, pos_tol=pos_tol)
        except SolverError as exc:
            return ScalingTrace(steps, "solver_failure", str(exc))
        steps.append(step)
        if np.max(np.abs(step.d_next - d.weights)) <= conv_tol:
            return ScalingTrace(steps, "converged")
        if step.d_next.min() <= pos_tol:
            return ScalingTrace(steps, "boundary_hit")
        if len(steps) >= max_iters:
            return ScalingTrace(steps, "max_iters")
        d = SelectorWeights(step.d_next)


def random_weights(rng: np.random.Generator, n: int, pos_tol: float = POS_TOL) -> SelectorWeights:
    """Flat-Dirichlet draw from the open simplex, redrawn until ``min > pos_tol``."""
    while True:
        d = rng.dirichlet(np.ones(n))
        if d.min() > pos_tol:
            return SelectorWeights(d)


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.17g}"


def trace_csv(trace: ScalingTrace) -> str:
    if not trace.steps:
        return "stop_reason\n" + trace.stop_reason + "\n"
    n = len(trace.steps[0].d)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["iter"] + [f"d_{i + 1}" for i in range(n)] + ["sigma", "value"]
        + [f"dprime_{i + 1}" for i in range(n)] + ["bound_rhs", "t", "eps", "stop_reason"]
    )
    last = len(trace.steps) - 1
    for k, st in enumerate(trace.steps):
        w.writerow(
            [k] + [_fmt(v) for v in st.d.weights] + [_fmt(st.sigma), _fmt(st.solution.value)]
            + [_fmt(v) for v in st.d_next]
            + [_fmt(st.bound_rhs), _fmt(st.quality.t), _fmt(st.quality.eps),
               trace.stop_reason if k == last else ""]
        )
    return buf.getvalue()

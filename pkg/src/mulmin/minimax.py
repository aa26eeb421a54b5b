"""Multilinear minimax: solve the LP pair, derive p*, check saddle inequalities and bounds.

The selector problem ``min_x max_I sum_i x_i a(i,I)`` is solved through its
dual over joint distributions ``q`` on pure profiles.  The optimal ``x*`` is
read off the dual multipliers of the per-player rows, ``q*`` is collapsed to
its per-player marginals (the derived point ``p*``), and the direct primal
is solved as a cross-check of strong duality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lp import LinearProgram, LpSolution, build_dual, build_primal, simplex_solve
from .multilinear import (
    MixedProfile,
    SelectorWeights,
    best_response,
    expected_payoffs,
    selector_value,
)
from .tensor import GameShape, PayoffTensor

DUALITY_TOL = 1e-8
SADDLE_SLACK = 1e-7
EQUALITY_TOL = 1e-7
SUPPORT_TOL = 1e-9
POSITIVE_PAYOFF_TOL = 1e-9
DIRECT_PRIMAL_LIMIT = 4096


class SolverError(RuntimeError):
    """An LP solve did not reach a verified optimum."""

    def __init__(self, message: str, solution: LpSolution | None = None):
        super().__init__(message)
        self.solution = solution


@dataclass(frozen=True, eq=False)
class MinimaxSolution:
    x_star: SelectorWeights
    q_star: np.ndarray
    p_star: MixedProfile
    value: float
    primal_value: float
    dual_value: float
    support_size: int
    dual_lp: LpSolution = field(repr=False)
    primal_lp: LpSolution | None = field(default=None, repr=False)

    @property
    def duality_gap(self) -> float:
        return abs(self.primal_value - self.dual_value)

    @property
    def num_players(self) -> int:
        return self.x_star.weights.size


def derived_point(q: np.ndarray, shape: GameShape) -> MixedProfile:
    """Per-player marginals of a joint distribution ``q`` over pure profiles."""
    q = np.asarray(q, dtype=np.float64).reshape(-1)
    if q.size != shape.total_profiles():
        raise ValueError(f"q has {q.size} entries, shape needs {shape.total_profiles()}")
    if not np.all(np.isfinite(q)) or q.min() < 0:
        raise ValueError("q must be finite and nonnegative")
    total = q.sum()
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"q sums to {float(total)!r}, not 1")
    joint = (q / total).reshape(shape.strategy_counts)
    n = shape.num_players
    marginals = []
    for i in range(n):
        m = joint.sum(axis=tuple(k for k in range(n) if k != i))
        marginals.append(m / m.sum())
    return MixedProfile(tuple(marginals))


def _require_optimal(sol: LpSolution, which: str) -> LpSolution:
    if not sol.optimal:
        raise SolverError(f"{which} LP ended with status {sol.status}: {sol.message}", sol)
    return sol


def solve_minimax(
    t: PayoffTensor,
    solver: Callable[[LinearProgram], LpSolution] = simplex_solve,
    direct_limit: int = DIRECT_PRIMAL_LIMIT,
) -> MinimaxSolution:
    n = t.num_players
    n_hat = t.shape.total_profiles()

    dual = _require_optimal(solver(build_dual(t)), "dual")
    q = np.clip(dual.x[:n_hat], 0.0, None)
    q = q / q.sum()
    lam = float(dual.x[n_hat])

    # Multipliers of the ">=" player rows in a max problem are <= 0; negate to get x*.
    x = np.clip(-dual.duals[:n], 0.0, None)
    if x.sum() <= 0:
        raise SolverError("dual multipliers do not recover a selector", dual)
    x_star = SelectorWeights(x / x.sum())

    primal = None
    if n_hat <= direct_limit:
        primal = _require_optimal(solver(build_primal(t)), "primal")
        delta = float(primal.x[n])
    else:
        delta = float(np.max(t.flat.T @ x_star.weights))

    if abs(delta - lam) > DUALITY_TOL:
        raise SolverError(f"duality gap {abs(delta - lam):.3e} exceeds {DUALITY_TOL}", dual)

    return MinimaxSolution(
        x_star=x_star,
        q_star=q,
        p_star=derived_point(q, t.shape),
        value=lam,
        primal_value=delta,
        dual_value=lam,
        support_size=int(np.count_nonzero(q > SUPPORT_TOL)),
        dual_lp=dual,
        primal_lp=primal,
    )


def recovered_primal_residual(t: PayoffTensor, s: MinimaxSolution) -> float:
    """How far the dual-recovered ``x*`` is from attaining the primal optimum."""
    return float(np.max(t.flat.T @ s.x_star.weights) - s.primal_value)


@dataclass(frozen=True)
class SaddleCheck:
    """Outcome of checking ``A0[x*, p] <= A0[x*, p*] <= A0[x, p*]``.

    Violations are signed (``lhs - rhs``); positive means the inequality
    fails.  ``middle`` is ``A0[x*, p*]``.  The ``lp_*`` fields anchor both
    sides on the LP value instead of ``middle``.
    """

    passed: bool
    worst_violation: float
    middle: float
    value: float
    vertex_left: float
    vertex_right: float
    sample_left: float
    sample_right: float
    lp_left: float
    lp_right: float
    samples: int

    @property
    def vertex_passed(self) -> bool:
        return max(self.vertex_left, self.vertex_right) <= SADDLE_SLACK


def _dirichlet_profile(rng: np.random.Generator, shape: GameShape) -> MixedProfile:
    return MixedProfile(tuple(rng.dirichlet(np.ones(k)) for k in shape.strategy_counts))


def verify_saddle(
    t: PayoffTensor, s: MinimaxSolution, samples: int = 1000, seed: int = 0,
    slack: float = SADDLE_SLACK,
) -> SaddleCheck:
    """Exhaustive vertex sweep plus random (x, p) samples.

    The inequalities are linear in ``x`` and multilinear in ``p``, so the
    sweep over ``x = e_i`` and pure profiles ``p = e_I`` is the binding check.
    """
    x = s.x_star.weights
    middle = selector_value(t, s.x_star, s.p_star)
    at_pstar = expected_payoffs(t, s.p_star)
    by_profile = t.flat.T @ x

    vertex_left = float(by_profile.max() - middle)
    vertex_right = float(middle - at_pstar.min())

    rng = np.random.default_rng(seed)
    n = t.num_players
    sample_left = sample_right = -np.inf
    for _ in range(samples):
        p = _dirichlet_profile(rng, t.shape)
        sample_left = max(sample_left, selector_value(t, x, p) - middle)
        xs = rng.dirichlet(np.ones(n))
        sample_right = max(sample_right, middle - float(xs @ at_pstar))

    worst = max(vertex_left, vertex_right, sample_left, sample_right)
    return SaddleCheck(
        passed=worst <= slack,
        worst_violation=float(worst),
        middle=middle,
        value=s.value,
        vertex_left=vertex_left,
        vertex_right=vertex_right,
        sample_left=float(sample_left),
        sample_right=float(sample_right),
        lp_left=float(by_profile.max() - s.value),
        lp_right=float(s.value - at_pstar.min()),
        samples=samples,
    )


@dataclass(frozen=True)
class PlayerQuality:
    expected: float
    best_response_value: float
    best_action: int
    eps: float
    t: float | None


@dataclass(frozen=True)
class QualityReport:
    players: tuple[PlayerQuality, ...]

    @property
    def eps(self) -> float:
        return max(pq.eps for pq in self.players)

    @property
    def t(self) -> float | None:
        defined = [pq.t for pq in self.players if pq.t is not None]
        return max(defined) if defined else None

    @property
    def all_t_defined(self) -> bool:
        return all(pq.t is not None for pq in self.players)


def quality(t: PayoffTensor, p: MixedProfile) -> QualityReport:
    """Additive gaps and multiplicative t-approximation factors of ``p``.

    ``t_i`` is only reported where ``A_i[p] > 1e-9``; the ratio is
    meaningless for zero or negative expected payoffs.
    """
    expected = expected_payoffs(t, p)
    players = []
    for i in range(t.num_players):
        value, action = best_response(t, i, p)
        e = float(expected[i])
        players.append(PlayerQuality(
            expected=e,
            best_response_value=value,
            best_action=action,
            eps=value - e,
            t=value / e if e > POSITIVE_PAYOFF_TOL else None,
        ))
    return QualityReport(tuple(players))


@dataclass(frozen=True)
class BoundsReport:
    payoffs_at_pstar: tuple[float, ...]
    min_expected: float
    value: float
    selector_at_pstar: float
    equality_gap: float
    equality_holds: bool
    x_star_min: float
    sigma_bound: float | None
    sigma_bound_applicable: bool
    sigma_bound_preconditions: str  # verified | unverified | violated
    reference_payoffs: tuple[float, ...] | None = None
    sigma_n: float | None = None
    bound1_lhs: float | None = None
    bound1_slack: float | None = None
    bound1_slack_vs_pstar: float | None = None
    bound1_holds: bool | None = None
    bound2_slack: float | None = None
    bound2_holds: bool | None = None


def bounds_report(
    t: PayoffTensor, s: MinimaxSolution, reference: MixedProfile | None = None
) -> BoundsReport:
    """Upper bounds on equilibrium payoffs implied by a minimax solution.

    ``reference`` should be a certified equilibrium (see ``oracle``); it is
    not re-verified here.  ``bound1_slack`` is ``value - A0[x*, p_ref]``
    and ``bound1_slack_vs_pstar`` is ``A0[x*, p*] - A0[x*, p_ref]``.
    """
    n = t.num_players
    at_pstar = expected_payoffs(t, s.p_star)
    min_expected = float(at_pstar.min())
    gap = s.value - min_expected
    x_min = float(s.x_star.weights.min())
    sigma_bound = s.value / (n * x_min) if x_min > SUPPORT_TOL else None

    fields: dict = {}
    if reference is None:
        preconditions = "unverified"
    else:
        ref = expected_payoffs(t, reference)
        lhs = float(s.x_star.weights @ ref)
        slack = s.value - lhs
        preconditions = "verified" if ref.min() >= 0 else "violated"
        sigma_n = float(ref.mean())
        fields.update(
            reference_payoffs=tuple(float(v) for v in ref),
            sigma_n=sigma_n,
            bound1_lhs=lhs,
            bound1_slack=slack,
            bound1_slack_vs_pstar=selector_value(t, s.x_star, s.p_star) - lhs,
            bound1_holds=slack >= -EQUALITY_TOL,
        )
        if sigma_bound is not None and preconditions == "verified":
            fields.update(bound2_slack=sigma_bound - sigma_n,
                          bound2_holds=sigma_bound - sigma_n >= -EQUALITY_TOL)

    return BoundsReport(
        payoffs_at_pstar=tuple(float(v) for v in at_pstar),
        min_expected=min_expected,
        value=s.value,
        selector_at_pstar=selector_value(t, s.x_star, s.p_star),
        equality_gap=gap,
        equality_holds=abs(gap) <= EQUALITY_TOL,
        x_star_min=x_min,
        sigma_bound=sigma_bound,
        sigma_bound_applicable=sigma_bound is not None and preconditions == "verified",
        sigma_bound_preconditions=preconditions,
        **fields,
    )

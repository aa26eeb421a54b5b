"""Approximate Nash equilibria of n-player normal-form games via multilinear minimax."""

from .lp import LinearProgram, LpSolution, build_dual, build_primal, simplex_solve
from .minimax import (
    BoundsReport,
    MinimaxSolution,
    QualityReport,
    SolverError,
    bounds_report,
    derived_point,
    quality,
    solve_minimax,
    verify_saddle,
)
from .multilinear import (
    MixedProfile,
    SelectorWeights,
    best_response,
    expected_payoff,
    selector_value,
    unilateral_payoff,
)
from .tensor import (
    GameFormatError,
    GameShape,
    PayoffTensor,
    get_payoff,
    load_fixture,
    load_game,
    profile_iter,
    random_game,
    save_game,
)

__version__ = "0.1.0"

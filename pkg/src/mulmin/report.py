"""Machine-readable reports (schema ``mulmin.report/1``).

Reports are JSON objects.  Every float is written with 17 significant
digits so values round-trip exactly; undefined quantities are ``null``.
All player, action and profile indices are 1-based.  Field names are
listed in the README.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .minimax import BoundsReport, MinimaxSolution, QualityReport, SaddleCheck
from .multilinear import MixedProfile
from .oracle import EquilibriumCertificate
from .tensor import PayoffTensor, profile_iter

SCHEMA = "mulmin.report/1"


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return f"{v:.17g}" if math.isfinite(v) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(report: dict) -> str:
    return _encode(report) + "\n"


def game_info(t: PayoffTensor) -> dict:
    return {"players": t.num_players, "shape": list(t.shape.strategy_counts)}


def profile_dict(p: MixedProfile) -> list:
    return [list(s) for s in p.strategies]


def solution_dict(t: PayoffTensor, s: MinimaxSolution) -> dict:
    support = [
        {"profile": [j + 1 for j in I], "q": float(q)}
        for I, q in zip(profile_iter(t.shape), s.q_star) if q > 1e-9
    ]

    def lp_info(sol):
        if sol is None:
            return None
        return {"status": sol.status, "iterations": sol.iterations,
                "objective": sol.objective, "primal_residual": sol.primal_residual,
                "cs_residual": sol.cs_residual}

    return {
        "value": s.value,
        "primal_value": s.primal_value,
        "dual_value": s.dual_value,
        "duality_gap": s.duality_gap,
        "x_star": list(s.x_star.weights),
        "p_star": profile_dict(s.p_star),
        "q_star": list(s.q_star),
        "support_size": s.support_size,
        "support": support,
        "lp": {"dual": lp_info(s.dual_lp), "primal": lp_info(s.primal_lp)},
    }


def quality_dict(q: QualityReport) -> dict:
    return {
        "players": [
            {"player": i + 1, "expected": pq.expected,
             "best_response_value": pq.best_response_value,
             "best_action": pq.best_action + 1, "eps": pq.eps, "t": pq.t}
            for i, pq in enumerate(q.players)
        ],
        "eps": q.eps,
        "t": q.t,
    }


def bounds_dict(b: BoundsReport) -> dict:
    return {
        "payoffs_at_pstar": list(b.payoffs_at_pstar),
        "min_expected": b.min_expected,
        "value": b.value,
        "selector_at_pstar": b.selector_at_pstar,
        "equality_gap": b.equality_gap,
        "equality_holds": b.equality_holds,
        "x_star_min": b.x_star_min,
        "sigma_bound": b.sigma_bound,
        "sigma_bound_applicable": b.sigma_bound_applicable,
        "sigma_bound_preconditions": b.sigma_bound_preconditions,
        "reference_payoffs": None if b.reference_payoffs is None else list(b.reference_payoffs),
        "sigma_n": b.sigma_n,
        "bound1_lhs": b.bound1_lhs,
        "bound1_slack": b.bound1_slack,
        "bound1_slack_vs_pstar": b.bound1_slack_vs_pstar,
        "bound1_holds": b.bound1_holds,
        "bound2_slack": b.bound2_slack,
        "bound2_holds": b.bound2_holds,
    }


def certificate_dict(c: EquilibriumCertificate) -> dict:
    return {"kind": c.kind, "profile": profile_dict(c.profile), "residual": c.residual}


def saddle_dict(c: SaddleCheck) -> dict:
    return {
        "passed": c.passed, "worst_violation": c.worst_violation, "middle": c.middle,
        "value": c.value, "vertex_left": c.vertex_left, "vertex_right": c.vertex_right,
        "sample_left": c.sample_left, "sample_right": c.sample_right,
        "lp_left": c.lp_left, "lp_right": c.lp_right, "samples": c.samples,
    }

"""Per-game invariant suite behind ``mulmin verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nashmap, oracle
from .minimax import (
    DUALITY_TOL,
    EQUALITY_TOL,
    SADDLE_SLACK,
    MinimaxSolution,
    bounds_report,
    recovered_primal_residual,
    verify_saddle,
)
from .tensor import PayoffTensor


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


def _le(name: str, value: float, tol: float, detail: str = "") -> Check:
    return Check(name, bool(value <= tol), float(value), tol, detail)


def run_checks(
    t: PayoffTensor,
    s: MinimaxSolution,
    samples: int = 1000,
    seed: int = 0,
    certs: list[oracle.EquilibriumCertificate] | None = None,
) -> list[Check]:
    n = t.num_players
    out = [
        _le("duality_gap", s.duality_gap, DUALITY_TOL),
        _le("dual_primal_residual", s.dual_lp.primal_residual, 1e-9),
        _le("dual_complementary_slackness", s.dual_lp.cs_residual, 1e-8),
        _le("recovered_selector_optimal", abs(recovered_primal_residual(t, s)), DUALITY_TOL),
        _le("support_size", s.support_size, n + 1, "count(q* > 1e-9) <= n + 1"),
    ]
    if s.primal_lp is not None:
        out.append(_le("primal_primal_residual", s.primal_lp.primal_residual, 1e-9))
        out.append(_le("primal_complementary_slackness", s.primal_lp.cs_residual, 1e-8))

    marg_err = max(abs(p.sum() - 1.0) for p in s.p_star)
    marg_neg = -min(float(p.min()) for p in s.p_star)
    out.append(_le("derived_point_sums", marg_err, 1e-12))
    out.append(_le("derived_point_nonnegative", marg_neg, 1e-15))

    saddle = verify_saddle(t, s, samples=samples, seed=seed)
    out.append(_le("saddle_left_vertices", saddle.vertex_left, SADDLE_SLACK,
                   "max_I A0[x*, e_I] - A0[x*, p*]"))
    out.append(_le("saddle_right_vertices", saddle.vertex_right, SADDLE_SLACK,
                   "A0[x*, p*] - min_i A_i[p*]"))
    out.append(_le("saddle_samples", max(saddle.sample_left, saddle.sample_right), SADDLE_SLACK,
                   f"{samples} Dirichlet samples"))
    out.append(_le("saddle_lp_left", saddle.lp_left, SADDLE_SLACK, "max_I A0[x*, e_I] - value"))

    b = bounds_report(t, s)
    out.append(_le("value_equals_min_payoff_at_pstar", abs(b.equality_gap), EQUALITY_TOL,
                   "|value - min_i A_i[p*]|"))

    for k, cert in enumerate(certs or []):
        rb = bounds_report(t, s, cert.profile)
        out.append(_le(f"bound1[{k + 1}]", -rb.bound1_slack, EQUALITY_TOL,
                       "A0[x*, p_eq] - value"))
        if rb.bound2_slack is not None:
            out.append(_le(f"bound2[{k + 1}]", -rb.bound2_slack, EQUALITY_TOL,
                           "sigma_n - value / (n x*_min)"))
        st = nashmap.state(t, cert.profile)
        moved = max(float(np.max(np.abs(a - b)))
                    for a, b in zip(nashmap.nash_map_step(t, cert.profile), cert.profile))
        out.append(_le(f"nashmap_fixed_point[{k + 1}]", max(st.residual, moved), 1e-9))
    return out

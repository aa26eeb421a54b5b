"""Seeded ensembles of random games.

Game ``k`` of an ensemble with master seed ``s`` uses the 64-bit seed
``SeedSequence([s, k]).generate_state(1, uint64)[0]``, so rows never depend
on how many games run before them or in what order.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

from .minimax import SolverError, bounds_report, quality, solve_minimax
from .scaling import random_weights, scaling_iterate
from .tensor import random_game


def game_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence([master, index]).generate_state(1, np.uint64)[0])


def _f(v) -> str:
    return "" if v is None else f"{float(v):.17g}"


SOLVE_COLUMNS = ["game", "seed", "value", "t", "t_defined", "eps", "support_size",
                 "duality_gap", "equality_gap", "status"]
SCALE_COLUMNS = ["game", "seed", "steps", "stop_reason", "value_first", "t_first",
                 "eps_first", "t_last", "eps_last", "status"]


def solve_row(k: int, seed: int, shape: Sequence[int], lo: float, hi: float) -> list[str]:
    t = random_game(shape, seed, lo, hi)
    try:
        s = solve_minimax(t)
    except SolverError as exc:
        return [str(k), str(seed)] + [""] * 7 + [f"solver_failure: {exc}"]
    q = quality(t, s.p_star)
    b = bounds_report(t, s)
    return [str(k), str(seed), _f(s.value), _f(q.t), str(int(q.t is not None)), _f(q.eps),
            str(s.support_size), _f(s.duality_gap), _f(b.equality_gap), "ok"]


def scale_row(k: int, seed: int, shape: Sequence[int], lo: float, hi: float,
              max_iters: int) -> list[str]:
    t = random_game(shape, seed, lo, hi)
    d0 = random_weights(np.random.default_rng(seed), t.num_players)
    tr = scaling_iterate(t, d0, max_iters=max_iters)
    if not tr.steps:
        return [str(k), str(seed), "0", tr.stop_reason] + [""] * 5 + [f"solver_failure: {tr.error}"]
    first, last = tr.steps[0], tr.steps[-1]
    return [str(k), str(seed), str(len(tr.steps)), tr.stop_reason,
            _f(first.solution.value), _f(first.quality.t), _f(first.quality.eps),
            _f(last.quality.t), _f(last.quality.eps),
            "ok" if tr.error is None else f"solver_failure: {tr.error}"]


def run_ensemble(shape: Sequence[int], count: int, seed: int, mode: str = "solve",
                 lo: float = -1.0, hi: float = 1.0, max_iters: int = 100) -> str:
    """CSV text with one row per game, in game-index order."""
    if mode not in ("solve", "scale"):
        raise ValueError(f"unknown ensemble mode {mode!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SOLVE_COLUMNS if mode == "solve" else SCALE_COLUMNS)
    for k in range(count):
        gs = game_seed(seed, k)
        if mode == "solve":
            w.writerow(solve_row(k, gs, shape, lo, hi))
        else:
            w.writerow(scale_row(k, gs, shape, lo, hi, max_iters))
    return buf.getvalue()

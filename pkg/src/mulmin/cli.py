"""``mulmin`` command-line interface.

Exit codes: 0 success, 1 a verified invariant failed, 2 bad input (parse
or argument error), 3 LP solver failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import nashmap, oracle, report, scaling
from .checks import run_checks
from .ensemble import run_ensemble
from .lp import build_dual, build_primal, to_lp_format
from .minimax import SolverError, bounds_report, quality, solve_minimax, verify_saddle
from .multilinear import MixedProfile, SelectorWeights
from .tensor import GameFormatError, PayoffTensor, read_game, save_game, random_game

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _oracle_certs(t: PayoffTensor, budget: int):
    status = "complete" if oracle.support_count(t) <= budget else "partial"
    return oracle.certificates(t, budget), status


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.6g}"


def cmd_solve(args) -> int:
    t = read_game(args.game)
    if args.dump_lp:
        base = Path(args.dump_lp)
        base.with_suffix(".primal.lp").write_text(to_lp_format(build_primal(t)))
        base.with_suffix(".dual.lp").write_text(to_lp_format(build_dual(t)))
    s = solve_minimax(t)
    q = quality(t, s.p_star)
    certs, status = _oracle_certs(t, args.oracle_budget)
    doc = {
        "schema": report.SCHEMA,
        "command": "solve",
        "game": report.game_info(t),
        "solution": report.solution_dict(t, s),
        "quality": report.quality_dict(q),
        "bounds": report.bounds_dict(bounds_report(t, s)),
        "oracle": {
            "status": status,
            "certificates": [report.certificate_dict(c) for c in certs],
            "reference_bounds": [report.bounds_dict(bounds_report(t, s, c.profile)) for c in certs],
        },
    }
    if args.format == "machine":
        _emit(report.dumps(doc), args.out)
        return EXIT_OK
    lines = [
        f"game: {t.num_players} players, shape {list(t.shape.strategy_counts)}",
        f"minimax value     {s.value:.10g}  (duality gap {s.duality_gap:.2e})",
        f"x*                {np.array2string(s.x_star.weights, precision=6)}",
        f"support size      {s.support_size} (<= {t.num_players + 1})",
    ]
    for i, (p, pq) in enumerate(zip(s.p_star, q.players)):
        lines.append(
            f"player {i + 1}: p*={np.array2string(p, precision=6)}  A_i[p*]={pq.expected:.6g}  "
            f"best reply={pq.best_response_value:.6g} (action {pq.best_action + 1})  "
            f"eps={pq.eps:.3g}  t={_fmt(pq.t)}"
        )
    lines.append(f"overall: eps={q.eps:.3g}  t={_fmt(q.t)}")
    b = bounds_report(t, s)
    lines.append(f"min_i A_i[p*]     {b.min_expected:.10g}  (gap to value {b.equality_gap:.3g})")
    lines.append(f"sigma bound       {_fmt(b.sigma_bound)}  (preconditions {b.sigma_bound_preconditions})")
    lines.append(f"oracle            {status}, {len(certs)} certified equilibria")
    for k, c in enumerate(certs):
        rb = bounds_report(t, s, c.profile)
        lines.append(f"  eq {k + 1} [{c.kind}] A0[x*,p_eq]={rb.bound1_lhs:.6g} <= value: "
                     f"slack {rb.bound1_slack:.3g}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    t = read_game(args.game)
    s = solve_minimax(t)
    certs, status = _oracle_certs(t, args.oracle_budget)
    checks = run_checks(t, s, samples=args.samples, seed=args.seed, certs=certs)
    passed = all(c.passed for c in checks)
    if args.format == "machine":
        doc = {
            "schema": report.SCHEMA,
            "command": "verify",
            "game": report.game_info(t),
            "passed": passed,
            "oracle_status": status,
            "saddle": report.saddle_dict(verify_saddle(t, s, args.samples, args.seed)),
            "checks": [{"name": c.name, "passed": c.passed, "value": c.value,
                        "tolerance": c.tolerance, "detail": c.detail} for c in checks],
        }
        _emit(report.dumps(doc), args.out)
    else:
        rows = [f"{'PASS' if c.passed else 'FAIL'}  {c.name:<36} {c.value: .3e}  (tol {c.tolerance:g})"
                + (f"  {c.detail}" if c.detail else "") for c in checks]
        rows.append(f"{'all checks passed' if passed else 'VIOLATIONS FOUND'}")
        _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK if passed else EXIT_VIOLATION


def cmd_scale(args) -> int:
    t = read_game(args.game)
    if args.d0 is not None and args.random_d is not None:
        raise UsageError("give either --d0 or --random-d, not both")
    if args.d0 is not None:
        d0 = SelectorWeights(_floats(args.d0))
    elif args.random_d is not None:
        d0 = scaling.random_weights(np.random.default_rng(args.random_d), t.num_players, args.pos_tol)
    else:
        d0 = SelectorWeights.uniform(t.num_players)
    tr = scaling.scaling_iterate(t, d0, max_iters=args.iters, conv_tol=args.conv_tol,
                                 pos_tol=args.pos_tol)
    csv_text = scaling.trace_csv(tr)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    if args.format == "machine" and not args.out:
        sys.stdout.write(csv_text)
    else:
        for k, st in enumerate(tr.steps):
            extra = ""
            if st.single_player_bound is not None:
                i, v = st.single_player_bound
                extra = f"  bound on player {i + 1}: A_i[p_eq] <= {v:.6g}"
            print(f"step {k}: value={st.solution.value:.6g} sigma={st.sigma:.6g} "
                  f"bound_rhs={st.bound_rhs:.6g} t={_fmt(st.quality.t)} eps={st.quality.eps:.3g}{extra}")
        print(f"stop: {tr.stop_reason}" + (f" ({tr.error})" if tr.error else ""))
    return EXIT_SOLVER if tr.stop_reason == "solver_failure" else EXIT_OK


def _parse_start(text: str, t: PayoffTensor) -> MixedProfile:
    parts = [p for p in text.split(";")]
    if len(parts) != t.num_players:
        raise UsageError(f"--start needs {t.num_players} ';'-separated strategies")
    return MixedProfile(tuple(_floats(p) for p in parts))


def cmd_nashmap(args) -> int:
    t = read_game(args.game)
    p0 = _parse_start(args.start, t) if args.start else MixedProfile.uniform(t.shape)
    if p0.strategy_counts != t.shape.strategy_counts:
        raise UsageError("--start does not match the game's shape")
    tr = nashmap.iterate(t, p0, max_iters=args.iters, tol=args.tol)
    csv_text = nashmap.trace_csv(tr)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    if args.format == "machine" and not args.out:
        sys.stdout.write(csv_text)
    else:
        print(f"iterations {tr.iterations}, final residual {tr.residuals[-1]:.3e}, "
              f"{'converged' if tr.converged else 'not converged'}")
        for i, s in enumerate(tr.final.profile):
            print(f"player {i + 1}: {np.array2string(s, precision=6)}")
    return EXIT_OK


def cmd_gen(args) -> int:
    t = random_game(_ints(args.shape), args.seed, args.lo, args.hi)
    _emit(save_game(t), args.out)
    return EXIT_OK


def cmd_ensemble(args) -> int:
    text = run_ensemble(_ints(args.shape), args.count, args.seed, args.mode, args.lo, args.hi,
                        args.iters)
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mulmin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format="human"):
        p.add_argument("--format", choices=("human", "machine"), default=default_format,
                       help="human table, or machine output (JSON report / CSV trace)")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("solve", help="solve the minimax relaxation of a game")
    p.add_argument("game")
    p.add_argument("--oracle-budget", type=int, default=oracle.DEFAULT_BUDGET,
                   help="max support combinations for reference equilibria")
    p.add_argument("--dump-lp", metavar="BASE", help="also write BASE.primal.lp / BASE.dual.lp")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run every invariant check on one game")
    p.add_argument("game")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-budget", type=int, default=oracle.DEFAULT_BUDGET)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scale", help="diagonal-scaling iteration; CSV trace")
    p.add_argument("game")
    p.add_argument("--d0", help="initial weights, comma-separated (default uniform)")
    p.add_argument("--random-d", type=int, metavar="SEED", help="draw initial weights from this seed")
    p.add_argument("--iters", type=int, default=scaling.MAX_ITERS)
    p.add_argument("--conv-tol", type=_positive, default=scaling.CONV_TOL)
    p.add_argument("--pos-tol", type=_positive, default=scaling.POS_TOL)
    common(p)
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("nashmap", help="iterate the gain-normalization map; CSV trace")
    p.add_argument("game")
    p.add_argument("--start", help="e.g. '1,0;0.5,0.5' (default uniform)")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--tol", type=_positive, default=1e-9)
    common(p)
    p.set_defaults(func=cmd_nashmap)

    p = sub.add_parser("gen", help="write a random game")
    p.add_argument("--shape", required=True, help="strategy counts, e.g. 2,3,2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lo", type=float, default=-1.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ensemble", help="aggregate CSV over seeded random games")
    p.add_argument("--shape", required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("solve", "scale"), default="solve")
    p.add_argument("--lo", type=float, default=-1.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--iters", type=int, default=scaling.MAX_ITERS, help="scale mode step cap")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ensemble)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GameFormatError, UsageError, ValueError, OSError) as exc:
        print(f"mulmin: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"mulmin: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

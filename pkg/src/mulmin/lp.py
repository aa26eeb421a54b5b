"""Dense linear programs and a two-phase tableau simplex solver.

The solver handles ``<=``, ``=`` and ``>=`` rows, nonnegative or free
variables (free ones are split into a difference of two nonnegative
columns) and both objective senses.  Entering columns follow Dantzig's
rule until 50 consecutive degenerate pivots, after which Bland's
smallest-index rule takes over for the remainder of the phase, which
guarantees termination.

Duals are reported in the original problem's sense: ``duals[r]`` is the
rate of change of the optimal objective with respect to ``b[r]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .tensor import PayoffTensor, profile_iter

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-11
DEGENERATE_STREAK = 50

LE, EQ, GE = "<=", "=", ">="


@dataclass(frozen=True, eq=False)
class LinearProgram:
    c: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    free: np.ndarray
    maximize: bool = False
    var_names: tuple[str, ...] = ()
    row_names: tuple[str, ...] = ()

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64).reshape(-1)
        A = np.asarray(self.A, dtype=np.float64).reshape(-1, c.size)
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        free = np.asarray(self.free, dtype=bool).reshape(-1)
        senses = tuple(self.senses)
        if A.shape[0] != b.size or len(senses) != b.size:
            raise ValueError("row count mismatch between A, b and senses")
        if free.size != c.size:
            raise ValueError("free-variable mask must have one entry per variable")
        if any(s not in (LE, EQ, GE) for s in senses):
            raise ValueError(f"row senses must be one of {LE!r}, {EQ!r}, {GE!r}")
        for arr in (c, A, b):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP coefficients must be finite")
        var_names = tuple(self.var_names) or tuple(f"v{j}" for j in range(c.size))
        row_names = tuple(self.row_names) or tuple(f"r{r}" for r in range(b.size))
        for name, value in dict(c=c, A=A, b=b, free=free, senses=senses,
                                var_names=var_names, row_names=row_names).items():
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_rows(self) -> int:
        return self.b.size


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded | failed
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    objective: float = float("nan")
    iterations: int = 0
    is_vertex: bool = False
    primal_residual: float = float("nan")
    cs_residual: float = float("nan")
    message: str = ""
    basis: tuple[int, ...] = field(default=(), repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class LpSolver(Protocol):
    def __call__(self, lp: LinearProgram) -> LpSolution: ...


def build_primal(t: PayoffTensor) -> LinearProgram:
    """``min delta`` s.t. ``sum_i a(i,I) x_i - delta <= 0`` for all I, ``sum x = 1``, ``x >= 0``.

    Variables are ``x_1..x_n`` followed by the free ``delta``.
    """
    n = t.num_players
    flat = t.flat
    n_hat = flat.shape[1]
    A = np.zeros((n_hat + 1, n + 1))
    A[:n_hat, :n] = flat.T
    A[:n_hat, n] = -1.0
    A[n_hat, :n] = 1.0
    b = np.zeros(n_hat + 1)
    b[n_hat] = 1.0
    c = np.zeros(n + 1)
    c[n] = 1.0
    free = np.zeros(n + 1, dtype=bool)
    free[n] = True
    profiles = ["_".join(str(j + 1) for j in I) for I in profile_iter(t.shape)]
    return LinearProgram(
        c=c, A=A, senses=(LE,) * n_hat + (EQ,), b=b, free=free, maximize=False,
        var_names=tuple(f"x{i + 1}" for i in range(n)) + ("delta",),
        row_names=tuple(f"prof_{s}" for s in profiles) + ("simplex",),
    )


def build_dual(t: PayoffTensor) -> LinearProgram:
    """``max lambda`` s.t. ``sum_I a(i,I) q(I) - lambda >= 0`` for all i, ``sum q = 1``, ``q >= 0``.

    Variables are ``q(I)`` in canonical profile order followed by the free ``lambda``.
    """
    n = t.num_players
    flat = t.flat
    n_hat = flat.shape[1]
    A = np.zeros((n + 1, n_hat + 1))
    A[:n, :n_hat] = flat
    A[:n, n_hat] = -1.0
    A[n, :n_hat] = 1.0
    b = np.zeros(n + 1)
    b[n] = 1.0
    c = np.zeros(n_hat + 1)
    c[n_hat] = 1.0
    free = np.zeros(n_hat + 1, dtype=bool)
    free[n_hat] = True
    profiles = ["_".join(str(j + 1) for j in I) for I in profile_iter(t.shape)]
    return LinearProgram(
        c=c, A=A, senses=(GE,) * n + (EQ,), b=b, free=free, maximize=True,
        var_names=tuple(f"q_{s}" for s in profiles) + ("lambda",),
        row_names=tuple(f"player{i + 1}" for i in range(n)) + ("simplex",),
    )


@dataclass
class _StandardForm:
    """``min c.z`` s.t. ``A z = b``, ``z >= 0``, ``b >= 0``."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    row_sign: np.ndarray
    var_cols: list[tuple[int, int]]  # (plus column, minus column or -1) per original variable
    initial_basis: list[int]
    num_artificial: int


def _standardize(lp: LinearProgram) -> _StandardForm:
    m = lp.num_rows
    cols: list[np.ndarray] = []
    costs: list[float] = []
    var_cols = []
    sense_c = -lp.c if lp.maximize else lp.c
    for j in range(lp.num_vars):
        plus = len(cols)
        cols.append(lp.A[:, j])
        costs.append(sense_c[j])
        minus = -1
        if lp.free[j]:
            minus = len(cols)
            cols.append(-lp.A[:, j])
            costs.append(-sense_c[j])
        var_cols.append((plus, minus))

    row_sign = np.where(lp.b < 0, -1.0, 1.0)
    basis = [-1] * m
    for r, sense in enumerate(lp.senses):
        if sense == EQ:
            continue
        col = np.zeros(m)
        col[r] = 1.0 if sense == LE else -1.0
        if col[r] * row_sign[r] > 0:
            basis[r] = len(cols)
        cols.append(col)
        costs.append(0.0)

    A = (np.column_stack(cols) if cols else np.zeros((m, 0))) * row_sign[:, None]
    b = lp.b * row_sign
    num_artificial = 0
    art_cols = []
    for r in range(m):
        if basis[r] < 0:
            col = np.zeros(m)
            col[r] = 1.0
            basis[r] = A.shape[1] + num_artificial
            art_cols.append(col)
            num_artificial += 1
    if art_cols:
        A = np.hstack([A, np.column_stack(art_cols)])
        costs.extend([0.0] * num_artificial)
    return _StandardForm(A, b, np.asarray(costs), row_sign, var_cols, basis, num_artificial)


class _Tableau:
    """Rows ``0..m-1`` hold ``B^-1 [A | b]``; the last row holds reduced costs and ``-z``."""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        m, k = A.shape
        self.T = np.zeros((m + 1, k + 1))
        self.T[:m, :k] = A
        self.T[:m, k] = b
        self.basis = list(basis)
        self.active = np.ones(k, dtype=bool)

    def set_costs(self, c: np.ndarray) -> None:
        m = len(self.basis)
        self.T[m, :-1] = c
        self.T[m, -1] = 0.0
        for r, j in enumerate(self.basis):
            if self.T[m, j] != 0.0:
                self.T[m] -= self.T[m, j] * self.T[r]

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j

    def run(self, max_iter: int, iterations: int) -> tuple[str, int]:
        m = len(self.basis)
        T = self.T
        bland = False
        streak = 0
        while True:
            rc = np.where(self.active, T[m, :-1], 0.0)
            candidates = np.flatnonzero(rc < -OPT_TOL)
            if candidates.size == 0:
                return "optimal", iterations
            if iterations >= max_iter:
                return "failed", iterations
            if bland:
                j = int(candidates[0])
            else:
                j = int(candidates[np.argmin(rc[candidates])])
            col = T[:m, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return "unbounded", iterations
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + FEAS_TOL * max(1.0, abs(best))]
            r = int(min(ties, key=lambda row: self.basis[row]))
            step = T[r, -1] / T[r, j]
            self.pivot(r, j)
            iterations += 1
            streak = streak + 1 if step <= FEAS_TOL else 0
            if streak >= DEGENERATE_STREAK:
                bland = True


def max_iterations(lp: LinearProgram) -> int:
    """Pivot cap per phase; exceeding it reports status ``failed``."""
    return 10_000 + 50 * (lp.num_rows + lp.num_vars)


def simplex_solve(lp: LinearProgram) -> LpSolution:
    sf = _standardize(lp)
    m, k = sf.A.shape
    cap = max_iterations(lp)
    tab = _Tableau(sf.A, sf.b, sf.initial_basis)
    n_real = k - sf.num_artificial
    iterations = 0

    if sf.num_artificial:
        phase1 = np.zeros(k)
        phase1[n_real:] = 1.0
        tab.set_costs(phase1)
        status, iterations = tab.run(cap, iterations)
        if status == "failed":
            return LpSolution("failed", iterations=iterations,
                              message=f"phase 1 hit the pivot cap ({cap}) without converging")
        infeas = -tab.T[m, -1]
        if infeas > FEAS_TOL * max(1.0, float(np.abs(sf.b).max(initial=0.0))):
            return LpSolution("infeasible", iterations=iterations,
                              message=f"phase 1 optimum {infeas:.3e} > 0")
        # drive remaining artificials out of the basis; rows where that is impossible are redundant
        redundant = []
        for r in range(m):
            if tab.basis[r] >= n_real:
                row = tab.T[r, :n_real]
                nz = np.flatnonzero(np.abs(row) > 1e-9)
                if nz.size:
                    tab.pivot(r, int(nz[0]))
                else:
                    redundant.append(r)
        tab.active[n_real:] = False
        if redundant:
            keep = [r for r in range(m) if r not in redundant] + [m]
            tab.T = tab.T[keep]
            tab.basis = [tab.basis[r] for r in range(m) if r not in redundant]
        rows_kept = [r for r in range(m) if r not in redundant]
    else:
        rows_kept = list(range(m))

    tab.set_costs(sf.c)
    status, iterations = tab.run(iterations + cap, iterations)
    if status == "unbounded":
        return LpSolution("unbounded", iterations=iterations, message="objective unbounded")
    if status == "failed":
        return LpSolution("failed", iterations=iterations,
                          message=f"phase 2 hit the pivot cap ({cap}) without converging")
    return _extract(lp, sf, tab.basis, rows_kept, iterations)


def _extract(lp: LinearProgram, sf: _StandardForm, basis: list[int], rows: list[int],
             iterations: int) -> LpSolution:
    # Recompute the basic solution and duals from the original data for accuracy.
    A_rows = sf.A[rows]
    B = A_rows[:, basis]
    z = np.zeros(sf.A.shape[1])
    z[basis] = np.linalg.solve(B, sf.b[rows])
    z[np.abs(z) < 1e-15] = 0.0
    z = np.maximum(z, 0.0)
    y_kept = np.linalg.solve(B.T, sf.c[basis])
    y_std = np.zeros(sf.A.shape[0])
    y_std[rows] = y_kept

    x = np.array([z[p] - (z[q] if q >= 0 else 0.0) for p, q in sf.var_cols])
    duals = y_std * sf.row_sign
    if lp.maximize:
        duals = -duals
    objective = float(lp.c @ x)

    Ax = lp.A @ x
    viol = np.zeros(lp.num_rows)
    for r, sense in enumerate(lp.senses):
        if sense == LE:
            viol[r] = max(0.0, Ax[r] - lp.b[r])
        elif sense == GE:
            viol[r] = max(0.0, lp.b[r] - Ax[r])
        else:
            viol[r] = abs(Ax[r] - lp.b[r])
    n_real = sf.A.shape[1] - sf.num_artificial
    reduced = sf.c[:n_real] - sf.A[:, :n_real].T @ y_std
    cs = float(np.max(np.abs(reduced * z[:n_real]), initial=0.0))
    return LpSolution(
        status="optimal", x=x, duals=duals, objective=objective, iterations=iterations,
        is_vertex=True, primal_residual=float(viol.max(initial=0.0)), cs_residual=cs,
        basis=tuple(basis),
    )


def _lp_term(coef: float, name: str, first: bool) -> str:
    sign = "-" if coef < 0 else ("" if first else "+")
    mag = abs(float(coef))
    body = name if mag == 1.0 else f"{mag!r} {name}"
    return f"{sign} {body}".strip() if first else f"{sign} {body}"


def to_lp_format(lp: LinearProgram) -> str:
    """Render ``lp`` in CPLEX LP text format for cross-checking with external solvers."""
    out = ["\\ written by mulmin", "Maximize" if lp.maximize else "Minimize"]

    def expr(coefs: np.ndarray) -> str:
        terms = [(c, n) for c, n in zip(coefs, lp.var_names) if c != 0.0]
        if not terms:
            return f"0 {lp.var_names[0]}"
        return " ".join(_lp_term(c, n, i == 0) for i, (c, n) in enumerate(terms))

    out.append(f" obj: {expr(lp.c)}")
    out.append("Subject To")
    for name, row, sense, rhs in zip(lp.row_names, lp.A, lp.senses, lp.b):
        out.append(f" {name}: {expr(row)} {sense} {float(rhs)!r}")
    out.append("Bounds")
    for name, free in zip(lp.var_names, lp.free):
        out.append(f" {name} free" if free else f" {name} >= 0")
    out.append("End")
    return "\n".join(out) + "\n"

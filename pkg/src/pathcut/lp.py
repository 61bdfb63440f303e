"""Dense linear-program solver with box bounds, plus a small binary solver.

The simplex is a two-phase tableau implementation: Dantzig pricing with an
automatic switch to Bland's rule to rule out cycling. It is exact enough for
desk-scale programs (thousands of variables); feasibility is enforced to
1e-7 and optimality to 1e-9 relative, matching the package-wide tolerances.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleCoverError, NumericalInstabilityError, SolveTimeoutError

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
_PIVOT_EPS = 1e-10


@dataclass
class LinearProgram:
    """min objective @ x subject to eq/ineq rows and per-variable box bounds."""

    objective: np.ndarray
    eq_rows: list = field(default_factory=list)  # (coeffs, rhs)
    ineq_rows: list = field(default_factory=list)  # (coeffs, rhs, "<=" | ">=")
    bounds: list = field(default_factory=list)  # (lo, hi); default (0, 1)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        n = len(self.objective)
        if not self.bounds:
            self.bounds = [(0.0, 1.0)] * n
        if len(self.bounds) != n:
            raise ValueError("bounds length must match objective")
        for lo, hi in self.bounds:
            if not math.isfinite(lo) or lo > hi:
                raise ValueError("each bound needs finite lo <= hi")
        for coeffs, _ in self.eq_rows:
            if len(coeffs) != n:
                raise ValueError("eq row dimension mismatch")
        for coeffs, _, sense in self.ineq_rows:
            if len(coeffs) != n:
                raise ValueError("ineq row dimension mismatch")
            if sense not in ("<=", ">="):
                raise ValueError(f"bad sense {sense!r}")

    @property
    def n_vars(self):
        return len(self.objective)


@dataclass
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    values: np.ndarray | None = None
    objective_value: float | None = None


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    piv = T[row]
    for i in range(T.shape[0]):
        if i != row and abs(T[i, col]) > _PIVOT_EPS:
            T[i] -= T[i, col] * piv
    basis[row] = col


def _run_simplex(T, basis, cost, allowed, max_iter):
    """Minimize cost over the tableau in place; returns 'optimal'/'unbounded'."""
    m = T.shape[0]
    # Reduced-cost row kept explicitly; start from the given cost vector and
    # price out the current basis.
    z = np.append(cost.astype(float), 0.0)
    for i in range(m):
        if abs(z[basis[i]]) > _PIVOT_EPS:
            z = z - z[basis[i]] * T[i]
    bland_after = max(200, 20 * (m + len(cost)))
    it = 0
    while True:
        it += 1
        if it > max_iter:
            raise NumericalInstabilityError("simplex iteration cap hit (cycling?)")
        bland = it > bland_after
        cand = [j for j in allowed if z[j] < -OPT_TOL]
        if not cand:
            return "optimal", z
        col = cand[0] if bland else min(cand, key=lambda j: (z[j], j))
        ratios = []
        for i in range(m):
            a = T[i, col]
            if a > _PIVOT_EPS:
                ratios.append((T[i, -1] / a, basis[i], i))
        if not ratios:
            return "unbounded", z
        _, _, row = min(ratios)
        _pivot(T, basis, row, col)
        z = z - z[col] * T[row]


def solve(lp: LinearProgram) -> LPSolution:
    """Solve the program; status encodes infeasible/unbounded outcomes."""
    n = lp.n_vars
    lo = np.array([b[0] for b in lp.bounds])
    hi = np.array([b[1] for b in lp.bounds])

    # Shift to y = x - lo >= 0; finite upper bounds become <= rows.
    rows = []  # (coeffs, rhs, kind)
    for coeffs, rhs in lp.eq_rows:
        a = np.asarray(coeffs, dtype=float)
        rows.append((a, rhs - float(a @ lo), "="))
    for coeffs, rhs, sense in lp.ineq_rows:
        a = np.asarray(coeffs, dtype=float)
        shifted = rhs - float(a @ lo)
        if sense == ">=":
            rows.append((-a, -shifted, "<="))
        else:
            rows.append((a, shifted, "<="))
    for j in range(n):
        if math.isfinite(hi[j]):
            a = np.zeros(n)
            a[j] = 1.0
            rows.append((a, hi[j] - lo[j], "<="))

    m = len(rows)
    n_slack = sum(1 for r in rows if r[2] == "<=")
    # Worst case every row needs an artificial.
    width = n + n_slack + m + 1
    T = np.zeros((m, width))
    basis = np.full(m, -1, dtype=int)
    slack_at = n
    art_at = n + n_slack
    art_cols = []
    for i, (a, rhs, kind) in enumerate(rows):
        sign = 1.0
        if rhs < 0:
            a, rhs, sign = -a, -rhs, -1.0
        T[i, :n] = a
        T[i, -1] = rhs
        if kind == "<=":
            T[i, slack_at] = sign
            if sign > 0:
                basis[i] = slack_at
            slack_at += 1
        if basis[i] < 0:
            T[i, art_at] = 1.0
            basis[i] = art_at
            art_cols.append(art_at)
            art_at += 1

    if np.any(~np.isfinite(T)):
        raise NumericalInstabilityError("non-finite coefficients in tableau")

    max_iter = 20000 + 200 * (m + n)
    structural = list(range(n + n_slack))

    if art_cols:
        phase1 = np.zeros(width - 1)
        phase1[art_cols] = 1.0
        status, z = _run_simplex(T, basis, phase1, structural, max_iter)
        if status != "optimal" or -z[-1] > FEAS_TOL:
            return LPSolution("infeasible")
        # Drive leftover artificials out of the basis where possible.
        for i in range(m):
            if basis[i] in art_cols:
                pivot_col = next(
                    (j for j in structural if abs(T[i, j]) > 1e-8), None
                )
                if pivot_col is not None:
                    _pivot(T, basis, i, pivot_col)
                else:
                    T[i, :] = 0.0  # redundant row

    phase2 = np.zeros(width - 1)
    phase2[:n] = lp.objective
    status, _ = _run_simplex(T, basis, phase2, structural, max_iter)
    if status == "unbounded":
        return LPSolution("unbounded")

    y = np.zeros(width - 1)
    for i in range(m):
        if basis[i] >= 0:
            y[basis[i]] = T[i, -1]
    x = y[:n] + lo
    np.clip(x, lo, hi, out=x)
    return LPSolution("optimal", x, float(lp.objective @ x))


def solve_cover_lp(costs, path_rows, keep=frozenset()) -> LPSolution:
    """Relaxed covering program: min cost @ d with d over each row summing >= 1.

    ``path_rows`` holds sets of item indices; items in ``keep`` are pinned to
    zero. The returned values span the full cost vector. Raises
    InfeasibleCoverError when a row has no item outside ``keep``.
    """
    costs = np.asarray(costs, dtype=float)
    keep = frozenset(keep)
    reduced = []
    for row in path_rows:
        cut = frozenset(row) - keep
        if not cut:
            raise InfeasibleCoverError("a constraint row lies entirely in the keep set")
        reduced.append(cut)
    items = sorted(set().union(*reduced)) if reduced else []
    pos = {e: i for i, e in enumerate(items)}
    n = len(items)
    ineq = []
    for row in reduced:
        a = np.zeros(n)
        for e in row:
            a[pos[e]] = 1.0
        ineq.append((a, 1.0, ">="))
    lp = LinearProgram(costs[items] if items else np.zeros(0), [], ineq, [(0.0, 1.0)] * n)
    sol = solve(lp)
    if sol.status != "optimal":
        return sol
    full = np.zeros(len(costs))
    full[items] = sol.values
    return LPSolution("optimal", full, sol.objective_value)


def dump_lp(lp: LinearProgram, name="program") -> str:
    """Render the program in LP interchange text format for external checks."""

    def term(c, j):
        return f"{'+' if c >= 0 else '-'} {abs(c):.12g} x{j}"

    lines = [f"\\ {name}", "Minimize", " obj: " + " ".join(
        term(c, j) for j, c in enumerate(lp.objective) if c != 0.0
    ) or " obj: 0 x0", "Subject To"]
    idx = 0
    for coeffs, rhs in lp.eq_rows:
        body = " ".join(term(c, j) for j, c in enumerate(coeffs) if c != 0.0)
        lines.append(f" e{idx}: {body} = {rhs:.12g}")
        idx += 1
    for coeffs, rhs, sense in lp.ineq_rows:
        body = " ".join(term(c, j) for j, c in enumerate(coeffs) if c != 0.0)
        lines.append(f" i{idx}: {body} {'<=' if sense == '<=' else '>='} {rhs:.12g}")
        idx += 1
    lines.append("Bounds")
    for j, (lo, hi) in enumerate(lp.bounds):
        hi_txt = f"{hi:.12g}" if math.isfinite(hi) else "+inf"
        lines.append(f" {lo:.12g} <= x{j} <= {hi_txt}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def solve_binary_program(lp: LinearProgram, binary, time_limit=None) -> LPSolution:
    """Exact minimum of ``lp`` with the ``binary`` variables forced to {0, 1}.

    Depth-first branch and bound over the LP relaxation. Branching picks the
    most fractional binary variable and explores the nearest integer first.
    Raises SolveTimeoutError when the deadline passes before the tree is
    exhausted.
    """
    deadline = None if time_limit is None else time.monotonic() + time_limit
    binary = sorted(binary)
    best_val = math.inf
    best_x = None
    stack = [tuple(lp.bounds)]
    while stack:
        if deadline is not None and time.monotonic() > deadline:
            raise SolveTimeoutError("binary solve exceeded its time limit")
        bounds = stack.pop()
        sol = solve(LinearProgram(lp.objective, lp.eq_rows, lp.ineq_rows, list(bounds)))
        if sol.status != "optimal":
            continue
        if sol.objective_value >= best_val - 1e-9:
            continue
        frac_j, frac_amt = -1, 0.0
        for j in binary:
            f = abs(sol.values[j] - round(sol.values[j]))
            if f > 1e-6 and f > frac_amt + 1e-12:
                frac_j, frac_amt = j, f
        if frac_j < 0:
            x = sol.values.copy()
            for j in binary:
                x[j] = round(x[j])
            best_val = float(lp.objective @ x)
            best_x = x
            continue
        near = round(sol.values[frac_j])
        far_bounds = list(bounds)
        near_bounds = list(bounds)
        near_bounds[frac_j] = (float(near), float(near))
        far_bounds[frac_j] = (1.0 - near, 1.0 - near)
        stack.append(tuple(far_bounds))
        stack.append(tuple(near_bounds))
    if best_x is None:
        return LPSolution("infeasible")
    return LPSolution("optimal", best_x, best_val)

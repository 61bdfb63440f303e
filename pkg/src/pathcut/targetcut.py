"""Force all shortest routes between two terminals through a target edge/node.

Three layers:

* a joint binary program that picks the cheapest cut together with the
  shortest surviving route through the target, with the route/cut coupling
  written as per-edge linear rows (exact over binary variables);
* a constraint-generation loop around that program for a fixed budget;
* two minimisers of the budget itself: bisection between attack-derived
  bounds, and a polynomial-time search that freezes one bottleneck edge per
  round as either always-removed or never-removed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InfeasibleBudgetError,
    InfeasibleInstanceError,
    IterationCapError,
    NoRouteThroughTargetError,
    SolveTimeoutError,
)
from .graph import Graph
from .lp import LinearProgram, solve_binary_program
from .pathattack import pathattack
from .paths import (
    Path,
    length_leq,
    length_lt,
    shortest_path,
    shortest_path_via_edge,
    shortest_path_via_node,
)


@dataclass
class TimeLimits:
    per_solve: float = 10.0
    per_budget: float = 60.0
    total: float = 600.0


@dataclass
class TargetCutInstance:
    graph: Graph
    s: int
    t: int
    target_kind: str  # "edge" | "node"
    target: int  # edge id or node id
    eps: float | None = None
    limits: TimeLimits = field(default_factory=TimeLimits)

    def __post_init__(self):
        if self.target_kind not in ("edge", "node"):
            raise ValueError(f"bad target kind {self.target_kind!r}")
        if self.s == self.t:
            raise ValueError("terminals must differ")
        if self.target_kind == "edge" and not 0 <= self.target < self.graph.n_edges:
            raise ValueError("target edge id out of range")
        if self.target_kind == "node" and not 0 <= self.target < self.graph.n_nodes:
            raise ValueError("target node id out of range")

    def resolved_eps(self):
        if self.eps is not None:
            return self.eps
        return 1e-6 * float(np.sum(self.graph.cost))


@dataclass
class CutSolution:
    edges: frozenset
    cost: float
    timed_out: bool = False
    diagnostics: dict = field(default_factory=dict)

    def to_record(self, g: Graph):
        return {
            "cut": [list(g.edge_labels(e)) for e in sorted(self.edges)],
            "cost": self.cost,
            "timed_out": self.timed_out,
            "diagnostics": dict(self.diagnostics),
        }


def via_target_path(inst: TargetCutInstance, removed=frozenset()) -> Path:
    g = inst.graph
    if inst.target_kind == "edge":
        return shortest_path_via_edge(g, inst.s, inst.t, inst.target, removed)
    return shortest_path_via_node(g, inst.s, inst.t, inst.target, removed)


def off_target_path(inst: TargetCutInstance, removed=frozenset()):
    """Shortest s-t path that avoids the target entirely (None if none)."""
    g = inst.graph
    if inst.target_kind == "edge":
        return shortest_path(g, inst.s, inst.t, frozenset(removed) | {inst.target})
    return shortest_path(g, inst.s, inst.t, frozenset(removed), banned_nodes={inst.target})


def verify_target_cut(inst: TargetCutInstance, cut) -> bool:
    """Every shortest s-t path after the cut must traverse the target."""
    cut = frozenset(cut)
    if inst.target_kind == "edge" and inst.target in cut:
        return False
    try:
        via = via_target_path(inst, removed=cut)
    except NoRouteThroughTargetError:
        return False
    other = off_target_path(inst, removed=cut)
    return other is None or length_lt(via.length, other.length)


# ---------------------------------------------------------------------------
# Joint route-and-cut program.
# ---------------------------------------------------------------------------


@dataclass
class JointProgram:
    """Binary program coupling two route halves with the cut vector.

    Variables: one 0/1 entry per arc for each half (undirected edges get an
    arc in both directions), then one 0/1 entry per edge for the cut. The
    route/cut exclusivity is the per-arc row x + delta <= 1, which equals the
    bilinear form on binary points.
    """

    graph: Graph
    s: int
    t: int
    target_kind: str
    target: int
    head: int  # route half 1 ends here
    tail: int  # route half 2 starts here
    budget: float
    path_rows: list  # frozensets of edge ids that must be cut
    arcs: list = field(init=False)
    lp: LinearProgram = field(init=False)
    n_arcs: int = field(init=False)

    def __post_init__(self):
        g = self.graph
        if g.directed:
            self.arcs = [(u, v, e) for e, (u, v) in enumerate(g.edges)]
        else:
            self.arcs = []
            for e, (u, v) in enumerate(g.edges):
                self.arcs.append((u, v, e))
                self.arcs.append((v, u, e))
        A = self.n_arcs = len(self.arcs)
        M = g.n_edges
        N = g.n_nodes
        nv = 2 * A + M  # x1 arcs, x2 arcs, delta edges
        obj = np.zeros(nv)
        for i, (_, _, e) in enumerate(self.arcs):
            obj[i] = obj[A + i] = g.weight[e]

        eq, ineq = [], []
        d1 = np.zeros(N)
        d2 = np.zeros(N)
        if self.s != self.head:
            d1[self.s], d1[self.head] = -1.0, 1.0
        if self.tail != self.t:
            d2[self.tail], d2[self.t] = -1.0, 1.0
        for n in range(N):
            row1 = np.zeros(nv)
            row2 = np.zeros(nv)
            for i, (u, v, _) in enumerate(self.arcs):
                if u == n:
                    row1[i] -= 1.0
                    row2[A + i] -= 1.0
                if v == n:
                    row1[i] += 1.0
                    row2[A + i] += 1.0
            eq.append((row1, d1[n]))
            eq.append((row2, d2[n]))

        # Visit caps: terminals and target endpoints once, everything else twice.
        singles = {self.s, self.t}
        if self.target_kind == "edge":
            singles |= {self.head, self.tail}
        for n in range(N):
            row = np.zeros(nv)
            for i, (u, v, _) in enumerate(self.arcs):
                if n in (u, v):
                    row[i] += 1.0
                    row[A + i] += 1.0
            ineq.append((row, 1.0 if n in singles else 2.0, "<="))

        if not g.directed:
            # An edge's two arcs never appear together within one half.
            for e in range(M):
                i, j = 2 * e, 2 * e + 1
                for base in (0, A):
                    row = np.zeros(nv)
                    row[base + i] = row[base + j] = 1.0
                    ineq.append((row, 1.0, "<="))

        for i, (_, _, e) in enumerate(self.arcs):
            for base in (0, A):
                row = np.zeros(nv)
                row[base + i] = 1.0
                row[2 * A + e] = 1.0
                ineq.append((row, 1.0, "<="))

        brow = np.zeros(nv)
        brow[2 * A :] = g.cost
        ineq.append((brow, float(self.budget), "<="))

        for path_row in self.path_rows:
            row = np.zeros(nv)
            for e in path_row:
                row[2 * A + e] = 1.0
            ineq.append((row, 1.0, ">="))

        bounds = [(0.0, 1.0)] * nv
        if self.target_kind == "edge":
            bounds[2 * A + self.target] = (0.0, 0.0)
            for i, (_, _, e) in enumerate(self.arcs):
                if e == self.target:
                    bounds[i] = bounds[A + i] = (0.0, 0.0)
        if self.s == self.head:
            for i in range(A):
                bounds[i] = (0.0, 0.0)
        if self.tail == self.t:
            for i in range(A):
                bounds[A + i] = (0.0, 0.0)
        self.lp = LinearProgram(obj, eq, ineq, bounds)

    def bridge(self):
        """(node sequence, edge ids, weight) contributed by the target itself."""
        if self.target_kind == "edge":
            return (self.head, self.tail), (self.target,), float(self.graph.weight[self.target])
        return (self.head,), (), 0.0

    def extract(self, values):
        """Walk the two halves out of a binary solution; returns (path, cut)."""
        A = self.n_arcs
        g = self.graph

        def walk(base, start, stop):
            succ = {}
            for i, (u, v, e) in enumerate(self.arcs):
                if values[base + i] > 0.5:
                    succ[u] = (v, e)
            nodes, edges = [start], []
            seen = {start}
            while nodes[-1] != stop:
                nxt = succ.get(nodes[-1])
                if nxt is None or nxt[0] in seen:
                    raise ValueError("route extraction failed")
                nodes.append(nxt[0])
                edges.append(nxt[1])
                seen.add(nxt[0])
            return nodes, edges

        n1, e1 = walk(0, self.s, self.head)
        n2, e2 = walk(A, self.tail, self.t)
        bridge_nodes, bridge_edges, _ = self.bridge()
        if self.target_kind == "edge":
            nodes = tuple(n1) + (self.tail,) + tuple(n2[1:])
            edges = tuple(e1) + bridge_edges + tuple(e2)
        else:
            nodes = tuple(n1) + tuple(n2[1:])
            edges = tuple(e1) + tuple(e2)
        if len(set(nodes)) != len(nodes):
            raise ValueError("extracted route is not simple")
        cut = frozenset(
            e for e in range(g.n_edges) if values[2 * A + e] > 0.5
        )
        path = Path(nodes, edges, g.path_weight(edges))
        return path, cut


def joint_programs(inst: TargetCutInstance, budget, path_rows):
    """One program per target orientation (two for undirected edge targets)."""
    g = inst.graph
    if inst.target_kind == "node":
        yield JointProgram(g, inst.s, inst.t, "node", inst.target,
                           inst.target, inst.target, budget, list(path_rows))
        return
    u, v = g.endpoints(inst.target)
    orientations = [(u, v)] if g.directed else [(u, v), (v, u)]
    for head, tail in orientations:
        yield JointProgram(g, inst.s, inst.t, "edge", inst.target,
                           head, tail, budget, list(path_rows))


def solve_joint_program(jp: JointProgram, time_limit=None):
    """Exact optimum: shortest through-route first, then the cheapest cut.

    Returns (path, cut) or raises InfeasibleBudgetError / SolveTimeoutError.
    """
    deadline = None if time_limit is None else time.monotonic() + time_limit

    def remaining():
        return None if deadline is None else max(0.01, deadline - time.monotonic())

    binary = list(range(len(jp.lp.objective)))
    stage1 = solve_binary_program(jp.lp, binary, time_limit=remaining())
    if stage1.status != "optimal":
        raise InfeasibleBudgetError("no through-route within budget")
    _, _, bridge_w = jp.bridge()
    route_rows = list(jp.lp.ineq_rows)
    route_rows.append((jp.lp.objective.copy(), stage1.objective_value + 1e-7, "<="))
    A = jp.n_arcs
    cut_obj = np.zeros(len(jp.lp.objective))
    cut_obj[2 * A :] = jp.graph.cost
    stage2 = solve_binary_program(
        LinearProgram(cut_obj, jp.lp.eq_rows, route_rows, jp.lp.bounds),
        binary,
        time_limit=remaining(),
    )
    if stage2.status != "optimal":
        raise InfeasibleBudgetError("cut-minimising stage infeasible")
    return jp.extract(stage2.values)


def _constraint_generation(inst: TargetCutInstance, budget, rows, hard_deadline=None):
    """Grow the constraint set until the through-route beats every other path.

    Returns (cut, through_path); mutates ``rows`` in place so callers can
    reuse accumulated constraints across budgets.
    """
    g = inst.graph
    limit = inst.limits.per_budget
    deadline = time.monotonic() + limit
    if hard_deadline is not None:
        deadline = min(deadline, hard_deadline)
    cap = 10 * max(1, g.n_edges)
    for _ in range(cap):
        if time.monotonic() > deadline:
            raise SolveTimeoutError("constraint generation ran out of time")
        best = None
        infeasible = 0
        programs = list(joint_programs(inst, budget, rows))
        for jp in programs:
            try:
                path, cut = solve_joint_program(jp, time_limit=inst.limits.per_solve)
            except InfeasibleBudgetError:
                infeasible += 1
                continue
            key = (path.length, g.total_cost(cut), path.nodes)
            if best is None or key < best[0]:
                best = (key, path, cut)
        if infeasible == len(programs):
            raise InfeasibleBudgetError(f"budget {budget:.6g} is too small")
        _, p1, cut = best
        p2 = off_target_path(inst, removed=cut)
        if p2 is None or not length_leq(p2.length, p1.length):
            return CutSolution(cut, g.total_cost(cut)), p1
        new_row = frozenset(p2.edges)
        if new_row in rows:
            raise IterationCapError("separation returned a covered route")
        rows.append(new_row)
    raise IterationCapError("constraint generation exceeded its iteration cap")


def edge_cut_constraint_generation(inst: TargetCutInstance, budget) -> CutSolution:
    """Fixed-budget solve for an edge target; fresh constraint set."""
    rows = []
    cut, _ = _constraint_generation(inst, budget, rows)
    cut.diagnostics["generated_rows"] = len(rows)
    return cut


def _lower_keep(inst: TargetCutInstance):
    # Only the target itself is protected in bound runs; a node target has
    # no edge counterpart to protect.
    return frozenset({inst.target}) if inst.target_kind == "edge" else frozenset()


def _bound_value(report):
    """Certified-side value of a bound run: the relaxed objective, not the
    rounded cut cost (rounding can overshoot the optimum)."""
    if report.cut.lp_objective is not None:
        return float(report.cut.lp_objective)
    return float(report.cut.total_cost)


def combinatorial_search(inst: TargetCutInstance, seed=None) -> CutSolution:
    """Bisect the removal budget between attack-derived bounds."""
    g = inst.graph
    eps = inst.resolved_eps()
    rng = np.random.default_rng(seed)
    t_end = time.monotonic() + inst.limits.total

    def attack(p, keep, removed=frozenset()):
        return pathattack(g, p, keep, engine="rand",
                          seed=int(rng.integers(2**63)), removed=removed)

    try:
        p = via_target_path(inst)
    except NoRouteThroughTargetError as exc:
        raise InfeasibleInstanceError(str(exc)) from exc
    upper = attack(p, keep=frozenset(p.edges))
    best_cut = frozenset(upper.cut.cut_edges)
    b_upper = upper.cut.total_cost
    lower = attack(p, keep=_lower_keep(inst))
    b_lower = min(_bound_value(lower), b_upper)
    rows = []
    iterations = 0
    timed_out = False
    while b_upper - b_lower > eps:
        if time.monotonic() > t_end:
            timed_out = True
            break
        iterations += 1
        b_mid = (b_upper + b_lower) / 2.0
        mark = len(rows)
        try:
            mid, p1 = _constraint_generation(inst, b_mid, rows, hard_deadline=t_end)
        except InfeasibleBudgetError:
            b_lower = b_mid
            del rows[mark:]
            continue
        except SolveTimeoutError:
            timed_out = True
            break
        if mid.cost < b_upper:
            b_upper, best_cut = mid.cost, mid.edges
        # A cheaper through-route may exist once the mid cut is applied;
        # rebase both bounds on it.
        p_new = shortest_path(g, inst.s, inst.t, removed=mid.edges)
        if p_new is not None and p_new.nodes != p.nodes:
            p = p_new
            refreshed = attack(p, keep=frozenset(p.edges))
            if refreshed.cut.total_cost < b_upper:
                b_upper, best_cut = refreshed.cut.total_cost, frozenset(refreshed.cut.cut_edges)
            relower = attack(p, keep=_lower_keep(inst))
            b_lower = max(b_lower, _bound_value(relower))
        b_lower = min(b_lower, b_upper)
    assert verify_target_cut(inst, best_cut)
    return CutSolution(
        frozenset(best_cut),
        g.total_cost(best_cut),
        timed_out=timed_out,
        diagnostics={
            "iterations": iterations,
            "b_lower": b_lower,
            "b_upper": b_upper,
            "generated_rows": len(rows),
            "mode": "combinatorial",
        },
    )


def heuristic_search(inst: TargetCutInstance, seed=None) -> CutSolution:
    """Bottleneck-freezing search; always returns a valid cut.

    Each round runs the path attack twice (full protection for an upper
    bound, target-only protection for a lower bound), then trials removing
    each cut edge that sits on the current through-route. The best trial edge
    is frozen as always-removed; an edge whose removal disconnects the
    terminals or kills every through-route is frozen as never-removed.
    """
    g = inst.graph
    eps = inst.resolved_eps()
    rng = np.random.default_rng(seed)
    t_end = time.monotonic() + inst.limits.total
    always, never = set(), set()
    best_cut, best_cost = None, math.inf
    invocations = 0
    rounds = 0
    timed_out = False

    def attack(p, keep, removed):
        nonlocal invocations
        invocations += 1
        return pathattack(g, p, keep, engine="rand",
                          seed=int(rng.integers(2**63)), removed=frozenset(removed))

    try:
        via_target_path(inst)
    except NoRouteThroughTargetError as exc:
        raise InfeasibleInstanceError(str(exc)) from exc

    for _ in range(g.n_edges + 1):
        rounds += 1
        try:
            p = via_target_path(inst, removed=always)
        except NoRouteThroughTargetError:
            break  # defensive; committed removals never sever the through-route
        upper = attack(p, keep=frozenset(p.edges), removed=always)
        upper_cut = frozenset(always) | upper.cut.cut_edges
        b_upper = g.total_cost(upper_cut)
        if b_upper < best_cost:
            best_cut, best_cost = upper_cut, b_upper
        lower = attack(p, keep=_lower_keep(inst) | never, removed=always)
        b_lower = _bound_value(lower) + g.total_cost(always)
        if best_cost <= b_lower + eps or time.monotonic() > t_end:
            timed_out = time.monotonic() > t_end and best_cost > b_lower + eps
            break
        candidates = [e for e in p.edges if e in lower.cut.cut_edges and e not in never]
        if not candidates:
            break  # nothing on the through-route was cut by the bound run
        budgeted = []
        blocked = None
        for e in candidates:
            trial_removed = set(always) | {e}
            try:
                p_e = via_target_path(inst, removed=trial_removed)
            except NoRouteThroughTargetError:
                blocked = e
                break
            if shortest_path(g, inst.s, inst.t, removed=frozenset(trial_removed)) is None:
                blocked = e
                break
            trial = attack(p_e, keep=frozenset(p_e.edges), removed=trial_removed)
            trial_cut = frozenset(trial_removed) | trial.cut.cut_edges
            trial_cost = g.total_cost(trial_cut)
            if trial_cost < best_cost:
                best_cut, best_cost = trial_cut, trial_cost
            budgeted.append((trial_cost, e))
        if blocked is not None:
            never.add(blocked)
            continue
        _, chosen = min(budgeted)
        always.add(chosen)

    assert best_cut is not None and verify_target_cut(inst, best_cut)
    return CutSolution(
        frozenset(best_cut),
        best_cost,
        timed_out=timed_out,
        diagnostics={
            "rounds": rounds,
            "attack_runs": invocations,
            "always": sorted(always),
            "never": sorted(never),
            "mode": "heuristic",
        },
    )


def node_cut_search(inst: TargetCutInstance, mode="combinatorial", seed=None) -> CutSolution:
    """Force Node Cut entry point: same searches with node-target routing."""
    if inst.target_kind != "node":
        raise ValueError("node_cut_search needs a node target")
    if mode == "combinatorial":
        return combinatorial_search(inst, seed=seed)
    if mode == "heuristic":
        return heuristic_search(inst, seed=seed)
    raise ValueError(f"unknown mode {mode!r}")

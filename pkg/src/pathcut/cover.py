"""Set-cover engines over a fixed path set.

Competing paths are the elements; cuttable items (edge ids, or node ids for
the removal variant) are the sets. Two engines: iterative greedy selection,
and relaxed-program rounding that repeats Bernoulli draws until the cut is
complete and lands inside the acceptance bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleCoverError, RoundingBudgetError, UncoverablePathError
from .graph import Graph
from .lp import solve_cover_lp
from .paths import Path


@dataclass
class PathConstraintSet:
    """Indexed paths plus their per-path cuttable item sets.

    ``rows[i]`` is the set of items that can break ``paths[i]``; items in
    ``keep`` never appear in a row. ``kind`` records whether items are edge
    or node ids.
    """

    paths: list
    rows: list
    item_costs: np.ndarray
    keep: frozenset
    kind: str = "edge"
    per_item_index: dict = field(init=False)

    def __post_init__(self):
        self.item_costs = np.asarray(self.item_costs, dtype=float)
        index = {}
        for pid, row in enumerate(self.rows):
            if not row:
                raise InfeasibleCoverError(
                    f"path {pid} has no cuttable {self.kind} outside the keep set"
                )
            if row & self.keep:
                raise ValueError("rows must exclude keep items")
            for item in row:
                index.setdefault(item, set()).add(pid)
        self.per_item_index = index

    def __len__(self):
        return len(self.paths)


def edge_constraint_set(g: Graph, paths, keep) -> PathConstraintSet:
    keep = frozenset(keep)
    rows = [frozenset(p.edges) - keep for p in paths]
    return PathConstraintSet(list(paths), rows, g.cost, keep, kind="edge")


def node_constraint_set(paths, node_costs, protected) -> PathConstraintSet:
    """Rows hold the removable interior nodes of each path."""
    protected = frozenset(protected)
    rows = [frozenset(p.nodes[1:-1]) - protected for p in paths]
    return PathConstraintSet(list(paths), rows, node_costs, protected, kind="node")


@dataclass
class CoverResult:
    """Chosen cut. ``cut_edges`` holds item ids of the constraint set's kind."""

    cut_edges: frozenset
    total_cost: float
    trials: int = 1
    lp_objective: float | None = None
    bound_factor: float | None = None


def greedy_path_cover(g: Graph, pcs: PathConstraintSet) -> CoverResult:
    """Repeatedly cut the item covering the most uncut paths per unit cost.

    Ties break toward the lower item id. Worst-case cost is within the
    harmonic number H(len(pcs)) of the optimal cover.
    """
    counts = {item: len(pids) for item, pids in pcs.per_item_index.items()}
    alive = {item: set(pids) for item, pids in pcs.per_item_index.items()}
    uncovered = set(range(len(pcs.rows)))
    costs = pcs.item_costs
    cut = set()
    while uncovered:
        best_item, best_score = None, None
        for item in sorted(counts):
            n = counts[item]
            if n <= 0:
                continue
            c = costs[item]
            score = math.inf if c <= 0 else n / c
            if best_score is None or score > best_score:
                best_item, best_score = item, score
        if best_item is None:
            raise UncoverablePathError("uncovered paths remain but no item cuts them")
        cut.add(best_item)
        for pid in list(alive[best_item]):
            uncovered.discard(pid)
            for other in pcs.rows[pid]:
                alive[other].discard(pid)
                counts[other] -= 1
    total = float(sum(costs[i] for i in cut))
    return CoverResult(frozenset(cut), total, trials=1)


def rounding_trial_cap(n_items: int) -> int:
    """Safety cap on rounding repetitions before giving up."""
    return 64 * max(1, math.ceil(math.log2(max(2, n_items))))


def rand_path_cover(g: Graph, pcs: PathConstraintSet, rng_seed=None) -> CoverResult:
    rng = np.random.default_rng(rng_seed)
    return _rand_cover(pcs, rng)


def _rand_cover(pcs: PathConstraintSet, rng) -> CoverResult:
    """Relax, then round: draw ceil(ln(4|P|)) Bernoulli passes per trial and
    accept once every path is cut and the cost is within 4*ln(4|P|) of the
    fractional optimum."""
    sol = solve_cover_lp(pcs.item_costs, pcs.rows, pcs.keep)
    if sol.status != "optimal":
        raise InfeasibleCoverError(f"relaxed cover program is {sol.status}")
    frac = sol.values
    lp_obj = sol.objective_value
    n_paths = len(pcs.rows)
    factor = 4.0 * math.log(4.0 * n_paths)
    draws = math.ceil(math.log(4.0 * n_paths))
    budget = lp_obj * factor * (1.0 + 1e-9) + 1e-12
    items = sorted(pcs.per_item_index)
    probs = np.array([frac[i] for i in items])
    cap = rounding_trial_cap(len(pcs.item_costs))
    trials = 0
    while True:
        trials += 1
        if trials > cap:
            raise RoundingBudgetError(
                f"no acceptable rounding after {cap} trials"
            )
        picked = np.zeros(len(items), dtype=bool)
        for _ in range(draws):
            picked |= rng.random(len(items)) < probs
        cut = {items[i] for i in np.nonzero(picked)[0]}
        cost = float(sum(pcs.item_costs[i] for i in cut))
        covered = all(row & cut for row in pcs.rows)
        if covered and cost <= budget:
            return CoverResult(
                frozenset(cut), cost, trials=trials,
                lp_objective=lp_obj, bound_factor=factor,
            )

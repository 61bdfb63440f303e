"""Constraint-generation driver that makes a target path strictly shortest.

The loop alternates a separation oracle (shortest competing path) with a
cover engine over the accumulated competing paths. It terminates when every
other route between the terminals is strictly longer than the target path,
so success always means the target is the unique shortest path.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .cover import (
    CoverResult,
    edge_constraint_set,
    greedy_path_cover,
    node_constraint_set,
    _rand_cover,
)
from .errors import IterationCapError, InfeasibleInstanceError
from .graph import Graph, induced_subgraph
from .paths import (
    Path,
    iter_shortest_simple_paths,
    length_leq,
    length_lt,
    next_competing_path,
)

ENGINES = ("greedy", "rand")


@dataclass
class PathAttackReport:
    """Outcome of one attack run."""

    cut: CoverResult
    iterations: int
    generated_paths: list
    final_check: bool
    wall_time: float
    engine: str
    kind: str = "edge"

    def to_record(self, g: Graph):
        if self.kind == "edge":
            removed = sorted(self.cut.cut_edges)
            cut_field = [list(g.edge_labels(e)) for e in removed]
        else:
            cut_field = [g.labels[v] for v in sorted(self.cut.cut_edges)]
        return {
            "kind": self.kind,
            "engine": self.engine,
            "cut": cut_field,
            "cost": self.cut.total_cost,
            "iterations": self.iterations,
            "trials": self.cut.trials,
            "lp_objective": self.cut.lp_objective,
            "bound_factor": self.cut.bound_factor,
            "final_check": self.final_check,
            "wall_time_s": self.wall_time,
        }


def _empty_cover():
    return CoverResult(frozenset(), 0.0, trials=0)


def _run_engine(engine, g, pcs, rng):
    if engine == "greedy":
        return greedy_path_cover(g, pcs)
    if engine == "rand":
        return _rand_cover(pcs, rng)
    raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")


def default_iteration_cap(g: Graph) -> int:
    return 10 * max(1, g.n_edges)


def pathattack(g: Graph, p_star: Path, keep, engine="rand", seed=None,
               iteration_cap=None, removed=frozenset()) -> PathAttackReport:
    """Cut a minimum-cost edge set so ``p_star`` becomes strictly shortest.

    ``keep`` is the protected edge set; pass the target path's own edges for
    the standard attack, or a smaller set to compute bound runs in which the
    target path itself may be severed. Competing paths are cut whenever they
    are not longer than ``p_star``, ties included. ``removed`` holds edges
    already absent from the working graph; they never enter the cut.
    """
    t0 = time.perf_counter()
    keep = frozenset(keep)
    removed = frozenset(removed)
    cap = iteration_cap if iteration_cap is not None else default_iteration_cap(g)
    rng = np.random.default_rng(seed)
    generated = []
    cut = _empty_cover()
    p = next_competing_path(g, p_star, removed=removed)
    iterations = 0
    while p is not None and length_leq(p.length, p_star.length):
        iterations += 1
        if iterations > cap:
            raise IterationCapError(f"no convergence after {cap} iterations")
        if generated and p.nodes == generated[-1].nodes:
            raise IterationCapError("oracle returned a path already covered")
        generated.append(p)
        pcs = edge_constraint_set(g, generated, keep)
        cut = _run_engine(engine, g, pcs, rng)
        p = next_competing_path(g, p_star, removed=removed | cut.cut_edges)

    intact = not (set(p_star.edges) & cut.cut_edges)
    ok = intact and (p is None or length_lt(p_star.length, p.length))
    return PathAttackReport(
        cut=cut,
        iterations=iterations,
        generated_paths=generated,
        final_check=ok,
        wall_time=time.perf_counter() - t0,
        engine=engine,
        kind="edge",
    )


# ---------------------------------------------------------------------------
# Node-removal variant: nodes are the sets covering competing paths. The
# terminals and every node of the target path are always protected.
# ---------------------------------------------------------------------------


def default_node_costs(g: Graph) -> np.ndarray:
    return np.array([float(g.degree(u)) for u in range(g.n_nodes)])


@dataclass
class NodeAttackInstance:
    graph: Graph
    p_star: Path
    node_cost: np.ndarray = None
    protected_nodes: frozenset = frozenset()

    def __post_init__(self):
        if self.node_cost is None:
            self.node_cost = default_node_costs(self.graph)
        self.node_cost = np.asarray(self.node_cost, dtype=float)
        self.protected_nodes = frozenset(self.protected_nodes) | set(self.p_star.nodes)

    @property
    def s(self):
        return self.p_star.source

    @property
    def t(self):
        return self.p_star.target


def check_node_removal_feasible(g: Graph, p_star: Path) -> bool:
    """True when node removal can make ``p_star`` strictly shortest.

    Within the subgraph induced on the target path's own nodes, no other
    route may tie or beat the target; those routes cannot be removed.
    """
    sub, _ = induced_subgraph(g, p_star.nodes)
    relabel = {u: sub.node_id(g.labels[u]) for u in p_star.nodes}
    sub_star = Path(
        tuple(relabel[u] for u in p_star.nodes),
        tuple(sub.edge_id(relabel[u], relabel[v]) for u, v in zip(p_star.nodes, p_star.nodes[1:])),
        p_star.length,
    )
    other = next_competing_path(sub, sub_star)
    return other is None or length_lt(p_star.length, other.length)


def _next_competing_with_nodes_removed(g, p_star, removed_nodes):
    it = iter_shortest_simple_paths(
        g, p_star.source, p_star.target, banned_nodes=frozenset(removed_nodes)
    )
    for path in it:
        if path.nodes != p_star.nodes:
            return path
    return None


def pathattack_nodes(inst: NodeAttackInstance, engine="rand", seed=None,
                     iteration_cap=None) -> PathAttackReport:
    """Node-removal attack; same loop with nodes as the covering sets."""
    g = inst.graph
    if not check_node_removal_feasible(g, inst.p_star):
        raise InfeasibleInstanceError(
            "a competing route inside the target path's own nodes cannot be removed"
        )
    t0 = time.perf_counter()
    cap = iteration_cap if iteration_cap is not None else 10 * max(1, g.n_nodes)
    rng = np.random.default_rng(seed)
    generated = []
    cut = _empty_cover()
    removed = frozenset()
    p = _next_competing_with_nodes_removed(g, inst.p_star, removed)
    iterations = 0
    while p is not None and length_leq(p.length, inst.p_star.length):
        iterations += 1
        if iterations > cap:
            raise IterationCapError(f"no convergence after {cap} iterations")
        generated.append(p)
        pcs = node_constraint_set(generated, inst.node_cost, inst.protected_nodes)
        cut = _run_engine(engine, g, pcs, rng)
        removed = cut.cut_edges
        p = _next_competing_with_nodes_removed(g, inst.p_star, removed)

    ok = not (removed & inst.protected_nodes) and (
        p is None or length_lt(inst.p_star.length, p.length)
    )
    return PathAttackReport(
        cut=cut,
        iterations=iterations,
        generated_paths=generated,
        final_check=ok,
        wall_time=time.perf_counter() - t0,
        engine=engine,
        kind="node",
    )

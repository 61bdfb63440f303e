"""Shortest-path primitives.

All functions are pure in (graph, arguments). Ties between equal-length
paths break toward the lexicographically smallest node sequence, which makes
every search in the package reproducible.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import islice

from .errors import NoRouteThroughTargetError
from .graph import Graph

# Relative slack used when comparing path lengths assembled from floats.
_REL = 1e-9


def length_leq(a, b):
    """True when length ``a`` is not longer than ``b`` (tolerant compare)."""
    return a <= b + _REL * max(1.0, abs(a), abs(b))


def length_lt(a, b):
    return a < b - _REL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class Path:
    """Simple path: node ids, edge ids, and total traversal weight."""

    nodes: tuple
    edges: tuple
    length: float

    @property
    def source(self):
        return self.nodes[0]

    @property
    def target(self):
        return self.nodes[-1]

    @property
    def hops(self):
        return len(self.edges)

    def labelled(self, g: Graph):
        return [g.labels[u] for u in self.nodes]

    def __len__(self):
        return len(self.nodes)


def path_from_nodes(g: Graph, node_seq) -> Path:
    """Build a Path from consecutive node ids, validating adjacency."""
    nodes = tuple(int(u) for u in node_seq)
    if len(set(nodes)) != len(nodes):
        raise ValueError("path repeats a node")
    edges = []
    for u, v in zip(nodes, nodes[1:]):
        eid = g.edge_id(u, v)
        if eid is None or (g.directed and g.edges[eid] != (u, v)):
            raise ValueError(f"no edge {u}->{v}")
        edges.append(eid)
    return Path(nodes, tuple(edges), g.path_weight(edges))


def path_from_labels(g: Graph, labels) -> Path:
    return path_from_nodes(g, [g.node_id(lab) for lab in labels])


def shortest_path(g: Graph, s, t, removed=frozenset(), banned_nodes=frozenset()):
    """Minimum-weight simple path from ``s`` to ``t``, or None if unreachable.

    ``removed`` holds edge ids to ignore, ``banned_nodes`` node ids to avoid.
    The heap is keyed on (length, node sequence), so among equal-length
    shortest paths the lexicographically smallest node sequence wins.
    """
    if s in banned_nodes or t in banned_nodes:
        return None
    if s == t:
        return Path((s,), (), 0.0)
    heap = [(0.0, (s,), ())]
    done = set()
    while heap:
        dist, nodes, edges = heapq.heappop(heap)
        u = nodes[-1]
        if u in done:
            continue
        done.add(u)
        if u == t:
            return Path(nodes, edges, dist)
        for v, eid, w in g.out_arcs(u):
            if eid in removed or v in done or v in banned_nodes or v in nodes:
                continue
            heapq.heappush(heap, (dist + w, nodes + (v,), edges + (eid,)))
    return None


def distances_to(g: Graph, t, removed=frozenset()):
    """Shortest-path distance from every node to ``t`` (dict; missing = unreachable)."""
    dist = {t: 0.0}
    heap = [(0.0, t)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist.get(v, float("inf")):
            continue
        for u, eid, w in g.in_arcs(v):
            if eid in removed:
                continue
            nd = d + w
            if nd < dist.get(u, float("inf")):
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def iter_shortest_simple_paths(g: Graph, s, t, removed=frozenset(), banned_nodes=frozenset()):
    """Yield simple s-t paths in nondecreasing length order.

    Deviation search over the previously yielded path; candidates are ranked
    by (length, node sequence) so the order is fully deterministic.
    """
    best = shortest_path(g, s, t, removed, banned_nodes)
    if best is None:
        return
    yield best
    found = [best]
    seen = {best.nodes}
    candidates = []
    while True:
        prev = found[-1]
        for i in range(len(prev.nodes) - 1):
            spur = prev.nodes[i]
            root_nodes = prev.nodes[: i + 1]
            root_edges = prev.edges[:i]
            root_len = g.path_weight(root_edges)
            ban_edges = set(removed)
            for p in found:
                if p.nodes[: i + 1] == root_nodes and len(p.edges) > i:
                    ban_edges.add(p.edges[i])
            ban_nodes = set(banned_nodes) | set(root_nodes[:-1])
            tail = shortest_path(g, spur, t, frozenset(ban_edges), frozenset(ban_nodes))
            if tail is None:
                continue
            nodes = root_nodes + tail.nodes[1:]
            if nodes in seen:
                continue
            seen.add(nodes)
            edges = root_edges + tail.edges
            cand = Path(nodes, edges, root_len + tail.length)
            heapq.heappush(candidates, (cand.length, cand.nodes, cand))
        if not candidates:
            return
        _, _, nxt = heapq.heappop(candidates)
        found.append(nxt)
        yield nxt


def k_shortest_simple_paths(g: Graph, s, t, k, removed=frozenset()):
    """First ``k`` simple s-t paths by length; shorter list if fewer exist."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return list(islice(iter_shortest_simple_paths(g, s, t, removed), k))


def next_competing_path(g: Graph, p_star: Path, removed=frozenset()):
    """Shortest s-t path distinct from ``p_star``; None when no other exists.

    The exact path ``p_star`` is skipped by node sequence; equal-length paths
    are returned. Callers compare lengths to decide whether the returned path
    still competes.
    """
    it = iter_shortest_simple_paths(g, p_star.source, p_star.target, removed)
    for path in islice(it, 2):
        if path.nodes != p_star.nodes:
            return path
    return None


def _exact_via(g, s, mid_from, mid_to, bridge_edges, bridge_weight, removed, t):
    """Exact min-weight simple path s->mid_from ++ bridge ++ mid_to->t.

    Enumerates simple first-half paths depth-first with distance-based
    pruning; each complete half is finished with a Dijkstra run on the
    remaining nodes. Used only when the greedy concatenation is not simple.
    """
    removed = frozenset(removed) | frozenset(bridge_edges)
    to_first = distances_to(g, mid_from, removed)
    to_target = distances_to(g, t, removed)
    if s not in to_first or mid_to not in to_target:
        return None
    best = None
    # In the node case the two halves pivot on the same node; in the edge
    # case the first half must never touch the bridge head.
    skip_mid = mid_to if mid_to != mid_from else None

    def consider(first_nodes, first_edges, first_len):
        nonlocal best
        ban = frozenset(first_nodes) - {mid_to}
        tail = shortest_path(g, mid_to, t, removed, ban)
        if tail is None:
            return
        if mid_to == mid_from:
            nodes = first_nodes + tail.nodes[1:]
        else:
            nodes = first_nodes + tail.nodes
        edges = first_edges + tuple(bridge_edges) + tail.edges
        total = first_len + bridge_weight + tail.length
        cand = Path(nodes, edges, total)
        if best is None or (cand.length, cand.nodes) < (best.length, best.nodes):
            best = cand

    lower_tail = to_target.get(mid_to, float("inf"))

    def dfs(nodes, edges, acc):
        u = nodes[-1]
        if u == mid_from:
            consider(nodes, edges, acc)
            return
        for v, eid, w in g.out_arcs(u):
            if eid in removed or v in nodes or v == skip_mid:
                continue
            lb = acc + w + to_first.get(v, float("inf")) + bridge_weight + lower_tail
            if best is not None and not length_lt(lb, best.length):
                continue
            dfs(nodes + (v,), edges + (eid,), acc + w)

    dfs((s,), (), 0.0)
    return best


def _via_oriented(g, s, t, u, v, bridge_edges, removed):
    """Best simple s->u ++ bridge(u..v) ++ v->t path for a fixed orientation."""
    bridge_weight = g.path_weight(bridge_edges)
    first = shortest_path(g, s, u, frozenset(removed) | frozenset(bridge_edges))
    second = shortest_path(g, v, t, frozenset(removed) | frozenset(bridge_edges))
    if first is None or second is None:
        return None
    shared = set(first.nodes) & set(second.nodes)
    if (shared == {u}) if u == v else (not shared):
        nodes = first.nodes + (second.nodes[1:] if u == v else second.nodes)
        return Path(
            nodes,
            first.edges + tuple(bridge_edges) + second.edges,
            first.length + bridge_weight + second.length,
        )
    return _exact_via(g, s, u, v, bridge_edges, bridge_weight, removed, t)


def shortest_path_via_edge(g: Graph, s, t, e_star, removed=frozenset()):
    """Minimum-weight simple s-t path that traverses edge ``e_star``.

    Undirected graphs try both orientations and keep the cheaper result.
    Raises NoRouteThroughTargetError when no such simple path exists.
    """
    if e_star in removed:
        raise ValueError("target edge is in the removed set")
    a, b = g.endpoints(e_star)
    orientations = [(a, b)] if g.directed else [(a, b), (b, a)]
    best = None
    for u, v in orientations:
        if s == u and t == v:
            cand = Path((u, v), (e_star,), float(g.weight[e_star]))
        else:
            cand = _via_oriented(g, s, t, u, v, (e_star,), removed)
        if cand is not None and (best is None or (cand.length, cand.nodes) < (best.length, best.nodes)):
            best = cand
    if best is None:
        raise NoRouteThroughTargetError(f"no simple route via edge {g.edge_labels(e_star)}")
    return best


def shortest_path_via_node(g: Graph, s, t, v_star, removed=frozenset()):
    """Minimum-weight simple s-t path that visits node ``v_star``."""
    if v_star == s or v_star == t:
        got = shortest_path(g, s, t, removed)
        if got is None:
            raise NoRouteThroughTargetError(f"no route via node {g.labels[v_star]!r}")
        return got
    cand = _via_oriented(g, s, t, v_star, v_star, (), removed)
    if cand is None:
        raise NoRouteThroughTargetError(f"no simple route via node {g.labels[v_star]!r}")
    return cand

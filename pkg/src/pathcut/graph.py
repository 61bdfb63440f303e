"""Weighted graph model: construction, incidence matrices, and edge-list files.

A :class:`Graph` is immutable once built. Nodes are dense integer ids
internally; the labels supplied at construction time are kept in a side
table so files with string identifiers round-trip unchanged. Every edge
carries a traversal weight and a removal cost, both nonnegative.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEdgeError,
    EdgeListParseError,
    EmptyGraphError,
    NegativeValueError,
    SelfLoopError,
)

Label = Hashable


class Graph:
    """Directed or undirected graph with per-edge weight and removal cost.

    Undirected edges are stored once, under canonical (lower id, higher id)
    endpoint order. No self-loops, no duplicate edges.
    """

    __slots__ = (
        "directed",
        "labels",
        "edges",
        "weight",
        "cost",
        "_label_to_id",
        "_edge_to_id",
        "_out",
        "_in",
    )

    def __init__(self, directed, labels, edges, weight, cost):
        self.directed = bool(directed)
        self.labels = tuple(labels)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        self.weight = np.asarray(weight, dtype=float).copy()
        self.cost = np.asarray(cost, dtype=float).copy()
        self.weight.flags.writeable = False
        self.cost.flags.writeable = False
        if len(self.weight) != len(self.edges) or len(self.cost) != len(self.edges):
            raise ValueError("weight/cost arrays must match the edge count")

        self._label_to_id = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._label_to_id) != len(self.labels):
            raise ValueError("duplicate node labels")

        n = len(self.labels)
        self._edge_to_id = {}
        self._out = [[] for _ in range(n)]
        self._in = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {eid} endpoint out of range")
            if u == v:
                raise SelfLoopError(f"self-loop at node {self.labels[u]!r}")
            if self.weight[eid] < 0 or self.cost[eid] < 0:
                raise NegativeValueError(f"edge {eid} has negative weight or cost")
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            if key in self._edge_to_id:
                raise DuplicateEdgeError(
                    f"duplicate edge {self.labels[u]!r}-{self.labels[v]!r}"
                )
            self._edge_to_id[key] = eid
            w = float(self.weight[eid])
            self._out[u].append((v, eid, w))
            self._in[v].append((u, eid, w))
            if not self.directed:
                self._out[v].append((u, eid, w))
                self._in[u].append((v, eid, w))
        for adj in self._out:
            adj.sort()
        for adj in self._in:
            adj.sort()

    @property
    def n_nodes(self):
        return len(self.labels)

    @property
    def n_edges(self):
        return len(self.edges)

    def node_id(self, label):
        try:
            return self._label_to_id[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def label(self, node):
        return self.labels[node]

    def edge_id(self, u, v):
        """Edge id for endpoints (node ids); None if absent."""
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        return self._edge_to_id.get(key)

    def endpoints(self, eid):
        return self.edges[eid]

    def out_arcs(self, u):
        """(neighbor, edge id, weight) triples leaving ``u``, sorted by neighbor."""
        return self._out[u]

    def in_arcs(self, v):
        return self._in[v]

    def degree(self, u):
        if self.directed:
            return len(self._out[u]) + len(self._in[u])
        return len(self._out[u])

    def total_cost(self, eids):
        return float(sum(self.cost[e] for e in eids))

    def path_weight(self, eids):
        return float(sum(self.weight[e] for e in eids))

    def replace_weights(self, weight, cost):
        return Graph(self.directed, self.labels, self.edges, weight, cost)

    def edge_labels(self, eid):
        u, v = self.edges[eid]
        return (self.labels[u], self.labels[v])

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, {self.n_nodes} nodes, {self.n_edges} edges)"


def build_graph(directed, edge_list):
    """Build a :class:`Graph` from ``(u, v, weight, cost)`` tuples.

    ``weight`` defaults to 1 and ``cost`` defaults to the weight when the
    tuple is shorter. Node ids are assigned in first-appearance order.
    """
    labels = []
    index = {}

    def nid(label):
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    edges, weights, costs = [], [], []
    for item in edge_list:
        if len(item) == 2:
            u, v = item
            w, c = 1.0, 1.0
        elif len(item) == 3:
            u, v, w = item
            c = w
        else:
            u, v, w, c = item
        if u == v:
            raise SelfLoopError(f"self-loop at node {u!r}")
        edges.append((nid(u), nid(v)))
        weights.append(float(w))
        costs.append(float(c))
    return Graph(directed, labels, edges, weights, costs)


@dataclass(frozen=True)
class IncidenceMatrix:
    """Node-by-edge matrix with -1 at the tail and +1 at the head of each edge."""

    matrix: np.ndarray

    @property
    def abs_view(self):
        return np.abs(self.matrix)

    @property
    def shape(self):
        return self.matrix.shape


def incidence(g: Graph) -> IncidenceMatrix:
    """Incidence matrix of ``g``; undirected edges use their canonical order."""
    if g.n_nodes == 0:
        raise EmptyGraphError("cannot build an incidence matrix with no nodes")
    mat = np.zeros((g.n_nodes, g.n_edges))
    for eid, (u, v) in enumerate(g.edges):
        mat[u, eid] = -1.0
        mat[v, eid] = 1.0
    mat.flags.writeable = False
    return IncidenceMatrix(mat)


def induced_subgraph(g: Graph, nodes: Iterable[int]):
    """Subgraph induced on ``nodes``; labels are preserved.

    Returns ``(subgraph, to_parent)`` where ``to_parent`` maps each subgraph
    edge id back to the parent edge id.
    """
    keep = sorted(set(nodes))
    keep_set = set(keep)
    labels = [g.labels[u] for u in keep]
    remap = {u: i for i, u in enumerate(keep)}
    edges, weights, costs, to_parent = [], [], [], []
    for eid, (u, v) in enumerate(g.edges):
        if u in keep_set and v in keep_set:
            edges.append((remap[u], remap[v]))
            weights.append(g.weight[eid])
            costs.append(g.cost[eid])
            to_parent.append(eid)
    sub = Graph(g.directed, labels, edges, weights, costs)
    return sub, to_parent


def delete_edges(g: Graph, eids: Iterable[int]):
    """Copy of ``g`` without the given edges; returns (graph, to_parent)."""
    drop = set(eids)
    edges, weights, costs, to_parent = [], [], [], []
    for eid, (u, v) in enumerate(g.edges):
        if eid in drop:
            continue
        edges.append((u, v))
        weights.append(g.weight[eid])
        costs.append(g.cost[eid])
        to_parent.append(eid)
    return Graph(g.directed, g.labels, edges, weights, costs), to_parent


# ---------------------------------------------------------------------------
# Edge-list files.
#
# Whitespace format: one edge per line, ``u v weight [cost]``; ``#`` starts a
# comment. A ``# directed=true|false`` header records orientation. The CSV
# variant has header ``u,v,weight,cost``.
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def dumps_edge_list(g: Graph, fmt="whitespace") -> str:
    if fmt == "whitespace":
        out = [f"# directed={'true' if g.directed else 'false'}"]
        for eid, (u, v) in enumerate(g.edges):
            out.append(
                f"{g.labels[u]} {g.labels[v]} {_fmt(g.weight[eid])} {_fmt(g.cost[eid])}"
            )
        return "\n".join(out) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["u", "v", "weight", "cost"])
        for eid, (u, v) in enumerate(g.edges):
            writer.writerow(
                [g.labels[u], g.labels[v], _fmt(g.weight[eid]), _fmt(g.cost[eid])]
            )
        text = buf.getvalue()
        prefix = f"# directed={'true' if g.directed else 'false'}\n"
        return prefix + text
    raise ValueError(f"unknown edge-list format {fmt!r}")


def _parse_label(text: str):
    # Digit-only labels come back as ints so generated graphs round-trip.
    if text.lstrip("-").isdigit():
        return int(text)
    return text


def loads_edge_list(text: str, fmt="auto", directed=None) -> Graph:
    lines = text.splitlines()
    file_directed = None
    body = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line.startswith("#"):
            flag = line[1:].strip().replace(" ", "")
            if flag.startswith("directed="):
                file_directed = flag.split("=", 1)[1].lower() in ("true", "1", "yes")
            continue
        if line:
            body.append((lineno, line))
    if fmt == "auto":
        fmt = "csv" if body and "," in body[0][1] else "whitespace"
    if directed is None:
        directed = bool(file_directed)

    rows = []
    if fmt == "csv":
        if not body:
            raise EdgeListParseError("empty csv edge list")
        header = [h.strip() for h in next(csv.reader([body[0][1]]))]
        if header[:2] != ["u", "v"]:
            raise EdgeListParseError("csv header must start with u,v", line=body[0][0])
        for lineno, line in body[1:]:
            cells = next(csv.reader([line]))
            rows.append((lineno, [c.strip() for c in cells]))
    else:
        for lineno, line in body:
            rows.append((lineno, line.split()))

    edge_list = []
    for lineno, parts in rows:
        if len(parts) < 2 or len(parts) > 4:
            raise EdgeListParseError(f"expected 2-4 fields, got {len(parts)}", line=lineno)
        u, v = _parse_label(parts[0]), _parse_label(parts[1])
        try:
            w = float(parts[2]) if len(parts) > 2 and parts[2] != "" else 1.0
            c = float(parts[3]) if len(parts) > 3 and parts[3] != "" else w
        except ValueError:
            raise EdgeListParseError("weight/cost must be numeric", line=lineno) from None
        if w < 0 or c < 0:
            raise EdgeListParseError("weight/cost must be nonnegative", line=lineno)
        edge_list.append((u, v, w, c))
    try:
        return build_graph(directed, edge_list)
    except (DuplicateEdgeError, SelfLoopError) as exc:
        raise EdgeListParseError(str(exc)) from exc


def save_edge_list(g: Graph, path, fmt="whitespace"):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_edge_list(g, fmt=fmt))


def load_edge_list(path, fmt="auto", directed=None) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_edge_list(fh.read(), fmt=fmt, directed=directed)

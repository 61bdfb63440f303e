"""Random-graph models and edge-weight assignment schemes.

Node labels are ``0..n-1``. Every model is deterministic for a fixed seed.
Fresh graphs get unit weights and costs; use :func:`assign_weights` to apply
a scheme afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .graph import Graph

# Default initiator for the Kronecker model; override via the ``initiator``
# parameter (the literature gives no canonical choice).
KRON_DEFAULT_INITIATOR = ((0.9, 0.5), (0.5, 0.3))


def _graph_from_pairs(directed, n, pairs, rng_order=None):
    edges = list(pairs)
    w = np.ones(len(edges))
    return Graph(directed, range(n), edges, w, w.copy())


def _er(n, p, rng, directed):
    if n < 0 or not 0.0 <= p <= 1.0:
        raise InvalidParameterError("need n >= 0 and p in [0, 1]")
    pairs = []
    if directed:
        for u in range(n):
            draws = rng.random(n)
            for v in range(n):
                if u != v and draws[v] < p:
                    pairs.append((u, v))
    else:
        for u in range(n):
            draws = rng.random(n - u - 1) if u + 1 < n else ()
            for j, v in enumerate(range(u + 1, n)):
                if draws[j] < p:
                    pairs.append((u, v))
    return _graph_from_pairs(directed, n, pairs)


def _ba(n, m, rng):
    if m < 1 or n < m:
        raise InvalidParameterError("need 1 <= m <= n")
    # Preferential attachment by sampling from the running endpoint list;
    # each new node attaches to m distinct existing nodes, giving exactly
    # m*(n-m) edges.
    pairs = []
    endpoints = []
    for u in range(m, n):
        targets = set()
        while len(targets) < m:
            if endpoints:
                pick = endpoints[rng.integers(len(endpoints))]
            else:
                pick = int(rng.integers(u))
            if pick != u:
                targets.add(pick)
        for v in sorted(targets):
            pairs.append((min(u, v), max(u, v)))
            endpoints.extend((u, v))
    return _graph_from_pairs(False, n, pairs)


def _ws(n, k, beta, rng):
    if k < 2 or k % 2 or k >= n:
        raise InvalidParameterError("need even k with 2 <= k < n")
    if not 0.0 <= beta <= 1.0:
        raise InvalidParameterError("beta must be in [0, 1]")
    # Ring lattice, then each edge is rewired with probability beta. The
    # edge count n*k/2 is preserved.
    present = set()
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            present.add((min(u, v), max(u, v)))
    edges = sorted(present)
    for i, (u, v) in enumerate(edges):
        if rng.random() < beta:
            for _ in range(n):
                w = int(rng.integers(n))
                cand = (min(u, w), max(u, w))
                if w != u and cand not in present:
                    present.discard((u, v))
                    present.add(cand)
                    edges[i] = cand
                    break
    return _graph_from_pairs(False, n, sorted(present))


def _kron(scale, initiator, rng):
    theta = np.asarray(initiator, dtype=float)
    if theta.shape != (2, 2) or np.any(theta < 0) or np.any(theta > 1):
        raise InvalidParameterError("initiator must be a 2x2 matrix of probabilities")
    if scale < 1 or scale > 14:
        raise InvalidParameterError("scale must be in 1..14")
    n = 2**scale
    # Edge probability is the bit-wise product of initiator entries. Sampling
    # is exact over all unordered pairs, so keep the scale desk-sized.
    pairs = []
    for u in range(n):
        probs = np.ones(n - u - 1)
        for bit in range(scale):
            ub = (u >> bit) & 1
            vs = np.arange(u + 1, n)
            probs *= theta[ub, (vs >> bit) & 1]
        draws = rng.random(n - u - 1)
        for j in np.nonzero(draws < probs)[0]:
            pairs.append((u, u + 1 + int(j)))
    return _graph_from_pairs(False, n, pairs)


def _lat(rows, cols):
    if rows < 1 or cols < 1:
        raise InvalidParameterError("need rows, cols >= 1")
    pairs = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                pairs.append((u, u + 1))
            if r + 1 < rows:
                pairs.append((u, u + cols))
    return _graph_from_pairs(False, rows * cols, pairs)


def _comp(n):
    if n < 1:
        raise InvalidParameterError("need n >= 1")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return _graph_from_pairs(False, n, pairs)


def generate(model, seed=None, **params):
    """Generate a graph from one of the named models.

    Models and parameters:
      er(n, p)    der(n, p)    ba(n, m)    ws(n, k, beta)
      kron(scale, initiator)   lat(rows, cols)   comp(n)
    """
    rng = np.random.default_rng(seed)
    model = model.lower()
    try:
        if model == "er":
            return _er(int(params["n"]), float(params["p"]), rng, directed=False)
        if model == "der":
            return _er(int(params["n"]), float(params["p"]), rng, directed=True)
        if model == "ba":
            return _ba(int(params["n"]), int(params["m"]), rng)
        if model == "ws":
            return _ws(int(params["n"]), int(params["k"]), float(params["beta"]), rng)
        if model == "kron":
            initiator = params.get("initiator", KRON_DEFAULT_INITIATOR)
            return _kron(int(params["scale"]), initiator, rng)
        if model == "lat":
            return _lat(int(params["rows"]), int(params["cols"]))
        if model == "comp":
            return _comp(int(params["n"]))
    except KeyError as exc:
        raise InvalidParameterError(f"model {model!r} missing parameter {exc}") from None
    raise InvalidParameterError(f"unknown model {model!r}")


@dataclass(frozen=True)
class WeightScheme:
    """Edge-weight assignment: equal, poisson(rate) offset by 1, or uniform ints."""

    kind: str = "equal"
    rate: float = 20.0
    lo: int = 1
    hi: int = 41
    seed: int | None = None

    @classmethod
    def parse(cls, text, seed=None):
        """Parse ``equal``, ``poisson:RATE``, or ``uniform:LO:HI``."""
        parts = str(text).split(":")
        kind = parts[0].lower()
        if kind == "equal":
            return cls("equal", seed=seed)
        if kind == "poisson":
            rate = float(parts[1]) if len(parts) > 1 else 20.0
            return cls("poisson", rate=rate, seed=seed)
        if kind == "uniform":
            lo = int(parts[1]) if len(parts) > 1 else 1
            hi = int(parts[2]) if len(parts) > 2 else 41
            return cls("uniform", lo=lo, hi=hi, seed=seed)
        raise InvalidParameterError(f"unknown weight scheme {text!r}")


def assign_weights(g: Graph, scheme: WeightScheme, costs="weights") -> Graph:
    """Fresh copy of ``g`` with weights drawn per ``scheme``.

    ``costs`` is ``"weights"`` (cost equals weight), ``"unit"``, or ``"keep"``
    (retain the existing costs).
    """
    rng = np.random.default_rng(scheme.seed)
    m = g.n_edges
    if scheme.kind == "equal":
        w = np.ones(m)
    elif scheme.kind == "poisson":
        if scheme.rate < 0:
            raise InvalidParameterError("poisson rate must be >= 0")
        w = 1.0 + rng.poisson(scheme.rate, size=m)
    elif scheme.kind == "uniform":
        if scheme.lo > scheme.hi:
            raise InvalidParameterError("uniform needs lo <= hi")
        w = rng.integers(scheme.lo, scheme.hi + 1, size=m).astype(float)
    else:
        raise InvalidParameterError(f"unknown weight scheme {scheme.kind!r}")
    if costs == "weights":
        c = w.copy()
    elif costs == "unit":
        c = np.ones(m)
    elif costs == "keep":
        c = g.cost.copy()
    else:
        raise InvalidParameterError(f"unknown cost rule {costs!r}")
    return g.replace_weights(w, c)

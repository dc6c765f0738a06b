"""Distances from the discrete norm ``||df|| = max |f(k) - f(l)| / eps_kl`` over arrows.

On a weighted digraph the supremum of ``|f(p) - f(q)|`` over functions with
``||df|| <= 1`` is the shortest-path distance in the graph with orientations
forgotten and edge lengths ``eps``. Arrow direction never matters, and
vertices in different weakly connected components are infinitely far apart.
Vertices are numbered from 1.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    IndexOutOfRangeError,
    InvariantViolationError,
    LengthMismatchError,
    NoArrowsError,
)

__all__ = [
    "WeightedDigraph",
    "df_norm",
    "graph_distance",
    "graph_distance_matrix",
    "shortest_path_oracle",
    "path_graph",
    "cycle_graph",
]


@dataclass(frozen=True)
class WeightedDigraph:
    """Vertices ``1..n_vertices``, arrows ``(k, l)`` and positive weights.

    ``weights`` defaults to 1 on every arrow.
    """

    n_vertices: int
    arrows: tuple
    weights: tuple = None

    def __post_init__(self):
        if self.n_vertices < 1:
            raise InvariantViolationError(f"need at least one vertex, got {self.n_vertices}")
        arrows = tuple((int(k), int(l)) for k, l in self.arrows)
        weights = (1.0,) * len(arrows) if self.weights is None else tuple(float(w) for w in self.weights)
        if len(weights) != len(arrows):
            raise InvariantViolationError(f"{len(arrows)} arrows but {len(weights)} weights")
        seen = set()
        for (k, l), w in zip(arrows, weights):
            for v in (k, l):
                if not 1 <= v <= self.n_vertices:
                    raise InvariantViolationError(f"arrow ({k}, {l}) leaves vertex range 1..{self.n_vertices}")
            if k == l:
                raise InvariantViolationError(f"self-loop at vertex {k}")
            if (k, l) in seen:
                raise InvariantViolationError(f"duplicate arrow ({k}, {l})")
            if not (w > 0 and math.isfinite(w)):
                raise InvariantViolationError(f"arrow ({k}, {l}) has non-positive or non-finite weight {w}")
            seen.add((k, l))
        object.__setattr__(self, "arrows", arrows)
        object.__setattr__(self, "weights", weights)

    def reversed(self, which):
        """Copy with the arrows at the given positions flipped, weights kept."""
        which = set(which)
        arrows = [(l, k) if i in which else (k, l) for i, (k, l) in enumerate(self.arrows)]
        return WeightedDigraph(self.n_vertices, arrows, self.weights)

    def neighbours(self):
        """Undirected adjacency: ``{vertex: {neighbour: shortest eps}}``."""
        adj = {v: {} for v in range(1, self.n_vertices + 1)}
        for (k, l), w in zip(self.arrows, self.weights):
            adj[k][l] = min(w, adj[k].get(l, math.inf))
            adj[l][k] = min(w, adj[l].get(k, math.inf))
        return adj


def path_graph(n, eps=1.0):
    """The oriented path 1 -> 2 -> ... -> n."""
    return WeightedDigraph(n, [(k, k + 1) for k in range(1, n)], [eps] * (n - 1))


def cycle_graph(n, eps=1.0):
    """The oriented n-cycle, i.e. the path plus the arrow n -> 1."""
    return WeightedDigraph(n, [(k, k % n + 1) for k in range(1, n + 1)], [eps] * n)


def df_norm(g, f):
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size != g.n_vertices:
        raise LengthMismatchError(f"function has shape {f.shape}, graph has {g.n_vertices} vertices")
    if not g.arrows:
        raise NoArrowsError("graph has no arrows; ||df|| is undefined")
    return max(abs(f[k - 1] - f[l - 1]) / w for (k, l), w in zip(g.arrows, g.weights))


def _check_vertex(g, v):
    if not 1 <= v <= g.n_vertices:
        raise IndexOutOfRangeError(f"vertex {v} outside 1..{g.n_vertices}")


def shortest_path_oracle(g, p):
    """Dijkstra from ``p`` on the symmetrized graph; unreachable vertices get ``inf``.

    Entry ``v - 1`` of the result is the distance to vertex ``v``.
    """
    _check_vertex(g, p)
    adj = g.neighbours()
    dist = [math.inf] * g.n_vertices
    dist[p - 1] = 0.0
    heap = [(0.0, p)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v - 1]:
            continue
        for w, length in adj[v].items():
            nd = d + length
            if nd < dist[w - 1]:
                dist[w - 1] = nd
                heapq.heappush(heap, (nd, w))
    return np.array(dist)


def graph_distance(g, p, q):
    _check_vertex(g, p)
    _check_vertex(g, q)
    # always sum from the lower vertex so d(p, q) == d(q, p) bit for bit
    lo, hi = min(p, q), max(p, q)
    return float(shortest_path_oracle(g, lo)[hi - 1])


def graph_distance_matrix(g):
    m = np.vstack([shortest_path_oracle(g, p) for p in range(1, g.n_vertices + 1)])
    upper = np.triu(m)
    return upper + np.triu(m, 1).T

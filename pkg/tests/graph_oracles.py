"""Independent oracles for graph distances used by the test-suite."""

import math

import numpy as np
from scipy.optimize import linprog

from connes_lattice import WeightedDigraph


def enumerate_paths_distance(g, p, q):
    """Shortest length over every simple path, orientation ignored."""
    if p == q:
        return 0.0
    edges = {}
    for (k, l), w in zip(g.arrows, g.weights):
        for a, b in ((k, l), (l, k)):
            edges.setdefault(a, []).append((b, w))
    best = math.inf
    stack = [(p, 0.0, frozenset([p]))]
    while stack:
        v, length, seen = stack.pop()
        for w, eps in edges.get(v, []):
            if w == q:
                best = min(best, length + eps)
            elif w not in seen:
                stack.append((w, length + eps, seen | {w}))
    return best


def sup_by_linear_program(g, p, q):
    """max f(q) - f(p) subject to |f(k) - f(l)| <= eps_kl, f(p) = 0."""
    n = g.n_vertices
    rows, rhs = [], []
    for (k, l), w in zip(g.arrows, g.weights):
        row = np.zeros(n)
        row[k - 1], row[l - 1] = 1.0, -1.0
        rows += [row, -row]
        rhs += [w, w]
    c = np.zeros(n)
    c[q - 1] = -1.0
    bounds = [(None, None)] * n
    bounds[p - 1] = (0.0, 0.0)
    res = linprog(c, A_ub=np.array(rows) if rows else None, b_ub=rhs or None, bounds=bounds, method="highs")
    if res.status == 3:
        return math.inf
    return -res.fun


def random_digraph(rng, n_max=7, density=None):
    n = int(rng.integers(2, n_max + 1))
    density = rng.uniform(0.2, 0.7) if density is None else density
    arrows, weights = [], []
    for k in range(1, n + 1):
        for l in range(1, n + 1):
            if k != l and rng.random() < density / 2:
                arrows.append((k, l))
                weights.append(float(rng.choice([rng.uniform(0.1, 3.0), rng.integers(1, 4)])))
    return WeightedDigraph(n, arrows, weights)

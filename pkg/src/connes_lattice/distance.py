"""Connes' distance ``d(p, q) = sup{|f(p) - f(q)| : ||[D, f_hat]|| <= 1}``.

Three routes are offered:

* closed forms for the adjacency operators (``|p - q|`` on the segment,
  ``min(|p - q|, N - |p - q|)`` on the cycle);
* :func:`distance_numeric`, a general solver for any triple built by
  :func:`~connes_lattice.spectral_triple.build_triple`;
* :func:`distance_oracle`, a slow pattern-search maximizer kept independent
  of the solver so the two can check each other on small lattices.

Only real functions need to be searched: :func:`real_reduce` turns a complex
function into a real one whose commutator norm is no larger. The objective is
also invariant under adding constants and homogeneous under scaling, so the
solver fixes ``f(p) = 0`` and works with the ratio
``(f(q) - f(p)) / ||[D, f_hat]||``.
"""

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import (
    ConvergenceWarning,
    IndexOutOfRangeError,
    TooLargeError,
    TooSmallError,
)
from .numerics import spectral_norm
from .spectral_triple import DiracKind, SpectralTriple, Topology, lattice_function

__all__ = [
    "UNBOUNDED",
    "Method",
    "SolverOptions",
    "OracleOptions",
    "DistanceQuery",
    "DistanceResult",
    "real_reduce",
    "distance_exact_open",
    "distance_exact_closed",
    "distance_numeric",
    "distance_oracle",
    "distance",
    "distance_matrix",
]

UNBOUNDED = math.inf
UNBOUNDED_FACTOR = 1e6


class Method(enum.Enum):
    EXACT_OPEN = "exact-open"
    EXACT_CLOSED = "exact-closed"
    NUMERIC = "numeric"
    ORACLE = "oracle"


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for :func:`distance_numeric`.

    ``max_iterations`` is the total subgradient budget shared by all
    restarts. ``tolerance`` is the (relative) improvement below which the
    ascent and the refinement count as stalled; the refinement also stops
    early once its upper and lower bounds are that close. ``patience`` and
    ``stall_rounds`` are the stall windows, in ascent iterations and
    refinement rounds respectively.
    Set ``refine=False`` to get the bare subgradient ascent.
    ``complex_starts`` draws complex random starts and passes them through
    :func:`real_reduce` before the ascent.
    """

    max_iterations: int = 20000
    tolerance: float = 1e-10
    restarts: int = 8
    initial_step: float = 0.5
    seed: int = 0
    refine: bool = True
    max_refine_rounds: int = 400
    stall_rounds: int = 25
    patience: int = 50
    complex_starts: bool = False

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.initial_step <= 0:
            raise ValueError("initial_step must be positive")


@dataclass(frozen=True)
class OracleOptions:
    starts: int = 8
    initial_step: float = 0.25
    final_step: float = 1e-5
    seed: int = 0
    max_sites: int = 8


@dataclass(frozen=True)
class DistanceQuery:
    """A pair of 1-based sites on a spectral triple."""

    triple: SpectralTriple
    p: int
    q: int

    def __post_init__(self):
        n = self.triple.n_sites
        for name in ("p", "q"):
            k = getattr(self, name)
            if not 1 <= k <= n:
                raise IndexOutOfRangeError(f"site {name}={k} outside 1..{n}")


@dataclass(frozen=True, eq=False)
class DistanceResult:
    """A distance value with provenance.

    ``certificate`` (numeric and oracle routes) is a real function with
    commutator norm at most one whose value difference between the two sites
    equals ``value``, so ``value`` is always a certified lower bound.
    ``upper_bound`` is filled in when the cutting-plane refinement ran.
    """

    value: float
    method: Method
    certificate: np.ndarray | None = None
    iterations_used: int = 0
    converged: bool = True
    upper_bound: float | None = None

    @property
    def unbounded(self):
        return math.isinf(self.value)

    def as_dict(self):
        return {
            "value": None if self.unbounded else self.value,
            "unbounded": self.unbounded,
            "method": self.method.value,
            "certificate": None if self.certificate is None else [float(x) for x in self.certificate],
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "upper_bound": self.upper_bound,
        }


def real_reduce(f, topology):
    """Real function with the same (open) or no larger (closed) increments.

    Open lattice: ``F_1 = 0`` and ``F_{k+1} = F_k + |f_{k+1} - f_k|``.
    Closed lattice: ``F_k = |f_k - f_1|``.
    """
    f = lattice_function(f)
    topology = Topology(topology)
    if topology is Topology.OPEN:
        return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(f)))])
    return np.abs(f - f[0])


def _check_pair(n, p, q):
    for k in (p, q):
        if not 1 <= k <= n:
            raise IndexOutOfRangeError(f"site {k} outside 1..{n}")


def distance_exact_open(n, p, q):
    _check_pair(n, p, q)
    return float(abs(p - q))


def distance_exact_closed(n, p, q):
    if n < 3:
        raise TooSmallError(f"closed lattice needs n >= 3, got {n}")
    _check_pair(n, p, q)
    k = abs(p - q)
    return float(min(k, n - k))


# -- numeric solver ---------------------------------------------------------


def _real_if_possible(d):
    # norms are invariant under a global phase; real SVDs are much cheaper
    for phase in (1.0, 1j):
        rotated = d * phase
        if np.all(rotated.imag == 0):
            return rotated.real.copy()
    return d


class _Problem:
    """The linear map ``f -> [D, f_hat]`` and its norm, specialised to one pair."""

    def __init__(self, triple, p, q):
        self.dirac = _real_if_possible(np.asarray(triple.dirac))
        self.n = triple.n_sites
        self.doubled = triple.kind.doubled
        self.sites = np.arange(self.dirac.shape[0]) % self.n
        self.p = p - 1
        self.q = q - 1

    def matrix(self, f):
        # [D, diag(g)]_{ab} = D_{ab} (g_b - g_a)
        g = f[self.sites]
        return self.dirac * (g[None, :] - g[:, None])

    def svd(self, f):
        return np.linalg.svd(self.matrix(f))

    def cut(self, u, v):
        # d sigma / d f_k for the singular pair (u, v); also a supporting
        # hyperplane: cut @ f <= ||[D, f_hat]|| for every real f
        w = u.conj()[:, None] * self.dirac * v[None, :]
        flow = w.sum(axis=0) - w.sum(axis=1)
        return np.bincount(self.sites, weights=flow.real, minlength=self.n)


def _random_start(rng, prob, opts, topology):
    if opts.complex_starts:
        f = real_reduce(rng.normal(size=prob.n) + 1j * rng.normal(size=prob.n), topology)
    else:
        f = rng.normal(size=prob.n)
    f = f - f[prob.p]
    if f[prob.q] < 0:
        f = -f
    return f


def _ascent(prob, f, budget, opts):
    """Subgradient ascent on the scale-free ratio from one start.

    Returns (best_f, best_value, iterations, unbounded, cuts). ``best_f`` has
    unit commutator norm; ``cuts`` are the supporting hyperplanes met over
    the last few iterations.
    """
    limit = UNBOUNDED_FACTOR * prob.n
    keep = 4 * prob.n
    cuts = []
    best_f, best = None, -math.inf
    last_gain = 0
    it = 0
    for it in range(1, budget + 1):
        u, s, vh = prob.svd(f)
        sigma = s[0]
        if sigma <= 1e-300:
            if f[prob.q] > 0:
                return f, UNBOUNDED, it, True, cuts
            break
        f = f / sigma
        value = f[prob.q]
        if value > limit:
            return f, UNBOUNDED, it, True, cuts
        grad_norm = prob.cut(u[:, 0], vh[0].conj())
        cuts.append(grad_norm)
        del cuts[:-keep]
        if value > best + opts.tolerance:
            last_gain = it
        if value > best:
            best, best_f = value, f.copy()
        if it - last_gain > opts.patience:
            break
        # gradient of f_q / ||C(f)|| at unit norm
        grad = -value * grad_norm
        grad[prob.q] += 1.0
        grad[prob.p] = 0.0
        f = f + opts.initial_step / math.sqrt(it) * grad
        f[prob.p] = 0.0
    return best_f, best, it, False, cuts


def _polish(prob, f0):
    """Quasi-Newton ascent on the ratio from ``f0``; returns (f, value, ok).

    Where the top singular value is simple the ratio is smooth, and because
    the feasible set is convex a stationary point is the global maximum.
    """
    free = np.array([k for k in range(prob.n) if k != prob.p])

    def neg_ratio(x):
        f = np.zeros(prob.n)
        f[free] = x
        u, s, vh = prob.svd(f)
        if s[0] <= 1e-300:
            return 0.0, np.zeros_like(x)
        g = f[prob.q] / s[0]
        grad = -g * prob.cut(u[:, 0], vh[0].conj()) / s[0]
        grad[prob.q] += 1.0 / s[0]
        return -g, -grad[free]

    res = minimize(neg_ratio, f0[free], jac=True, method="BFGS", options={"gtol": 1e-12})
    f = np.zeros(prob.n)
    f[free] = res.x
    sigma = np.linalg.norm(prob.matrix(f), 2)
    if sigma <= 1e-300:
        return f0, f0[prob.q], False
    f = f / sigma
    grad_small = res.success or np.linalg.norm(res.jac) <= 1e-9
    return f, f[prob.q], bool(grad_small)


def _refine(prob, cuts, best_f, best, opts):
    """Kelley cutting planes seeded with the ascent's supporting hyperplanes.

    The linear program over the collected cuts is a relaxation, so its
    optimum is an upper bound; the rescaled LP point is a feasible lower
    bound. Returns (best_f, best, upper, rounds, converged, unbounded).
    """
    n = prob.n
    free = np.array([k for k in range(n) if k != prob.p])
    qi = int(np.flatnonzero(free == prob.q)[0])
    box = UNBOUNDED_FACTOR * n
    c = np.zeros(free.size)
    c[qi] = -1.0
    if cuts:
        rows = np.unique(np.round(np.asarray(cuts)[:, free], 12), axis=0)
        a_ub = np.vstack([rows, -rows])
    else:
        a_ub = None
    upper = math.inf

    def closed(lo):
        return upper - lo <= opts.tolerance * max(1.0, abs(lo))

    rounds = 0
    last_gain = 0
    while rounds < opts.max_refine_rounds:
        rounds += 1
        res = linprog(
            c,
            A_ub=a_ub,
            b_ub=None if a_ub is None else np.ones(a_ub.shape[0]),
            bounds=[(-box, box)] * free.size,
            method="highs",
        )
        if res.status != 0:
            break
        upper = min(upper, -res.fun)
        f = np.zeros(n)
        f[free] = res.x
        u, s, vh = prob.svd(f)
        if s[0] <= 1e-300:
            if f[prob.q] > 0:
                return f, UNBOUNDED, UNBOUNDED, rounds, True, True
            break
        candidates = [(f[prob.q] / s[0], f / s[0])]
        if rounds % 10 == 1 and best_f is not None:
            pf, pv, _ = _polish(prob, best_f)
            candidates.append((pv, pf))
        for value, cand in candidates:
            if value > best + opts.tolerance * max(1.0, abs(best)):
                last_gain = rounds
            if value > best:
                best, best_f = value, cand
        if upper >= 0.5 * box and rounds > 5 * n and best > box / n:
            # the relaxation is still pinned to the guard box
            return best_f, UNBOUNDED, UNBOUNDED, rounds, True, True
        if closed(best) or rounds - last_gain >= opts.stall_rounds:
            return best_f, best, upper, rounds, True, False
        new = [prob.cut(u[:, i], vh[i].conj())[free] for i in range(s.size) if s[i] > 1.0 + 1e-12]
        if not new:
            new = [prob.cut(u[:, 0], vh[0].conj())[free]]
        new = np.asarray(new)
        block = np.vstack([new, -new])
        a_ub = block if a_ub is None else np.vstack([a_ub, block])
    return best_f, best, upper, rounds, closed(best), False


def distance_numeric(query, opts=None):
    """Maximize ``f(q) - f(p)`` over real ``f`` with ``||[D, f_hat]|| <= 1``.

    A seeded multi-start subgradient ascent on
    ``g(f) = (f_q - f_p) / ||[D, f_hat]||`` (with ``f_p = 0``, diminishing
    steps ``initial_step / sqrt(iteration)`` and rescaling to unit norm
    after every step) finds a near-optimal certificate. The singular pairs
    met on the way are supporting hyperplanes of the unit ball of the
    seminorm, so they seed a cutting-plane linear program that closes the
    gap between the certified lower bound and the relaxation's upper bound.
    Every tenth round a quasi-Newton polish of the ratio runs from the best
    certificate; it settles smooth (curved) cases that cutting planes
    approach only slowly.

    The refinement stops when the bounds meet within ``opts.tolerance`` or
    the certified value has not moved by more than that for
    ``opts.stall_rounds`` rounds. Hitting ``opts.max_refine_rounds`` first
    flags the result ``converged=False`` and emits a
    :class:`ConvergenceWarning`; the best certificate is still returned.
    """
    opts = opts or SolverOptions()
    t = query.triple
    if query.p == query.q:
        return DistanceResult(0.0, Method.NUMERIC, np.zeros(t.n_sites), 0, True, 0.0)
    prob = _Problem(t, query.p, query.q)
    rng = np.random.default_rng(opts.seed)
    budget = max(1, opts.max_iterations // opts.restarts)
    cuts = []
    best_f, best, used = None, -math.inf, 0
    for _ in range(opts.restarts):
        start = _random_start(rng, prob, opts, t.lattice.topology)
        if not np.any(start):
            continue
        f, value, it, unbounded, found = _ascent(prob, start, budget, opts)
        used += it
        cuts.extend(found)
        if unbounded:
            return DistanceResult(UNBOUNDED, Method.NUMERIC, f, used, True, UNBOUNDED)
        # strict comparison: earliest restart wins ties
        if value > best:
            best, best_f = value, f

    upper = None
    converged = True
    if opts.refine:
        best_f, best, upper, rounds, converged, unbounded = _refine(prob, cuts, best_f, best, opts)
        used += rounds
        if unbounded:
            return DistanceResult(UNBOUNDED, Method.NUMERIC, best_f, used, True, UNBOUNDED)
    if not converged:
        warnings.warn(
            f"distance solver did not close its gap for pair ({query.p}, {query.q}): "
            f"lower {best:.12g}, upper {upper:.12g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    cert = best_f - best_f[prob.p]
    upper = None if upper is None else float(upper)
    return DistanceResult(float(cert[prob.q]), Method.NUMERIC, cert, used, bool(converged), upper)


# -- independent oracle ------------------------------------------------------


def _oracle_ratio(dirac, doubled, f, p, q):
    values = np.concatenate([f, f]) if doubled else f
    comm = dirac * (values[None, :] - values[:, None])
    norm = np.linalg.norm(comm, 2)
    if norm <= 1e-300:
        return -math.inf, norm
    return (f[q] - f[p]) / norm, norm


def distance_oracle(query, opts=None):
    """Brute-force pattern search over the increments ``f_{k+1} - f_k``.

    Moves along every single increment and every difference of two
    increments, accepting improvements, halving the step down to
    ``opts.final_step``. Restarted from several random points. Shares no code
    with :func:`distance_numeric` beyond the Dirac matrix itself. Limited to
    ``opts.max_sites`` sites.
    """
    opts = opts or OracleOptions()
    t = query.triple
    n = t.n_sites
    if n > opts.max_sites:
        raise TooLargeError(f"oracle limited to {opts.max_sites} sites, got {n}")
    p, q = query.p - 1, query.q - 1
    if p == q:
        return DistanceResult(0.0, Method.ORACLE, np.zeros(n), 0)
    dirac = np.asarray(t.dirac)
    doubled = t.kind.doubled
    m = n - 1
    directions = [np.eye(m)[k] for k in range(m)]
    directions += [np.eye(m)[i] - np.eye(m)[j] for i in range(m) for j in range(i + 1, m)]
    directions += [-d for d in directions]

    def evaluate(delta):
        f = np.concatenate([[0.0], np.cumsum(delta)])
        return _oracle_ratio(dirac, doubled, f, p, q)

    rng = np.random.default_rng(opts.seed)
    best_delta, best, evals = None, -math.inf, 0
    for _ in range(opts.starts):
        delta = rng.normal(size=m)
        value, norm = evaluate(delta)
        evals += 1
        if not np.isfinite(value):
            continue
        delta = delta / norm
        step = opts.initial_step
        while step >= opts.final_step:
            improved = True
            while improved:
                improved = False
                for d in directions:
                    trial = delta + step * d
                    v, norm = evaluate(trial)
                    evals += 1
                    if v > value + 1e-15:
                        value, delta, improved = v, trial / norm, True
            step /= 2
        if value > best:
            best, best_delta = value, delta
    f = np.concatenate([[0.0], np.cumsum(best_delta)])
    _, norm = _oracle_ratio(dirac, doubled, f, p, q)
    f = (f - f[p]) / norm
    return DistanceResult(float(f[q]), Method.ORACLE, f, evals)


# -- front doors --------------------------------------------------------------


def distance(triple, p, q, opts=None, exact=True):
    """Distance between 1-based sites, using a closed form when one applies."""
    n = triple.n_sites
    if exact and triple.kind in (DiracKind.ADJACENCY_PLAIN, DiracKind.ADJACENCY_DOUBLED):
        return DistanceResult(distance_exact_open(n, p, q), Method.EXACT_OPEN)
    if exact and triple.kind is DiracKind.CLOSED_ADJACENCY_DOUBLED:
        return DistanceResult(distance_exact_closed(n, p, q), Method.EXACT_CLOSED)
    return distance_numeric(DistanceQuery(triple, p, q), opts)


def distance_matrix(triple, opts=None, exact=True, results=None):
    """Symmetric matrix of all pairwise distances, zero diagonal.

    Only the upper triangle is computed. If ``results`` is a dict it is
    filled with the :class:`DistanceResult` of each computed pair ``(p, q)``.
    """
    n = triple.n_sites
    out = np.zeros((n, n))
    for p in range(1, n + 1):
        for q in range(p + 1, n + 1):
            r = distance(triple, p, q, opts, exact)
            out[p - 1, q - 1] = out[q - 1, p - 1] = r.value
            if results is not None:
                results[(p, q)] = r
    return out

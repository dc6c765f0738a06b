"""Finite spectral triples on one-dimensional lattices.

Four Dirac operators are supported:

* ``ADJACENCY_PLAIN``: the N x N adjacency matrix of the oriented path
  1 -> 2 -> ... -> N, acting on C^N (not selfadjoint).
* ``ADJACENCY_DOUBLED``: ``[[0, A^dagger], [A, 0]]`` on C^2N built from
  that adjacency matrix, with grading ``diag(1, ..., 1, -1, ..., -1)``.
* ``CLOSED_ADJACENCY_DOUBLED``: the same doubling applied to the cyclic
  adjacency matrix (extra arrow N -> 1).
* ``SYMMETRIC_DIFFERENCE``: ``(D psi)_k = (psi_{k+1} - psi_{k-1}) / 2i``
  truncated to N sites with an open boundary.

Matrices act by ``(M psi)_k = sum_l M[k, l] psi_l``. Sites are numbered
1..N in every public interface; arrays are 0-based internally.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import (
    IncompatibleKindError,
    LengthMismatchError,
    NotSquareError,
    TooSmallError,
)

__all__ = [
    "Topology",
    "DiracKind",
    "LatticeSpec",
    "SpectralTriple",
    "ValidationReport",
    "IdentityCheck",
    "build_adjacency_block",
    "build_closed_adjacency_block",
    "build_doubled_dirac",
    "build_symmetric_difference",
    "build_grading",
    "represent",
    "build_triple",
    "validate_triple",
    "commutator_norm",
    "lattice_function",
]


class Topology(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


class DiracKind(enum.Enum):
    ADJACENCY_PLAIN = "adjacency-plain"
    ADJACENCY_DOUBLED = "adjacency-doubled"
    SYMMETRIC_DIFFERENCE = "symmetric-difference"
    CLOSED_ADJACENCY_DOUBLED = "closed-adjacency-doubled"

    @property
    def doubled(self):
        return self in (DiracKind.ADJACENCY_DOUBLED, DiracKind.CLOSED_ADJACENCY_DOUBLED)

    @property
    def topology(self):
        """The only topology this operator is defined on."""
        if self is DiracKind.CLOSED_ADJACENCY_DOUBLED:
            return Topology.CLOSED
        return Topology.OPEN

    @property
    def adjacency(self):
        return self is not DiracKind.SYMMETRIC_DIFFERENCE


@dataclass(frozen=True)
class LatticeSpec:
    """Number of sites and whether the lattice is a segment or a cycle."""

    n_sites: int
    topology: Topology = Topology.OPEN

    def __post_init__(self):
        topology = Topology(self.topology)
        object.__setattr__(self, "topology", topology)
        if int(self.n_sites) != self.n_sites:
            raise TooSmallError(f"n_sites must be an integer, got {self.n_sites!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        minimum = 3 if topology is Topology.CLOSED else 2
        if self.n_sites < minimum:
            raise TooSmallError(
                f"{topology.value} lattice needs at least {minimum} sites, got {self.n_sites}"
            )


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _check_n(n, minimum):
    if n < minimum:
        raise TooSmallError(f"need at least {minimum} sites, got {n}")


def build_adjacency_block(n):
    """Adjacency matrix of the oriented path: ones on the first superdiagonal."""
    _check_n(n, 2)
    return np.eye(n, k=1, dtype=complex)


def build_closed_adjacency_block(n):
    """Adjacency matrix of the oriented n-cycle (path plus the arrow n -> 1)."""
    _check_n(n, 3)
    a = build_adjacency_block(n)
    a[n - 1, 0] = 1.0
    return a


def build_doubled_dirac(block):
    """``[[0, block^dagger], [block, 0]]``; exactly selfadjoint."""
    block = np.asarray(block, dtype=complex)
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise NotSquareError(f"block must be square, got shape {block.shape}")
    n = block.shape[0]
    d = np.zeros((2 * n, 2 * n), dtype=complex)
    d[:n, n:] = block.conj().T
    d[n:, :n] = block
    return d


def build_symmetric_difference(n):
    """Open-boundary truncation of the symmetric difference operator.

    Entry ``(k, k+1)`` is ``1/(2i) = -i/2`` and ``(k+1, k)`` is ``+i/2``.
    """
    _check_n(n, 2)
    return np.eye(n, k=1, dtype=complex) * (-0.5j) + np.eye(n, k=-1, dtype=complex) * 0.5j


def build_grading(n):
    """``diag(+1 x n, -1 x n)`` on C^2n."""
    if n < 1:
        raise TooSmallError(f"grading needs n >= 1, got {n}")
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)


def lattice_function(f, n_sites=None):
    """Validate a lattice function and return it as a 1-d array.

    Real input stays real; anything with an imaginary part becomes complex.
    """
    a = np.asarray(f)
    if a.ndim != 1 or a.size == 0:
        raise LengthMismatchError(f"lattice function must be a non-empty 1-d sequence, got shape {a.shape}")
    if n_sites is not None and a.size != n_sites:
        raise LengthMismatchError(f"function has {a.size} values, lattice has {n_sites} sites")
    if np.iscomplexobj(a):
        return a.astype(complex)
    return a.astype(float)


def represent(f, doubled):
    """Diagonal multiplication operator; the values repeat twice when doubled."""
    f = lattice_function(f)
    values = np.concatenate([f, f]) if doubled else f
    return np.diag(values.astype(complex))


@dataclass(frozen=True, eq=False)
class SpectralTriple:
    """Dirac operator, optional grading and representation rule on a lattice.

    Build instances with :func:`build_triple`. The matrices are read-only.
    """

    lattice: LatticeSpec
    kind: DiracKind
    dirac: np.ndarray
    grading: np.ndarray | None
    selfadjoint: bool
    _basis: np.ndarray = field(default=None, repr=False)

    @property
    def n_sites(self):
        return self.lattice.n_sites

    @property
    def hilbert_dim(self):
        return self.dirac.shape[0]

    def represent(self, f):
        return represent(lattice_function(f, self.n_sites), self.kind.doubled)

    def commutator(self, f):
        """``[D, f_hat]`` as a dense matrix."""
        return numerics.commutator(self.dirac, self.represent(f))

    @property
    def commutator_basis(self):
        """Stack of ``[D, e_k]`` for the site indicator functions ``e_k``.

        ``[D, f_hat] = sum_k f_k * commutator_basis[k]`` by linearity.
        """
        return self._basis


def _basis_for(dirac, n, doubled):
    # [D, diag(g)]_{ab} = D_{ab} (g_b - g_a)
    sites = np.arange(dirac.shape[0]) % n if doubled else np.arange(n)
    basis = np.empty((n,) + dirac.shape, dtype=complex)
    for k in range(n):
        g = (sites == k).astype(float)
        basis[k] = dirac * (g[None, :] - g[:, None])
    basis.setflags(write=False)
    return basis


def build_triple(lattice, kind):
    """Assemble the spectral triple of the given kind on ``lattice``."""
    kind = DiracKind(kind)
    if kind.topology is not lattice.topology:
        raise IncompatibleKindError(
            f"{kind.value} requires a {kind.topology.value} lattice, got {lattice.topology.value}"
        )
    n = lattice.n_sites
    grading = None
    if kind is DiracKind.ADJACENCY_PLAIN:
        dirac = build_adjacency_block(n)
    elif kind is DiracKind.ADJACENCY_DOUBLED:
        dirac = build_doubled_dirac(build_adjacency_block(n))
        grading = _frozen(build_grading(n))
    elif kind is DiracKind.CLOSED_ADJACENCY_DOUBLED:
        dirac = build_doubled_dirac(build_closed_adjacency_block(n))
        grading = _frozen(build_grading(n))
    else:
        dirac = build_symmetric_difference(n)
    selfadjoint = numerics.hermitian_deviation(dirac) <= numerics.HERMITIAN_TOL
    return SpectralTriple(
        lattice=lattice,
        kind=kind,
        dirac=_frozen(dirac),
        grading=grading,
        selfadjoint=selfadjoint,
        _basis=_basis_for(dirac, n, kind.doubled),
    )


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    status: str  # "pass", "fail", "skipped" or "n/a"
    deviation: float | None = None


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self):
        return all(c.status != "fail" for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def max_deviation(self):
        devs = [c.deviation for c in self.checks if c.deviation is not None]
        return max(devs, default=0.0)


def _max_abs(a):
    return float(np.max(np.abs(a))) if a.size else 0.0


def validate_triple(t, f_samples, tol=1e-12):
    """Check selfadjointness and the grading identities.

    The identities are ``D = D^dagger``, ``gamma^2 = 1``,
    ``gamma D = -D gamma`` and ``gamma f_hat = f_hat gamma`` for every sample.
    For the plain adjacency operator the selfadjointness check is skipped
    deliberately; kinds without a grading report the grading checks as n/a.
    """
    samples = [lattice_function(f, t.n_sites) for f in f_samples]

    def check(name, dev):
        return IdentityCheck(name, "pass" if dev <= tol else "fail", dev)

    checks = []
    if t.kind is DiracKind.ADJACENCY_PLAIN:
        checks.append(IdentityCheck("selfadjoint", "skipped"))
    else:
        checks.append(check("selfadjoint", numerics.hermitian_deviation(t.dirac)))

    names = ("grading_involution", "grading_anticommutes", "grading_commutes_with_functions")
    if t.grading is None:
        checks.extend(IdentityCheck(name, "n/a") for name in names)
        return ValidationReport(checks)

    g = t.grading
    d = t.dirac
    checks.append(check(names[0], _max_abs(g @ g - np.eye(t.hilbert_dim))))
    checks.append(check(names[1], _max_abs(g @ d + d @ g)))
    dev = max((_max_abs(numerics.commutator(g, t.represent(f))) for f in samples), default=0.0)
    checks.append(check(names[2], dev))
    return ValidationReport(checks)


def _fast_norm(t, f):
    diffs = np.diff(f)
    if t.kind is DiracKind.CLOSED_ADJACENCY_DOUBLED:
        diffs = np.append(diffs, f[0] - f[-1])
    return float(np.max(np.abs(diffs)))


def commutator_norm(t, f, method="auto"):
    """Operator norm of ``[D, f_hat]``.

    ``method="fast"`` uses ``max_k |f_{k+1} - f_k|`` (with wraparound on the
    cycle) and is only valid for the adjacency kinds, where
    ``Q Q^dagger`` is diagonal. ``"generic"`` takes the spectral norm of the
    commutator matrix. ``"auto"`` picks the fast path whenever it applies.
    """
    f = lattice_function(f, t.n_sites)
    if method == "auto":
        method = "fast" if t.kind.adjacency else "generic"
    if method == "fast":
        if not t.kind.adjacency:
            raise IncompatibleKindError(f"no closed-form norm for {t.kind.value}")
        return _fast_norm(t, f)
    if method != "generic":
        raise ValueError(f"unknown method {method!r}")
    return numerics.spectral_norm(t.commutator(f))

import numpy as np
import pytest

from connes_lattice import DiracKind, LatticeSpec, Topology, build_triple


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def triple(kind, n):
    kind = DiracKind(kind)
    return build_triple(LatticeSpec(n, kind.topology), kind)


ADJACENCY_KINDS = [
    (DiracKind.ADJACENCY_PLAIN, 2),
    (DiracKind.ADJACENCY_DOUBLED, 2),
    (DiracKind.CLOSED_ADJACENCY_DOUBLED, 3),
]

# coding: utf-8

# # Dirac operators on a five-site lattice
#
# Four operators are available. Here we build each one, look at the matrix
# and run the identity checks.

# In[1]:

import numpy as np

from connes_lattice import DiracKind, LatticeSpec, Topology, build_triple, validate_triple
from connes_lattice.spectral_triple import commutator_norm

np.set_printoptions(precision=2, suppress=True, linewidth=120)

# In[2]:

open5 = LatticeSpec(5, Topology.OPEN)
closed5 = LatticeSpec(5, Topology.CLOSED)

triples = {
    DiracKind.ADJACENCY_PLAIN: build_triple(open5, DiracKind.ADJACENCY_PLAIN),
    DiracKind.ADJACENCY_DOUBLED: build_triple(open5, DiracKind.ADJACENCY_DOUBLED),
    DiracKind.CLOSED_ADJACENCY_DOUBLED: build_triple(closed5, DiracKind.CLOSED_ADJACENCY_DOUBLED),
    DiracKind.SYMMETRIC_DIFFERENCE: build_triple(open5, DiracKind.SYMMETRIC_DIFFERENCE),
}

for kind, t in triples.items():
    print(f"{kind.value}: Hilbert space dimension {t.hilbert_dim}, selfadjoint={t.selfadjoint}")

# The plain adjacency matrix is just the shift; it is not selfadjoint.

# In[3]:

print(triples[DiracKind.ADJACENCY_PLAIN].dirac.real)

# Doubling puts the shift and its adjoint into off-diagonal blocks, and the
# grading diag(1,...,1,-1,...,-1) anticommutes with the result.

# In[4]:

rng = np.random.default_rng(0)
samples = [rng.normal(size=5) for _ in range(3)]
for kind, t in triples.items():
    report = validate_triple(t, samples)
    print(kind.value, [(c.name, c.status) for c in report.checks])

# For the adjacency operators the norm of [D, f] is the largest jump of f
# across an edge. The fast path and the spectral norm agree.

# In[5]:

f = np.array([0.0, 1.5, 1.0, 3.0, 2.0])
for kind in (DiracKind.ADJACENCY_DOUBLED, DiracKind.CLOSED_ADJACENCY_DOUBLED):
    t = triples[kind]
    print(kind.value, commutator_norm(t, f, "fast"), commutator_norm(t, f, "generic"))

# coding: utf-8

# # The symmetric difference operator
#
# With D = (shift forward - shift back) / 2i the distance is no longer the
# step count: one step away is 2, two steps away is 2*sqrt(2). We check
# this against the pattern-search oracle on small lattices and then sweep
# to larger ones.

# In[1]:

import math

import numpy as np

from connes_lattice import DistanceQuery, LatticeSpec, SolverOptions, build_triple, distance_numeric, distance_oracle
from connes_lattice.cli import convergence_study

# In[2]:

t = build_triple(LatticeSpec(7, "open"), "symmetric-difference")
for q in range(2, 7):
    solver = distance_numeric(DistanceQuery(t, 1, q)).value
    oracle = distance_oracle(DistanceQuery(t, 1, q)).value
    print(f"d(1, {q}) solver={solver:.8f} oracle={oracle:.8f}")

# Odd separations give 2n, even separations 2*sqrt(n(n+1)).

# In[3]:

for m in range(1, 6):
    n = (m + 1) // 2
    expected = 2 * n if m % 2 else 2 * math.sqrt(n * (n + 1))
    print(m, expected)

# An optimal function can always be taken flat outside the interval between
# the sites, so truncating to finitely many sites does not change the values.

# In[4]:

study = convergence_study((11, 21, 41), SolverOptions())
for row in study["rows"]:
    print(row["n"], f"{row['d_next']:.10f}", f"{row['d_second']:.10f}")
print("shrinking:", study["shrinking"], "within 2%:", study["within_2_percent"])

# In[5]:

r = distance_numeric(DistanceQuery(build_triple(LatticeSpec(9, "open"), "symmetric-difference"), 3, 6))
print("certificate for d(3, 6):", np.round(r.certificate, 4))

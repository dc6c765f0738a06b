# coding: utf-8

# # Distances on weighted digraphs
#
# With the discrete norm max |f(k) - f(l)| / eps over arrows, the distance is
# the shortest path with orientations ignored.

# In[1]:

import numpy as np

from connes_lattice import WeightedDigraph, cycle_graph, df_norm, graph_distance, graph_distance_matrix, path_graph

# In[2]:

print(graph_distance_matrix(path_graph(5)))
print(graph_distance_matrix(cycle_graph(6)))

# A small weighted graph, plus an isolated vertex that sits infinitely far away.

# In[3]:

g = WeightedDigraph(5, [(1, 2), (3, 2), (3, 4), (1, 4)], [0.5, 1.0, 0.25, 2.0])
print(graph_distance_matrix(g))

# Reversing arrows changes nothing.

# In[4]:

print(np.array_equal(graph_distance_matrix(g), graph_distance_matrix(g.reversed([0, 2]))))

# The function f(v) = d(1, v) is 1-Lipschitz and attains the distance.

# In[5]:

f = np.array([graph_distance(g, 1, v) for v in range(1, 5)] + [0.0])
print("f =", f, "||df|| =", df_norm(g, f))

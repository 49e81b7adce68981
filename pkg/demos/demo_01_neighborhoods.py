"""
Neighbor fields and how to compare them
=======================================

Every view gets a row-stochastic matrix ``P`` whose row ``i`` says how likely
each other point is to be picked as the neighbor of point ``i``. The match
between two views is then measured row by row.
"""

import numpy as np

from nrdep.measures import angle_cosine, kl_divergence, sim_inner, symmetrized_kl
from nrdep.neighborhood import compute_sigma, neighbor_field

rng = np.random.default_rng(0)

# %%
# Two clusters on a line. The bandwidth is 5% of the widest pairwise gap.
x = np.r_[rng.normal(0, 0.2, 4), rng.normal(5, 0.2, 4)][:, None]
sigma = compute_sigma(x)
p = neighbor_field(x, sigma)
print(f"sigma = {sigma:.3f}")
print("row 0 of P:", np.round(p[0], 3))

# %%
# A second view that keeps the cluster structure but shuffles points
# inside each cluster still agrees on which points are plausible neighbors.
y = x.copy()
y[:4] = y[[2, 0, 3, 1]]
q = neighbor_field(y, compute_sigma(y))
print("row 0 of Q:", np.round(q[0], 3))

# %%
# The inner product rewards sharp agreement; the cosine ignores scale;
# the KL divergence punishes a neighbor that one view misses.
for name, fn in [("sim", sim_inner), ("cosine", angle_cosine),
                 ("KL(p||q)", kl_divergence), ("sym KL", symmetrized_kl)]:
    print(f"{name:>9}: {fn(p[0], q[0]):.4f}")

# %%
# Block-uniform rows make the inner product a plain count:
# K plausible neighbors in one view, L in the other, M shared gives M/(K L).
a = np.array([1, 1, 1, 0, 0, 0]) / 3
b = np.array([0, 1, 1, 1, 1, 0]) / 4
print("sim =", sim_inner(a, b), "= 2 / (3*4) =", 2 / 12)

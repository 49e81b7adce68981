"""
Neighbor retrieval across views
===============================

Fit two-dimensional projections on a training split and measure how well the
neighbors of a point in one projection predict its neighbors in the other.
Precision and recall are averaged over points, with the 5 nearest neighbors
in the reference space taken as relevant.
"""

import numpy as np

from nrdep import FitConfig, SyntheticSpec, cca_fit, fit, generate, retrieval_curves, split_indices

synth = generate(SyntheticSpec(n_groups_per_dim=8, group_size=38, rng_seed=3))
views = synth.dataset.views
train, test = split_indices(synth.dataset.n_samples, 0.7, seed=3)

res = fit(synth.dataset.subset(train), FitConfig(subspace_dims=(2, 2), rng_seed=3))
cca = cca_fit(views[0][train], views[1][train], n_components=2)

# %%
# Held-out rows are projected with the maps learned on the training rows.
for label, maps in [("method", res.maps), ("CCA", [cca.w1, cca.w2])]:
    for part, rows in [("train", train), ("test", test)]:
        v = [x[rows] for x in views]
        subs = [m.transform(x) for m, x in zip(maps, v)]
        curves = retrieval_curves(v, subs)
        rep = curves["sub1_vs_sub2"]
        line = " ".join(f"{p:.2f}" for p in rep.mean_precision)
        print(f"{label:>6} {part:>5} precision@1..10: {line}")

# %%
# The second setting uses the raw first view as reference.
rep = retrieval_curves([x[test] for x in views],
                       [m.transform(x[test]) for m, x in zip(res.maps, views)])["view1_vs_sub2"]
print("k, precision, recall (raw view 1 vs subspace 2, test rows)")
for k, p, r in rep.points:
    print(f"{k:2d} {p:.3f} {r:.3f}")

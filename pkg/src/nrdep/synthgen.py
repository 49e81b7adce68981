"""Artificial two-view data with grouped, linearly uncorrelated dependencies.

Every feature dimension ``i`` is built as a pair shared between the views:
points fall into groups whose means differ per view, all points of a group
share one perturbation across the views, and a 2-D PCA rotation of the pair
removes any linear correlation. Dimensions are independently permuted, so
each axis ``e_i`` is a ground-truth dependent projection for both views.
"""

from dataclasses import dataclass, field

import numpy as np

from .data import LinearMap, MultiViewDataset, validate_dataset
from .exceptions import ZeroVector


@dataclass(frozen=True)
class SyntheticSpec:
    n_dims: int = 5
    n_groups_per_dim: int = 20
    group_size: int = 50
    group_mean_variance: float = 5.0
    perturbation_halfwidth: float = 0.5
    rng_seed: int = 0

    @property
    def n_samples(self):
        return self.n_groups_per_dim * self.group_size


@dataclass(frozen=True)
class SyntheticDataset:
    dataset: MultiViewDataset
    ground_truth: np.ndarray
    spec: SyntheticSpec
    # Generator internals for tests: labels, means, flips, perturbations,
    # permutations and the pre-PCA values of every dimension pair.
    internals: dict = field(default=None, repr=False, compare=False)


def _pca_rotate(pair):
    centered = pair - pair.mean(axis=0)
    evals, evecs = np.linalg.eigh(centered.T @ centered / len(pair))
    evecs = evecs[:, ::-1]
    # fix eigenvector signs so output does not depend on the LAPACK build
    big = np.argmax(np.abs(evecs), axis=0)
    evecs = evecs * np.sign(evecs[big, [0, 1]])
    return centered @ evecs


def generate(spec: SyntheticSpec = SyntheticSpec()) -> SyntheticDataset:
    rng = np.random.default_rng(spec.rng_seed)
    n, g, m = spec.n_samples, spec.n_groups_per_dim, spec.group_size
    std = np.sqrt(spec.group_mean_variance)
    h = spec.perturbation_halfwidth

    views = np.zeros((2, n, spec.n_dims))
    internals = {k: [] for k in ("labels", "means", "flips", "eps", "perm", "x_hat")}
    labels0 = np.repeat(np.arange(g), m)
    for i in range(spec.n_dims):
        means = rng.normal(0.0, std, size=(2, g))
        eps = rng.uniform(-h, h, size=n)
        flips = rng.choice([-1.0, 1.0], size=g)
        x_hat = flips[labels0] * means[:, labels0] + eps
        perm = rng.permutation(n)
        x_hat = x_hat[:, perm]
        rotated = _pca_rotate(x_hat.T)
        views[0, :, i] = rotated[:, 0]
        views[1, :, i] = rotated[:, 1]

        internals["labels"].append(labels0[perm])
        internals["means"].append(means)
        internals["flips"].append(flips)
        internals["eps"].append(eps[perm])
        internals["perm"].append(perm)
        internals["x_hat"].append(x_hat)

    internals = {k: np.array(v) for k, v in internals.items()}
    return SyntheticDataset(
        dataset=validate_dataset([views[0], views[1]]),
        ground_truth=np.eye(spec.n_dims),
        spec=spec,
        internals=internals,
    )


def _vec(w):
    w = w.weights if isinstance(w, LinearMap) else np.asarray(w, dtype=np.float64)
    return w.ravel()


def correspondence_score(w1, w2, ground_truth=None):
    """Alignment of two 1-D projections with the best ground-truth axis.

    ``max_i (|g_i . w1| / |w1| + |g_i . w2| / |w2|) / 2``; invariant to
    scaling and sign of either projection.
    """
    a, b = _vec(w1), _vec(w2)
    if ground_truth is None:
        ground_truth = np.eye(a.size)
    gt = np.atleast_2d(np.asarray(ground_truth, dtype=np.float64))
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("projection vector is zero")
    scores = 0.5 * (np.abs(gt @ a) / na + np.abs(gt @ b) / nb)
    return float(np.max(scores))

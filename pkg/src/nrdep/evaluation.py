"""Neighbor-retrieval evaluation and the repeated synthetic benchmark."""

from dataclasses import dataclass, field, replace
from typing import List, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from .cca import cca_fit
from .data import FitConfig, as_feature_matrix
from .exceptions import DimensionMismatch, KTooLarge
from .optimizer import fit
from .synthgen import SyntheticSpec, correspondence_score, generate


def neighbor_ranking(coords, k):
    """Indices of the ``k`` nearest other points of every row, nearest first.

    Ties are broken by the lower index.
    """
    coords = as_feature_matrix(coords, "coords")
    n = coords.shape[0]
    if not 1 <= k < n:
        raise KTooLarge(f"k={k} must be in [1, {n - 1}]")
    d = cdist(coords, coords, "sqeuclidean")
    np.fill_diagonal(d, np.inf)
    return np.argsort(d, axis=1, kind="stable")[:, :k]


def knn_sets(coords, k):
    """List of ``k``-nearest-neighbor index sets, one per row."""
    return [set(row.tolist()) for row in neighbor_ranking(coords, k)]


@dataclass
class RetrievalReport:
    k_ground_truth: int
    k_retrieved: List[int]
    mean_precision: np.ndarray
    mean_recall: np.ndarray
    labels: Tuple[str, str] = ("truth", "retrieval")

    @property
    def points(self):
        return list(zip(self.k_retrieved, self.mean_precision.tolist(),
                        self.mean_recall.tolist()))

    def at(self, k):
        i = self.k_retrieved.index(k)
        return float(self.mean_precision[i]), float(self.mean_recall[i])


def mean_precision_recall(truth_coords, retrieval_coords, k_truth=5, k_range=range(1, 11),
                          labels=("truth", "retrieval")):
    """Mean precision and recall of neighbors retrieved from another space.

    The relevant set of a point is its ``k_truth`` nearest neighbors in
    ``truth_coords``; for each ``k`` in ``k_range`` its ``k`` nearest
    neighbors in ``retrieval_coords`` are retrieved. Per-point precision and
    recall are averaged over points.
    """
    truth = as_feature_matrix(truth_coords, "truth coords")
    retr = as_feature_matrix(retrieval_coords, "retrieval coords")
    if truth.shape[0] != retr.shape[0]:
        raise DimensionMismatch("truth and retrieval spaces have different sample counts")
    ks = sorted(int(k) for k in k_range)
    if not ks:
        raise ValueError("k_range is empty")
    n = truth.shape[0]
    relevant = np.zeros((n, n), dtype=bool)
    rel_idx = neighbor_ranking(truth, k_truth)
    relevant[np.arange(n)[:, None], rel_idx] = True

    ranked = neighbor_ranking(retr, ks[-1])
    if ks[0] < 1:
        raise KTooLarge("retrieved k must be >= 1")
    hits = np.cumsum(relevant[np.arange(n)[:, None], ranked], axis=1)
    prec, rec = [], []
    for k in ks:
        h = hits[:, k - 1]
        prec.append(np.mean(h / k))
        rec.append(np.mean(h / k_truth))
    return RetrievalReport(k_truth, ks, np.array(prec), np.array(rec), tuple(labels))


def retrieval_curves(views, subspaces, k_truth=5, k_range=range(1, 11)):
    """Both retrieval settings for two views.

    ``view1_vs_sub2`` uses the raw first view as ground truth and the second
    view's projection for retrieval; ``sub1_vs_sub2`` uses the two
    projections.
    """
    return {
        "view1_vs_sub2": mean_precision_recall(views[0], subspaces[1], k_truth, k_range,
                                               ("view1", "subspace2")),
        "sub1_vs_sub2": mean_precision_recall(subspaces[0], subspaces[1], k_truth, k_range,
                                              ("subspace1", "subspace2")),
    }


@dataclass
class Table1Summary:
    method_scores: np.ndarray
    cca_scores: np.ndarray
    seeds: List[int] = field(default_factory=list)

    @staticmethod
    def _stats(a):
        return float(np.mean(a)), float(np.std(a))

    @property
    def method(self):
        return self._stats(self.method_scores)

    @property
    def cca(self):
        return self._stats(self.cca_scores)

    def rows(self):
        (mm, ms), (cm, cs) = self.method, self.cca
        return [("method", mm, ms), ("cca", cm, cs)]


def dataset_seeds(seed, n):
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def table1_protocol(n_datasets, fit_config: FitConfig, seed=0, spec: SyntheticSpec = SyntheticSpec(),
                    progress=None):
    """Correspondence scores of both methods over repeated synthetic datasets.

    Standard deviations are population (``ddof=0``) values, so a single
    dataset reports 0.
    """
    if n_datasets < 1:
        raise ValueError("n_datasets must be >= 1")
    method, baseline, seeds = [], [], dataset_seeds(seed, n_datasets)
    for i, s in enumerate(seeds):
        synth = generate(replace(spec, rng_seed=s))
        x1, x2 = synth.dataset.views
        cfg = replace(fit_config, subspace_dims=(1, 1), rng_seed=s)
        res = fit(synth.dataset, cfg)
        method.append(correspondence_score(res.maps[0], res.maps[1], synth.ground_truth))
        cc = cca_fit(x1, x2, n_components=1)
        baseline.append(correspondence_score(cc.w1, cc.w2, synth.ground_truth))
        if progress is not None:
            progress(i, method[-1], baseline[-1])
    return Table1Summary(np.array(method), np.array(baseline), seeds)

"""Gaussian neighborhood probabilities for raw and linearly projected views."""

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .data import LinearMap, as_feature_matrix
from .exceptions import DegenerateView, DimensionMismatch


def max_pairwise_distance(view):
    view = as_feature_matrix(view)
    if view.shape[0] < 2:
        return 0.0
    return float(np.max(pdist(view, "euclidean")))


def compute_sigma(view, sigma_fraction=0.05):
    """Bandwidth of a view: ``sigma_fraction`` times its largest pairwise distance.

    Computed on the input-space coordinates and meant to stay fixed while the
    projection is optimized.
    """
    if not sigma_fraction > 0:
        raise ValueError("sigma_fraction must be > 0")
    dmax = max_pairwise_distance(view)
    if dmax == 0.0:
        raise DegenerateView("all samples in the view are identical")
    return sigma_fraction * dmax


def log_softmax_rows(logits):
    """Row-wise softmax excluding the diagonal, with its logarithm.

    Each row has its maximum off-diagonal logit subtracted before
    exponentiation. The diagonal of the probabilities is exactly zero; the
    diagonal of the log-probabilities is set to 0 so that ``p * log p``
    stays finite.
    """
    return _log_softmax_inplace(np.array(logits, dtype=np.float64, copy=True))


def _log_softmax_inplace(s):
    np.fill_diagonal(s, -np.inf)
    s -= s.max(axis=1, keepdims=True)
    p = np.exp(s)
    z = p.sum(axis=1, keepdims=True)
    p /= z
    s -= np.log(z)
    np.fill_diagonal(s, 0.0)
    return p, s


def softmax_rows(logits):
    return log_softmax_rows(logits)[0]


def squared_distances(coords):
    coords = np.asarray(coords, dtype=np.float64)
    return cdist(coords, coords, "sqeuclidean")


def neighbor_field(coords, sigma):
    """Neighbor probabilities ``p(j|i)`` for the rows of ``coords``.

    Parameters
    ----------
    coords : array of shape (n, k)
    sigma : float
        Falloff scale shared by all points.

    Returns
    -------
    probs : array of shape (n, n)
        Row ``i`` is the distribution over neighbors ``j != i``.
    """
    coords = as_feature_matrix(coords, name="coords")
    if coords.shape[0] < 2:
        raise ValueError("need at least 2 points")
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    return softmax_rows(-squared_distances(coords) / sigma**2)


def _projected(view, weights):
    w = weights.weights if isinstance(weights, LinearMap) else np.asarray(weights, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    view = as_feature_matrix(view)
    if w.shape[0] != view.shape[1]:
        raise DimensionMismatch(
            f"map has {w.shape[0]} input rows, view has {view.shape[1]} features"
        )
    return view @ w


def projected_neighbor_field(view, weights, sigma):
    """Neighbor field of ``view @ weights`` with a fixed input-space ``sigma``."""
    return neighbor_field(_projected(view, weights), sigma)


def projected_log_field(view, weights, sigma):
    """``projected_neighbor_field`` together with elementwise log-probabilities."""
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    s = squared_distances(_projected(view, weights))
    s *= -1.0 / sigma**2
    return _log_softmax_inplace(s)

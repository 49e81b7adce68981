"""Regularized linear CCA for two views (the comparison baseline)."""

from dataclasses import dataclass

import numpy as np

from .data import LinearMap, as_feature_matrix
from .exceptions import DimensionMismatch, RankDeficiency

RANK_TOL = 1e-12


@dataclass(frozen=True)
class CcaResult:
    w1: LinearMap
    w2: LinearMap
    correlations: np.ndarray
    means: tuple = None


def default_ridge(cov):
    return 1e-6 * np.trace(cov) / cov.shape[0]


def _inv_sqrt(cov, ridge, which):
    c = cov + ridge * np.eye(cov.shape[0])
    evals, evecs = np.linalg.eigh(c)
    if evals.min() <= RANK_TOL * max(evals.max(), 1.0):
        raise RankDeficiency(f"covariance of view {which} is singular; use ridge > 0")
    return (evecs / np.sqrt(evals)) @ evecs.T


def cca_fit(view1, view2, n_components=1, ridge=None):
    """Canonical correlation analysis via whitening and an SVD.

    Parameters
    ----------
    view1, view2 : arrays of shape (n, d1) and (n, d2)
    n_components : int
        Number of canonical pairs, at most ``min(d1, d2)``.
    ridge : float or None
        Added to the diagonal of each view's covariance. ``None`` uses
        ``1e-6 * trace(cov) / d`` per view; ``0`` gives plain CCA.

    Returns
    -------
    CcaResult
        Maps to the canonical variates (unit variance) and the canonical
        correlations in non-increasing order.
    """
    x = as_feature_matrix(view1, "view 1")
    y = as_feature_matrix(view2, "view 2")
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"row counts differ: {x.shape[0]} vs {y.shape[0]}")
    if not 1 <= n_components <= min(x.shape[1], y.shape[1]):
        raise DimensionMismatch(
            f"n_components={n_components} must be in [1, {min(x.shape[1], y.shape[1])}]")
    if ridge is not None and ridge < 0:
        raise ValueError("ridge must be >= 0")

    mx, my = x.mean(axis=0), y.mean(axis=0)
    xc, yc = x - mx, y - my
    n = x.shape[0]
    cxx = xc.T @ xc / (n - 1)
    cyy = yc.T @ yc / (n - 1)
    cxy = xc.T @ yc / (n - 1)

    rx = default_ridge(cxx) if ridge is None else ridge
    ry = default_ridge(cyy) if ridge is None else ridge
    kx = _inv_sqrt(cxx, rx, 1)
    ky = _inv_sqrt(cyy, ry, 2)

    u, s, vt = np.linalg.svd(kx @ cxy @ ky)
    k = n_components
    w1 = kx @ u[:, :k]
    w2 = ky @ vt[:k].T
    # sign convention: largest-magnitude loading of each view-1 vector positive
    big = np.argmax(np.abs(w1), axis=0)
    signs = np.sign(w1[big, np.arange(k)])
    signs[signs == 0] = 1.0
    w1, w2 = w1 * signs, w2 * signs
    return CcaResult(LinearMap(w1), LinearMap(w2), np.clip(s[:k], 0.0, 1.0), (mx, my))

"""Comparison measures between two discrete neighbor distributions."""

import numpy as np
from scipy.special import xlogy

from .exceptions import LengthMismatch, ZeroVector

PROB_FLOOR = 1e-12


def _pair(p, q):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise LengthMismatch(f"distributions differ in shape: {p.shape} vs {q.shape}")
    return p, q


def kl_divergence(p, q, floor=PROB_FLOOR):
    """KL divergence ``sum_j p_j log(p_j / max(q_j, floor))``.

    Terms with ``p_j == 0`` contribute nothing. Only ``q`` is clamped, so a
    missed neighbor costs at most ``log(1 / floor)`` per unit of ``p``.
    """
    p, q = _pair(p, q)
    if not floor > 0:
        raise ValueError("floor must be > 0")
    return float(np.sum(xlogy(p, p) - xlogy(p, np.maximum(q, floor))))


def symmetrized_kl(p, q, floor=PROB_FLOOR):
    return 0.5 * (kl_divergence(p, q, floor) + kl_divergence(q, p, floor))


def angle_cosine(p, q):
    p, q = _pair(p, q)
    norm = np.sqrt(np.dot(p, p) * np.dot(q, q))
    if norm == 0.0:
        raise ZeroVector("angle cosine is undefined for an all-zero row")
    return float(np.dot(p, q) / norm)


def sim_inner(p, q):
    """Unnormalized inner product; rewards matching and sparse neighborhoods."""
    p, q = _pair(p, q)
    return float(np.dot(p, q))

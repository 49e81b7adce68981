"""Core data containers shared across the package.

Feature matrices and neighbor fields are plain 2-D float64 numpy arrays
(rows are samples). The containers below freeze their arrays so they can be
shared freely.
"""

from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from .exceptions import (
    DimensionMismatch,
    NonFiniteValue,
    RowCountMismatch,
    TooFewSamples,
)

ROW_SUM_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


def as_feature_matrix(x, name="view"):
    """Return ``x`` as a 2-D float64 array, rejecting NaN/Inf.

    1-D input is treated as a single feature column.
    """
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[1] < 1:
        raise DimensionMismatch(f"{name} has no feature columns")
    if not np.all(np.isfinite(a)):
        raise NonFiniteValue(f"{name} contains NaN or Inf")
    return a


@dataclass(frozen=True)
class MultiViewDataset:
    """Row-aligned views of the same samples."""

    views: tuple

    @property
    def n_samples(self) -> int:
        return self.views[0].shape[0]

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def view_dims(self) -> list:
        return [v.shape[1] for v in self.views]

    def subset(self, rows):
        """Dataset restricted to the given row indices."""
        rows = np.asarray(rows)
        return validate_dataset([v[rows] for v in self.views])


def validate_dataset(views: Sequence) -> MultiViewDataset:
    """Check and freeze a list of paired views.

    The inputs are copied; the caller's arrays are never modified.
    """
    views = list(views)
    if len(views) < 2:
        raise DimensionMismatch(f"need at least 2 views, got {len(views)}")
    mats = [as_feature_matrix(v, name=f"view {i + 1}") for i, v in enumerate(views)]
    counts = [m.shape[0] for m in mats]
    if len(set(counts)) != 1:
        raise RowCountMismatch(f"views have different sample counts: {counts}")
    if counts[0] < 2:
        raise TooFewSamples(f"need at least 2 samples, got {counts[0]}")
    return MultiViewDataset(views=tuple(_frozen(m) for m in mats))


@dataclass(frozen=True)
class LinearMap:
    """Projection ``x -> W^T x`` of one view, stored as a d x k matrix."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim == 1:
            w = w[:, None]
        if w.ndim != 2:
            raise DimensionMismatch(f"weights must be 2-D, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise NonFiniteValue("map weights contain NaN or Inf")
        d, k = w.shape
        if not 1 <= k <= d:
            raise DimensionMismatch(f"subspace dim {k} must be in [1, {d}]")
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def input_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def output_dim(self) -> int:
        return self.weights.shape[1]

    def transform(self, view):
        view = np.asarray(view, dtype=np.float64)
        if view.shape[1] != self.input_dim:
            raise DimensionMismatch(
                f"view has {view.shape[1]} features, map expects {self.input_dim}"
            )
        return view @ self.weights


def check_neighbor_field(probs, atol=ROW_SUM_TOL):
    """Assert that ``probs`` is a valid neighbor field.

    Rows must sum to one within ``atol``, entries lie in [0, 1] and the
    diagonal is exactly zero. Raises ``AssertionError`` otherwise.
    """
    p = np.asarray(probs)
    assert p.ndim == 2 and p.shape[0] == p.shape[1], f"bad shape {p.shape}"
    assert np.all(np.diag(p) == 0.0), "diagonal must be exactly zero"
    assert np.all(p >= 0.0) and np.all(p <= 1.0), "entries outside [0, 1]"
    err = np.max(np.abs(p.sum(axis=1) - 1.0))
    assert err <= atol, f"row sums deviate from 1 by {err:g}"
    return True


@dataclass
class FitConfig:
    """Settings for :func:`nrdep.optimizer.fit`.

    ``subspace_dims`` holds one output dimension per view; a single int is
    broadcast to all views at fit time.
    """

    subspace_dims: Sequence = (1, 1)
    sigma_fraction: float = 0.05
    gamma_multiplier: float = 0.9
    n_rounds: int = 30
    lbfgs_max_iters: int = 100
    lbfgs_memory: int = 10
    grad_tolerance: float = 1e-6
    f_rel_tolerance: float = 1e-9
    carry_curvature: bool = True
    n_restarts: int = 3
    rng_seed: int = 0
    prob_floor: float = 1e-12
    orthonormalize_init: bool = True
    init_median_ratio: float = 16.0
    init_candidates: int = 10
    degenerate_redraws: int = 6
    polish_max_iters: Optional[int] = None

    def __post_init__(self):
        if not self.sigma_fraction > 0:
            raise ValueError("sigma_fraction must be > 0")
        if not 0 < self.gamma_multiplier < 1:
            raise ValueError("gamma_multiplier must lie in (0, 1)")
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        if self.init_candidates < 1:
            raise ValueError("init_candidates must be >= 1")
        if self.degenerate_redraws < 0:
            raise ValueError("degenerate_redraws must be >= 0")
        if not self.init_median_ratio > 0:
            raise ValueError("init_median_ratio must be > 0")
        if not self.f_rel_tolerance >= 0:
            raise ValueError("f_rel_tolerance must be >= 0")
        if not self.prob_floor > 0:
            raise ValueError("prob_floor must be > 0")
        if self.lbfgs_memory < 1:
            raise ValueError("lbfgs_memory must be >= 1")
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be >= 1")
        if isinstance(self.subspace_dims, int):
            self.subspace_dims = (self.subspace_dims,)
        self.subspace_dims = tuple(int(k) for k in self.subspace_dims)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["subspace_dims"] = list(self.subspace_dims)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "FitConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def split_indices(n, fraction=1.0, seed=0):
    """Seeded train/test partition of ``range(n)``; both parts sorted.

    ``fraction=1`` puts every row in the training part.
    """
    if not 0 < fraction <= 1:
        raise ValueError("split fraction must lie in (0, 1]")
    if fraction == 1:
        return np.arange(n), np.arange(0)
    perm = np.random.default_rng(seed).permutation(n)
    n_train = min(max(2, int(round(fraction * n))), n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])

"""Cross-view neighborhood objective, KL penalty and their analytic gradients.

For views ``V`` with projections ``W_V`` the maximized quantity is

    C_total = C - gamma * C_penalty

where ``C`` sums inner products of matching neighbor rows over ordered view
pairs and ``C_penalty`` sums symmetrized KL divergences over the same pairs.

Gradient outline for one view with neighbor field ``P`` built from logits
``s_ij = -D_ij`` and ``D_ij = |W^T (x_i - x_j)|^2 / sigma^2``:

* ``G_ij = dC_total / dP_ij``
* softmax backward: ``A_ij = P_ij (G_ij - sum_k P_ik G_ik)`` is ``dC_total/ds_ij``
* ``dC_total/dW = -(2 / sigma^2) X^T L X W`` with ``L`` the graph Laplacian of
  the symmetric weights ``A + A^T``.

``P * G`` is formed directly so no division by tiny probabilities occurs.
Entries clamped by the KL floor get zero gradient through the clamp.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .data import LinearMap, MultiViewDataset
from .exceptions import DimensionMismatch
from .measures import PROB_FLOOR
from .neighborhood import projected_log_field

GAMMA_ZERO_PENALTY = 1e-15


def _as_weights(m):
    w = m.weights if isinstance(m, LinearMap) else np.asarray(m, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    return w


@dataclass(frozen=True)
class Evaluation:
    sim: float
    penalty: float
    gamma: float
    total: float
    grads: Optional[List[np.ndarray]] = None


class ObjectiveState:
    """Maps, bandwidths and penalty weight for one optimizer run.

    Neighbor fields are cached per view and recomputed only for views whose
    weights changed. Not thread-safe; each run owns its own state.
    """

    def __init__(self, dataset: MultiViewDataset, maps, sigmas, gamma=0.0, prob_floor=PROB_FLOOR):
        if len(maps) != dataset.n_views or len(sigmas) != dataset.n_views:
            raise DimensionMismatch("need one map and one sigma per view")
        self.dataset = dataset
        self.sigmas = tuple(float(s) for s in sigmas)
        self.gamma = float(gamma)
        self.prob_floor = float(prob_floor)
        self._weights = [None] * dataset.n_views
        self._fields = [None] * dataset.n_views
        self._logs = [None] * dataset.n_views
        self.set_maps(maps)

    @property
    def n_views(self):
        return self.dataset.n_views

    @property
    def maps(self):
        return [LinearMap(w) for w in self._weights]

    @property
    def weights(self):
        return list(self._weights)

    @property
    def cached_fields(self):
        return list(self._fields)

    def set_maps(self, maps):
        if len(maps) != self.n_views:
            raise DimensionMismatch("need one map per view")
        for v, m in enumerate(maps):
            self.set_view_weights(v, m)

    def set_view_weights(self, v, m):
        w = _as_weights(m)
        x = self.dataset.views[v]
        if w.shape[0] != x.shape[1]:
            raise DimensionMismatch(
                f"map {v + 1} has {w.shape[0]} rows, view has {x.shape[1]} features"
            )
        old = self._weights[v]
        if old is not None and old.shape == w.shape and np.array_equal(old, w):
            return
        w = np.array(w, dtype=np.float64, copy=True)
        w.setflags(write=False)
        self._weights[v] = w
        self._fields[v], self._logs[v] = projected_log_field(x, w, self.sigmas[v])

    def evaluate(self, gamma=None, need_grad=True, need_penalty=True) -> Evaluation:
        """Objective terms at the current maps.

        ``need_penalty=False`` skips the KL term when ``gamma`` is zero; the
        returned penalty is then NaN.
        """
        gamma = self.gamma if gamma is None else float(gamma)
        return _evaluate(self, gamma, need_grad, need_penalty or gamma != 0.0)


def _evaluate(state, gamma, need_grad, need_penalty):
    fields, logs = state._fields, state._logs
    nv = len(fields)
    floor = state.prob_floor
    pairs = [(v, u) for v in range(nv) for u in range(nv) if u != v]

    sim = 0.0
    for v, u in pairs:
        sim += float(np.vdot(fields[v], fields[u]))

    penalty = float("nan")
    logq = None
    if need_penalty:
        logq = [np.maximum(lp, np.log(floor)) for lp in logs]
        neg_entropy = [float(np.vdot(p, lp)) for p, lp in zip(fields, logs)]
        kl = {(v, u): neg_entropy[v] - float(np.vdot(fields[v], logq[u])) for v, u in pairs}
        penalty = 0.0
        for v, u in pairs:
            penalty += 0.5 * (kl[v, u] + kl[u, v])

    total = sim if gamma == 0.0 else sim - gamma * penalty
    grads = None
    if need_grad:
        grads = [_view_gradient(state, v, gamma, logq) for v in range(nv)]
    return Evaluation(sim=sim, penalty=penalty, gamma=gamma, total=total, grads=grads)


def _view_gradient(state, v, gamma, logq):
    fields, logs = state._fields, state._logs
    nv = len(fields)
    p = fields[v]
    others = [u for u in range(nv) if u != v]

    # pg = p * dC_total/dp / 2 (the factor 2 is restored at the end); the
    # constant from d(p log p)/dp cancels in the softmax backward pass
    half = 0.5 * gamma
    qsum = fields[others[0]]
    for u in others[1:]:
        qsum = qsum + fields[u]
    if gamma == 0.0:
        pg = p * qsum
    else:
        pg = logq[others[0]] - logs[v]
        for u in others[1:]:
            pg += logq[u]
            pg -= logs[v]
        pg *= half
        pg += qsum
        pg *= p
        # d/dp of -q log max(p, floor) is -q/p above the floor and 0 below it
        alive = qsum * (p > state.prob_floor)
        alive *= half
        pg += alive

    # A = pg - p * r is dC_total/dlogits; its rows sum to zero, so the
    # Laplacian of A + A^T contributes colsum(A) * y - A y - A^T y
    x = state.dataset.views[v]
    y = x @ state._weights[v]
    r = pg.sum(axis=1)
    ay = pg @ y - r[:, None] * (p @ y)
    aty = pg.T @ y - p.T @ (r[:, None] * y)
    colsum = pg.sum(axis=0) - p.T @ r
    ly = colsum[:, None] * y - ay - aty
    return -(4.0 / state.sigmas[v] ** 2) * (x.T @ ly)


def objective_sim(state: ObjectiveState) -> float:
    return state.evaluate(gamma=0.0, need_grad=False).sim


def penalty_kl(state: ObjectiveState) -> float:
    return state.evaluate(need_grad=False).penalty


def total_objective(state: ObjectiveState) -> float:
    return state.evaluate(need_grad=False).total


def gradient_total(state: ObjectiveState):
    """Gradients of ``total_objective`` with respect to every view's weights."""
    return state.evaluate(need_grad=True).grads


def init_gamma(state: ObjectiveState) -> float:
    """Penalty weight that balances the two objective terms at the current maps."""
    ev = state.evaluate(need_grad=False)
    if ev.penalty < GAMMA_ZERO_PENALTY:
        return 0.0
    return ev.sim / ev.penalty

"""L-BFGS minimizer and the annealed multi-round fitting driver."""

import logging
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import line_search
from scipy.spatial.distance import pdist

from .data import FitConfig, LinearMap, MultiViewDataset
from .exceptions import DimensionMismatch
from .neighborhood import compute_sigma
from .objective import ObjectiveState, init_gamma

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# Parameter packing
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FlatParams:
    """All view weights in one vector, column-major within each view."""

    vector: np.ndarray
    layout: Tuple[Tuple[int, int, int], ...]


def pack(weights: Sequence[np.ndarray]) -> FlatParams:
    layout = tuple((v, w.shape[0], w.shape[1]) for v, w in enumerate(weights))
    vec = np.concatenate([np.asarray(w, dtype=np.float64).ravel(order="F") for w in weights])
    return FlatParams(vec, layout)


def unpack(vector, layout) -> List[np.ndarray]:
    need = sum(d * k for _, d, k in layout)
    if len(vector) != need:
        raise DimensionMismatch(f"vector has {len(vector)} entries, layout needs {need}")
    out, pos = [], 0
    for _, d, k in layout:
        out.append(np.asarray(vector[pos:pos + d * k]).reshape((d, k), order="F"))
        pos += d * k
    return out


# --------------------------------------------------------------------------
# L-BFGS
# --------------------------------------------------------------------------

@dataclass
class LbfgsResult:
    x: np.ndarray
    f: float
    grad: np.ndarray
    n_iter: int
    converged: bool
    line_search_failed: bool
    f_history: List[float] = field(default_factory=list)
    pairs: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    @property
    def grad_norm(self):
        return float(np.max(np.abs(self.grad))) if self.grad.size else 0.0


def _two_loop(g, s_hist, y_hist):
    q = g.copy()
    rhos = [1.0 / np.dot(y, s) for s, y in zip(s_hist, y_hist)]
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rhos)):
        a = rho * np.dot(s, q)
        q -= a * y
        alphas.append(a)
    s, y = s_hist[-1], y_hist[-1]
    q *= np.dot(s, y) / np.dot(y, y)
    for (s, y, rho), a in zip(zip(s_hist, y_hist, rhos), reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return -q


def _backtrack(f, x, fx, p, slope, c1, max_halvings=60):
    alpha = 1.0
    for _ in range(max_halvings):
        trial = x + alpha * p
        if np.array_equal(trial, x):
            break
        fnew = f(trial)
        if np.isfinite(fnew) and fnew <= fx + c1 * alpha * slope:
            return alpha, fnew
        alpha *= 0.5
    return None, None


def lbfgs_minimize(f, grad, x0, max_iters=100, memory=10, grad_tol=1e-6,
                   c1=1e-4, c2=0.9, f_rel_tol=0.0, init_pairs=()):
    """Minimize ``f`` with limited-memory BFGS.

    Steps come from the two-loop recursion and a strong Wolfe line search;
    if that fails a backtracking Armijo search is tried, first along the
    quasi-Newton direction and then along steepest descent. When every
    search fails the best point so far is returned with
    ``line_search_failed`` set.

    Stops when the gradient infinity-norm drops below ``grad_tol``, when an
    accepted step or the predicted decrease of the next one is at most
    ``f_rel_tol * max(|f|, 1)``, or after ``max_iters`` iterations. Accepted
    function values never increase.

    ``init_pairs`` seeds the curvature memory with ``(s, y)`` pairs from an
    earlier run, e.g. of a slightly different function. The pairs in memory
    at exit are returned in the result.
    """
    if memory < 1:
        raise ValueError("memory must be >= 1")
    x = np.array(x0, dtype=np.float64, copy=True)
    fx = float(f(x))
    g = np.asarray(grad(x), dtype=np.float64)
    history = [fx]
    s_hist, y_hist = deque(maxlen=memory), deque(maxlen=memory)
    for sp, yp in init_pairs:
        s_hist.append(sp)
        y_hist.append(yp)
    failed = False
    n_iter = 0
    converged = bool(np.max(np.abs(g)) < grad_tol) if g.size else True

    while not converged and n_iter < max_iters:
        if s_hist:
            p = _two_loop(g, s_hist, y_hist)
        else:
            p = -g / max(np.linalg.norm(g), 1e-300)
        slope = float(np.dot(g, p))
        if not slope < 0:
            s_hist.clear()
            y_hist.clear()
            p = -g / max(np.linalg.norm(g), 1e-300)
            slope = float(np.dot(g, p))
        if -slope <= f_rel_tol * max(abs(fx), 1.0):
            # predicted decrease is negligible
            converged = True
            break

        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message="The line search algorithm")
            alpha, _, _, fnew, _, _ = line_search(
                f, grad, x, p, gfk=g, old_fval=fx, c1=c1, c2=c2, maxiter=20)
        if alpha is None or fnew is None or not np.isfinite(fnew) or fnew > fx:
            alpha, fnew = _backtrack(f, x, fx, p, slope, c1)
            if alpha is None and s_hist:
                s_hist.clear()
                y_hist.clear()
                p = -g / max(np.linalg.norm(g), 1e-300)
                alpha, fnew = _backtrack(f, x, fx, p, float(np.dot(g, p)), c1)
            if alpha is None:
                failed = True
                break

        step = alpha * p
        x_new = x + step
        g_new = np.asarray(grad(x_new), dtype=np.float64)
        y = g_new - g
        sy = float(np.dot(step, y))
        if sy > 1e-12 * np.linalg.norm(step) * np.linalg.norm(y):
            s_hist.append(step)
            y_hist.append(y)
        stalled = fx - fnew <= f_rel_tol * max(abs(fx), abs(fnew), 1.0)
        x, fx, g = x_new, float(fnew), g_new
        history.append(fx)
        n_iter += 1
        converged = bool(np.max(np.abs(g)) < grad_tol) or (f_rel_tol > 0 and stalled)

    return LbfgsResult(x=x, f=fx, grad=g, n_iter=n_iter, converged=converged,
                       line_search_failed=failed, f_history=history,
                       pairs=list(zip(s_hist, y_hist)))


# --------------------------------------------------------------------------
# Annealed fitting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RoundRecord:
    """Objective terms at the end of one L-BFGS round.

    Round 0 is the initialization; round ``n_rounds + 1`` is the final
    pass with the penalty switched off.
    """

    restart: int
    round: int
    gamma: float
    sim: float
    penalty: float
    total: float
    grad_norm: float
    n_iter: int
    converged: bool
    line_search_failed: bool
    w_norms: Tuple[float, ...]
    f_history: Tuple[float, ...] = ()


@dataclass
class FitResult:
    maps: List[LinearMap]
    final_objective: float
    objective_trace: List[RoundRecord]
    restart_index: int
    converged: bool
    sigmas: List[float]
    gamma_init: float
    restart_objectives: List[float]
    restart_traces: List[List[RoundRecord]]
    n_redrawn: int = 0


def _median_scaled(x, w, sigma, ratio):
    sq = pdist(x @ w, "sqeuclidean")
    med = float(np.median(sq))
    if med > 0:
        w = w * (sigma * np.sqrt(ratio / med))
    return w


def init_maps(dataset, dims, sigmas, rng, orthonormalize=True, median_ratio=16.0):
    """Random starting projections.

    Gaussian entries, optionally orthonormalized, then rescaled so the
    median projected squared distance equals ``median_ratio * sigma**2``.
    Ratios near 1 give almost uniform neighborhoods, from which the KL
    penalty shrinks every map to zero.
    """
    maps = []
    for x, k, s in zip(dataset.views, dims, sigmas):
        w = rng.standard_normal((x.shape[1], k))
        if orthonormalize:
            q, r = np.linalg.qr(w)
            w = q * np.where(np.diag(r) < 0, -1.0, 1.0)
        maps.append(_median_scaled(x, w, s, median_ratio))
    return maps


def best_initial_maps(dataset, dims, sigmas, rng, config):
    """Draw ``config.init_candidates`` starting maps and keep the one with the largest C.

    Random starts whose neighborhoods agree across views no better than
    chance tend to be pulled to the trivial all-uniform point by the penalty.
    """
    best, best_sim = None, -np.inf
    for _ in range(config.init_candidates):
        maps = init_maps(dataset, dims, sigmas, rng, config.orthonormalize_init,
                         config.init_median_ratio)
        sim = ObjectiveState(dataset, maps, sigmas).evaluate(
            gamma=0.0, need_grad=False, need_penalty=False).sim
        if sim > best_sim:
            best, best_sim = maps, sim
    return best


def _resolve_dims(dataset, dims):
    dims = tuple(dims)
    if len(dims) == 1:
        dims = dims * dataset.n_views
    if len(dims) != dataset.n_views:
        raise DimensionMismatch(f"{len(dims)} subspace dims for {dataset.n_views} views")
    for v, (k, d) in enumerate(zip(dims, dataset.view_dims)):
        if not 1 <= k <= d:
            raise DimensionMismatch(f"view {v + 1}: subspace dim {k} not in [1, {d}]")
    return dims


class _Problem:
    """Negated total objective over packed weights, memoizing recent points."""

    def __init__(self, state, layout, gamma):
        self.state = state
        self.layout = layout
        self.gamma = gamma
        self._cache = {}

    def _eval(self, x):
        key = x.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            self.state.set_maps(unpack(x, self.layout))
            ev = self.state.evaluate(gamma=self.gamma, need_grad=True, need_penalty=False)
            hit = (-ev.total, -pack(ev.grads).vector)
            if len(self._cache) >= 8:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = hit
        return hit

    def f(self, x):
        return self._eval(x)[0]

    def grad(self, x):
        return self._eval(x)[1]


def _record(state, restart, rnd, gamma, res=None):
    ev = state.evaluate(gamma=gamma, need_grad=res is None)
    if res is None:
        gnorm = float(max(np.max(np.abs(g)) for g in ev.grads))
    else:
        gnorm = res.grad_norm
    return RoundRecord(
        restart=restart, round=rnd, gamma=gamma, sim=ev.sim, penalty=ev.penalty,
        total=ev.total, grad_norm=gnorm,
        n_iter=0 if res is None else res.n_iter,
        converged=False if res is None else res.converged,
        line_search_failed=False if res is None else res.line_search_failed,
        w_norms=tuple(float(np.linalg.norm(w)) for w in state.weights),
        f_history=() if res is None else tuple(res.f_history),
    )


def _run_round(state, gamma, max_iters, config, pairs=()):
    layout = pack(state.weights).layout
    prob = _Problem(state, layout, gamma)
    res = lbfgs_minimize(prob.f, prob.grad, pack(state.weights).vector,
                         max_iters=max_iters, memory=config.lbfgs_memory,
                         grad_tol=config.grad_tolerance, f_rel_tol=config.f_rel_tolerance,
                         init_pairs=pairs if config.carry_curvature else ())
    state.set_maps(unpack(res.x, layout))
    return res


def fit_from(dataset, maps, sigmas, config, restart=0):
    """Run the annealed rounds and the final penalty-free pass from ``maps``."""
    state = ObjectiveState(dataset, maps, sigmas, prob_floor=config.prob_floor)
    gamma0 = init_gamma(state)
    trace = [_record(state, restart, 0, gamma0)]
    pairs = ()
    for r in range(1, config.n_rounds + 1):
        gamma = gamma0 * config.gamma_multiplier ** r
        res = _run_round(state, gamma, config.lbfgs_max_iters, config, pairs)
        pairs = res.pairs
        rec = _record(state, restart, r, gamma, res)
        trace.append(rec)
        logger.debug("restart %d round %d gamma=%.4g C=%.6g penalty=%.6g iters=%d w_norms=%s",
                     restart, r, gamma, rec.sim, rec.penalty, rec.n_iter,
                     ", ".join(f"{n:.4g}" for n in rec.w_norms))
    polish = config.polish_max_iters or config.lbfgs_max_iters
    res = _run_round(state, 0.0, polish, config, pairs)
    rec = _record(state, restart, config.n_rounds + 1, 0.0, res)
    trace.append(rec)
    logger.info("restart %d done: C=%.6g converged=%s w_norms=%s", restart, rec.sim,
                rec.converged, ", ".join(f"{n:.4g}" for n in rec.w_norms))
    return state, gamma0, trace


DEGENERATE_MARGIN = 0.01


def uniform_sim(n_samples, n_views):
    """Objective value when every neighbor row is uniform over the other points."""
    return n_views * (n_views - 1) * n_samples / (n_samples - 1)


def fit(dataset: MultiViewDataset, config: FitConfig) -> FitResult:
    """Find dependent subspaces for all views.

    Each restart draws fresh initial maps, balances the KL penalty against
    the neighborhood objective, shrinks the penalty weight geometrically
    over ``config.n_rounds`` warm-started L-BFGS rounds and finishes with an
    unpenalized pass. The restart with the highest final objective wins.

    A restart that ends at the trivial all-uniform solution is rerun from a
    fresh draw, using at most ``config.degenerate_redraws`` spare draws in
    total for the whole fit.
    """
    dims = _resolve_dims(dataset, config.subspace_dims)
    sigmas = [compute_sigma(x, config.sigma_fraction) for x in dataset.views]
    seeds = np.random.SeedSequence(config.rng_seed).spawn(
        config.n_restarts + config.degenerate_redraws)
    spare = iter(seeds[config.n_restarts:])
    trivial = uniform_sim(dataset.n_samples, dataset.n_views) * (1 + DEGENERATE_MARGIN)

    finals, traces, weights, gammas = [], [], [], []
    n_redrawn = 0
    for r in range(config.n_restarts):
        ss = seeds[r]
        while True:
            rng = np.random.default_rng(ss)
            maps = best_initial_maps(dataset, dims, sigmas, rng, config)
            state, gamma0, trace = fit_from(dataset, maps, sigmas, config, restart=r)
            if trace[-1].sim > trivial:
                break
            ss = next(spare, None)
            if ss is None:
                break
            n_redrawn += 1
            logger.info("restart %d collapsed to uniform neighborhoods, redrawing", r)
        finals.append(trace[-1].sim)
        traces.append(trace)
        weights.append(state.weights)
        gammas.append(gamma0)

    best = int(np.argmax(finals))
    return FitResult(
        maps=[LinearMap(w) for w in weights[best]],
        final_objective=finals[best],
        objective_trace=traces[best],
        restart_index=best,
        converged=traces[best][-1].converged,
        sigmas=sigmas,
        gamma_init=gammas[best],
        restart_objectives=finals,
        restart_traces=traces,
        n_redrawn=n_redrawn,
    )

import numpy as np
import pytest

from nrdep.data import validate_dataset
from nrdep.exceptions import DimensionMismatch
from nrdep.objective import (
    ObjectiveState,
    gradient_total,
    init_gamma,
    objective_sim,
    penalty_kl,
    total_objective,
)

from conftest import random_problem
from oracles import problem_naive


def central_differences(state, h=1e-5):
    ws = state.weights
    out = []
    for v, w in enumerate(ws):
        g = np.zeros_like(w)
        for idx in np.ndindex(*w.shape):
            vals = []
            for sign in (1, -1):
                wp = w.copy()
                wp[idx] += sign * h
                state.set_view_weights(v, wp)
                vals.append(total_objective(state))
            g[idx] = (vals[0] - vals[1]) / (2 * h)
        state.set_view_weights(v, w)
        out.append(g)
    return out


def test_two_identical_spikes_give_four():
    x = np.array([[0.0], [1.0]])
    st = ObjectiveState(validate_dataset([x, x]), [np.ones((1, 1))] * 2, [0.5, 0.5])
    assert objective_sim(st) == 4.0
    assert penalty_kl(st) == 0.0


def test_identical_views_have_zero_penalty_and_gamma():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((9, 3))
    w = rng.standard_normal((3, 2))
    st = ObjectiveState(validate_dataset([x, x]), [w, w], [1.0, 1.0], gamma=3.0)
    assert penalty_kl(st) == 0.0
    assert total_objective(st) == objective_sim(st)
    assert init_gamma(st) == 0.0


def test_disjoint_neighborhoods_give_zero_sim():
    # view 1 pairs (0,1),(2,3); view 2 pairs (0,2),(1,3); tiny sigma makes spikes
    x1 = np.array([[0.0], [0.1], [10.0], [10.1]])
    x2 = np.array([[0.0], [10.0], [0.1], [10.1]])
    st = ObjectiveState(validate_dataset([x1, x2]), [np.ones((1, 1))] * 2, [0.001, 0.001])
    assert objective_sim(st) == 0.0


@pytest.mark.parametrize("seed", range(10))
def test_against_loop_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(3, 11))
    nv = 2 + seed % 2
    dims = [int(rng.integers(1, 5)) for _ in range(nv)]
    ks = [int(rng.integers(1, d + 1)) for d in dims]
    gamma = float(rng.uniform(0, 2))
    views = [rng.standard_normal((n, d)) for d in dims]
    ws = [rng.standard_normal((d, k)) * 0.5 for d, k in zip(dims, ks)]
    sig = [float(rng.uniform(0.3, 1.5)) for _ in range(nv)]
    st = ObjectiveState(validate_dataset(views), ws, sig, gamma=gamma)
    sim, pen, tot = problem_naive(views, ws, sig, gamma)
    assert objective_sim(st) == pytest.approx(sim, abs=1e-10)
    assert penalty_kl(st) == pytest.approx(pen, abs=1e-10)
    assert total_objective(st) == pytest.approx(tot, abs=1e-10)


def test_total_is_linear_in_gamma():
    st = random_problem(3)
    sim, pen = objective_sim(st), penalty_kl(st)
    for g in (0.0, 0.5, 2.0):
        assert st.evaluate(gamma=g, need_grad=False).total == pytest.approx(sim - g * pen,
                                                                            abs=1e-12)
    assert st.evaluate(gamma=0.0, need_grad=False).total == sim


def test_init_gamma_balances_terms():
    st = random_problem(4)
    st.gamma = init_gamma(st)
    assert st.gamma == pytest.approx(objective_sim(st) / penalty_kl(st))
    assert abs(total_objective(st)) < 1e-10


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("gamma", [0.0, 0.5, 2.0])
def test_gradient_matches_finite_differences(seed, gamma):
    st = random_problem(seed, gamma=gamma)
    analytic = gradient_total(st)
    numeric = central_differences(st)
    for a, n in zip(analytic, numeric):
        mask = np.abs(n) > 1e-8
        rel = np.abs(a - n)[mask] / np.abs(n)[mask]
        assert rel.max(initial=0.0) < 1e-5


def test_gradient_three_views():
    rng = np.random.default_rng(9)
    data = validate_dataset([rng.standard_normal((10, d)) for d in (3, 4, 2)])
    ws = [rng.standard_normal((d, 1)) for d in (3, 4, 2)]
    st = ObjectiveState(data, ws, [1.5, 1.5, 1.5], gamma=0.7)
    for a, n in zip(gradient_total(st), central_differences(st)):
        np.testing.assert_allclose(a, n, rtol=1e-5, atol=1e-8)


def test_symmetric_stationary_point():
    # identical views with mirror-symmetric points: sign flip symmetry keeps
    # the 1-D map stationary when it is the symmetric axis of a square
    x = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
    w = np.array([[1.0], [0.0]])
    st = ObjectiveState(validate_dataset([x, x]), [w, w], [1.0, 1.0])
    for g in gradient_total(st):
        assert np.max(np.abs(g[1])) < 1e-8
    for a, n in zip(gradient_total(st), central_differences(st)):
        np.testing.assert_allclose(a, n, atol=1e-8)


def test_field_cache_tracks_updates():
    st = random_problem(5)
    before = [f.copy() for f in st.cached_fields]
    w = st.weights[0] * 2
    st.set_view_weights(0, w)
    assert not np.allclose(st.cached_fields[0], before[0])
    np.testing.assert_array_equal(st.cached_fields[1], before[1])


def test_state_shape_errors():
    data = validate_dataset([np.eye(3), np.eye(3)])
    with pytest.raises(DimensionMismatch):
        ObjectiveState(data, [np.ones((3, 1))], [1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        ObjectiveState(data, [np.ones((2, 1)), np.ones((3, 1))], [1.0, 1.0])

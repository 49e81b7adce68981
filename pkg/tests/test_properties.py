import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import special_ortho_group

from nrdep.data import check_neighbor_field, validate_dataset
from nrdep.measures import angle_cosine, kl_divergence, sim_inner, symmetrized_kl
from nrdep.neighborhood import compute_sigma, neighbor_field, projected_neighbor_field
from nrdep.objective import ObjectiveState, total_objective

seeds = st.integers(0, 2**32 - 1)


def _dists(rng, n):
    return rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_field_is_valid(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((int(rng.integers(2, 15)), 3)) * rng.uniform(0.01, 100)
    check_neighbor_field(neighbor_field(x, compute_sigma(x)))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_translation_invariance(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((10, 4))
    w = rng.standard_normal((4, 2))
    s = compute_sigma(x)
    shift = rng.uniform(-50, 50, 4)
    diff = projected_neighbor_field(x + shift, w, s) - projected_neighbor_field(x, w, s)
    assert np.max(np.abs(diff)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_joint_rotation_invariance(seed):
    rng = np.random.default_rng(seed)
    xs = [rng.standard_normal((9, 4)) for _ in range(2)]
    ws = [rng.standard_normal((4, 2)) for _ in range(2)]
    sig = [compute_sigma(x) for x in xs]
    g = float(rng.uniform(0, 2))
    base = total_objective(ObjectiveState(validate_dataset(xs), ws, sig, gamma=g))
    rs = [special_ortho_group.rvs(4, random_state=rng) for _ in range(2)]
    if rng.random() < 0.5:
        rs[0][:, 0] *= -1  # include a mirror
    xr = [x @ r.T for x, r in zip(xs, rs)]
    wr = [r @ w for r, w in zip(rs, ws)]
    rot = total_objective(ObjectiveState(validate_dataset(xr), wr, sig, gamma=g))
    assert abs(rot - base) < 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_subspace_rotation_invariance(seed):
    rng = np.random.default_rng(seed)
    xs = [rng.standard_normal((9, 4)) for _ in range(2)]
    ws = [rng.standard_normal((4, 2)) for _ in range(2)]
    sig = [compute_sigma(x) for x in xs]
    g = float(rng.uniform(0, 2))
    data = validate_dataset(xs)
    base = total_objective(ObjectiveState(data, ws, sig, gamma=g))
    q = [np.linalg.qr(rng.standard_normal((2, 2)))[0] for _ in range(2)]
    rot = total_objective(ObjectiveState(data, [w @ qq for w, qq in zip(ws, q)], sig, gamma=g))
    assert abs(rot - base) < 1e-10


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 12))
def test_measure_identities(seed, n):
    rng = np.random.default_rng(seed)
    p, q = _dists(rng, n)
    assert abs(sim_inner(p, p) - np.sum(p**2)) < 1e-15
    assert sim_inner(p, p) < 1.0
    assert abs(angle_cosine(p, p) - 1.0) < 1e-12
    assert symmetrized_kl(p, p) == 0.0
    assert abs(sim_inner(p, q) - sim_inner(q, p)) < 1e-15
    assert abs(symmetrized_kl(p, q) - symmetrized_kl(q, p)) < 1e-12
    assert kl_divergence(p, q) >= 0.0
    assert 0.0 <= angle_cosine(p, q) <= 1.0 + 1e-15


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(4, 30))
def test_single_spike_and_disjoint(seed, n):
    rng = np.random.default_rng(seed)
    j = int(rng.integers(n))
    spike = np.zeros(n)
    spike[j] = 1.0
    assert sim_inner(spike, spike) == 1.0
    cut = int(rng.integers(1, n))
    a = np.zeros(n)
    a[:cut] = rng.dirichlet(np.ones(cut))
    b = np.zeros(n)
    b[cut:] = rng.dirichlet(np.ones(n - cut))
    assert sim_inner(a, b) == 0.0 and angle_cosine(a, b) == 0.0


@settings(max_examples=80, deadline=None)
@given(seeds, st.integers(2, 40))
def test_block_uniform_count_formula(seed, n):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, n + 1))
    l = int(rng.integers(1, n + 1))
    sp = rng.choice(n, k, replace=False)
    sq = rng.choice(n, l, replace=False)
    m = len(set(sp.tolist()) & set(sq.tolist()))
    p = np.zeros(n)
    p[sp] = 1.0 / k
    q = np.zeros(n)
    q[sq] = 1.0 / l
    assert abs(sim_inner(p, q) - m / (k * l)) < 1e-15

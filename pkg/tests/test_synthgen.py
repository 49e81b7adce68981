import numpy as np
import pytest

from nrdep.exceptions import ZeroVector
from nrdep.synthgen import SyntheticSpec, correspondence_score, generate


@pytest.fixture(scope="module")
def synth():
    return generate(SyntheticSpec(rng_seed=5))


def test_shapes(synth):
    assert [v.shape for v in synth.dataset.views] == [(1000, 5), (1000, 5)]
    np.testing.assert_array_equal(synth.ground_truth, np.eye(5))


def test_pairs_are_decorrelated(synth):
    x1, x2 = synth.dataset.views
    for i in range(5):
        assert abs(np.corrcoef(x1[:, i], x2[:, i])[0, 1]) < 1e-8


def test_shared_perturbation_hook(synth):
    it = synth.internals
    for i in range(5):
        lab = it["labels"][i]
        f = it["flips"][i][lab]
        resid = it["x_hat"][i] - f * it["means"][i][:, lab]
        np.testing.assert_allclose(resid[0], resid[1], atol=1e-12)
        np.testing.assert_allclose(resid[0], it["eps"][i], atol=1e-12)
        assert np.all(np.abs(resid[0]) <= 0.5)


def test_groups_are_tight_in_both_views(synth):
    x1, x2 = synth.dataset.views
    lab = synth.internals["labels"][0]
    for x in (x1, x2):
        within = np.mean([np.std(x[lab == g, 0]) for g in range(20)])
        assert within < 0.5 * np.std(x[:, 0])


def test_deterministic():
    a = generate(SyntheticSpec(rng_seed=1, n_groups_per_dim=4, group_size=5))
    b = generate(SyntheticSpec(rng_seed=1, n_groups_per_dim=4, group_size=5))
    for u, v in zip(a.dataset.views, b.dataset.views):
        assert u.tobytes() == v.tobytes()
    c = generate(SyntheticSpec(rng_seed=2, n_groups_per_dim=4, group_size=5))
    assert not np.array_equal(a.dataset.views[0], c.dataset.views[0])


def test_score_examples():
    e5 = np.eye(5)[4]
    assert correspondence_score(e5, e5) == 1.0
    assert correspondence_score(-3 * e5, 0.1 * e5) == pytest.approx(1.0, abs=1e-15)
    u = np.ones(5) / np.sqrt(5)
    assert correspondence_score(u, u) == pytest.approx(1 / np.sqrt(5), abs=1e-15)
    for i in range(5):
        assert correspondence_score(np.eye(5)[i], np.eye(5)[i]) == 1.0


def test_score_bounds_and_zero():
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert correspondence_score(rng.standard_normal(5), rng.standard_normal(5)) <= 1.0
    with pytest.raises(ZeroVector):
        correspondence_score(np.zeros(5), np.ones(5))

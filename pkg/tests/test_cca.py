import numpy as np
import pytest

from nrdep.cca import cca_fit
from nrdep.exceptions import DimensionMismatch, RankDeficiency

from oracles import cca_generalized_eig


def test_exact_linear_dependence():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((200, 3))
    a = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    res = cca_fit(x, x @ a, n_components=1, ridge=0.0)
    assert res.correlations[0] == pytest.approx(1.0, abs=1e-8)


def test_independent_noise_is_uncorrelated():
    rng = np.random.default_rng(1)
    res = cca_fit(rng.standard_normal((2000, 2)), rng.standard_normal((2000, 2)),
                  n_components=2, ridge=0.0)
    assert np.all(res.correlations < 0.1)


@pytest.mark.parametrize("seed", range(5))
def test_matches_dense_generalized_eigensolver(seed):
    rng = np.random.default_rng(10 + seed)
    x = rng.standard_normal((50, 3))
    y = x @ rng.standard_normal((3, 3)) + rng.standard_normal((50, 3))
    res = cca_fit(x, y, n_components=3, ridge=0.0)
    rho, a, b = cca_generalized_eig(x, y, (0.0, 0.0))
    assert res.correlations[0] == pytest.approx(rho, abs=1e-8)
    w1 = res.w1.weights[:, 0]
    assert abs(np.dot(w1, a)) / (np.linalg.norm(w1) * np.linalg.norm(a)) == pytest.approx(
        1.0, abs=1e-8)
    assert np.all(np.diff(res.correlations) <= 1e-12)


def test_variates_are_unit_variance_and_correlated_as_reported():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((300, 4))
    y = x[:, :2] + 0.5 * rng.standard_normal((300, 2))
    res = cca_fit(x, y, n_components=2, ridge=0.0)
    u = res.w1.transform(x - x.mean(0))
    v = res.w2.transform(y - y.mean(0))
    np.testing.assert_allclose(np.var(u, axis=0, ddof=1), 1.0, atol=1e-10)
    for j in range(2):
        assert np.corrcoef(u[:, j], v[:, j])[0, 1] == pytest.approx(res.correlations[j],
                                                                    abs=1e-10)


def test_rank_deficiency_and_ridge():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((30, 2))
    x = np.hstack([x, x[:, :1]])
    y = rng.standard_normal((30, 2))
    with pytest.raises(RankDeficiency):
        cca_fit(x, y, ridge=0.0)
    assert np.isfinite(cca_fit(x, y, ridge=1e-3).correlations).all()


def test_bad_arguments():
    with pytest.raises(DimensionMismatch):
        cca_fit(np.ones((5, 2)), np.ones((4, 2)))
    with pytest.raises(DimensionMismatch):
        cca_fit(np.eye(4)[:, :2], np.eye(4)[:, :2], n_components=3)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

from skewnormal.diagnostics import sample_mardia
from skewnormal.dist import moments
from skewnormal.errors import DomainError
from skewnormal.param import DpParams
from skewnormal.sample import (
    SeededStream,
    SkewSpec,
    rvs_skew_elliptical,
    rvs_sn,
    rvs_sn_chunked,
    skew_elliptical_logpdf,
)
from skewnormal.transform import mahalanobis

from .conftest import random_dp

R04 = np.array([[1.0, 0.4], [0.4, 1.0]])


def test_determinism(dp2):
    a = rvs_sn(dp2, 1000, SeededStream(42, 3))
    b = rvs_sn(dp2, 1000, SeededStream(42, 3))
    c = rvs_sn(dp2, 1000, SeededStream(42, 4))
    assert_array_equal(a, b)
    assert not np.array_equal(a, c)


@given(st.integers(1, 500), st.integers(1, 8), st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_chunked_independent_of_workers(n, chunks, workers):
    dp = DpParams(np.zeros(2), R04, [3.0, -1.0])
    a = rvs_sn_chunked(dp, n, 17, chunks, max_workers=1)
    b = rvs_sn_chunked(dp, n, 17, chunks, max_workers=workers)
    assert a.shape == (n, 2)
    assert_array_equal(a, b)


def test_chunked_canonical_order(dp2):
    out = rvs_sn_chunked(dp2, 10, 5, 3)
    parts = [rvs_sn(dp2, m, SeededStream(5, i)) for i, m in enumerate([4, 3, 3])]
    assert_array_equal(out, np.concatenate(parts))


def test_zero_shape_is_normal():
    dp = DpParams(np.zeros(2), R04, [0.0, 0.0])
    b1, b2 = sample_mardia(rvs_sn(dp, 10**5, np.random.default_rng(1)))
    assert abs(b1) < 0.05 and abs(b2) < 0.1


def test_alpha5_mean():
    n = 10**5
    y = rvs_sn(DpParams.univariate(0.0, 1.0, 5.0), n, np.random.default_rng(2))
    assert abs(y.mean() - 0.7823902) < 3 * np.sqrt(0.3878656 / n)


def test_mahalanobis_chi2(dp2):
    d = mahalanobis(dp2, rvs_sn(dp2, 10**5, np.random.default_rng(3)))
    assert stats.kstest(d, stats.chi2(2).cdf).pvalue > 0.01


@pytest.mark.parametrize("seed", range(20))
def test_moments_within_mc_error(seed):
    rng = np.random.default_rng(1000 + seed)
    dp = random_dp(rng, int(rng.integers(1, 4)))
    n = 20000
    y = rvs_sn(dp, n, rng)
    m = moments(dp)
    se = np.sqrt(np.diag(m.variance) / n)
    assert np.all(np.abs(y.mean(axis=0) - m.mean) < 4 * se)
    # MC error of a sample covariance entry is about sqrt(var_i var_j / n) times a kurtosis factor
    sd = np.sqrt(np.diag(m.variance))
    assert np.all(np.abs(np.cov(y.T).reshape(dp.k, dp.k) - m.variance)
                  < 4 * 1.5 * np.outer(sd, sd) / np.sqrt(n))


def test_invalid_inputs(dp2):
    with pytest.raises(DomainError):
        rvs_sn(dp2, 0, 1)
    with pytest.raises(DomainError):
        SeededStream(-1)
    with pytest.raises(DomainError):
        SkewSpec([1.0], base="t")


def test_skew_elliptical_matches_sn():
    n = 10**5
    alpha = np.array([2.0, -1.0])
    a = rvs_skew_elliptical(SkewSpec(alpha), n, SeededStream(8, 0))
    b = rvs_sn(DpParams(np.zeros(2), np.eye(2), alpha), n, SeededStream(8, 1))
    for j in range(2):
        assert stats.ks_2samp(a[:, j], b[:, j]).pvalue > 0.01


def test_zero_direction_is_base():
    y = rvs_skew_elliptical(SkewSpec([0.0, 0.0], base="t", df=5.0), 10**5, SeededStream(9))
    assert stats.kstest(y[:, 0], stats.t(5).cdf).pvalue > 0.01


def test_logpdf_normal_base_equals_sn():
    from skewnormal.dist import logpdf

    spec = SkewSpec([2.0, 1.0], scatter=R04)
    y = np.random.default_rng(0).normal(size=(10, 2))
    dp = DpParams(np.zeros(2), R04, [2.0, 1.0])
    assert_allclose(skew_elliptical_logpdf(spec, y), logpdf(dp, y), rtol=1e-12)


def test_skew_t_histogram_goodness_of_fit():
    spec = SkewSpec([2.0, 0.0], base="t", df=5.0)
    n = 10**5
    y = rvs_skew_elliptical(spec, n, SeededStream(21))
    edges = np.linspace(-3, 3, 9)
    counts, _, _ = np.histogram2d(y[:, 0], y[:, 1], bins=[edges, edges])
    # cell probabilities by a fine midpoint rule
    sub = 40
    h = (edges[1] - edges[0]) / sub
    g = np.arange(edges[0] + h / 2, edges[-1], h)
    X, Y = np.meshgrid(g, g, indexing="ij")
    dens = np.exp(skew_elliptical_logpdf(spec, np.column_stack([X.ravel(), Y.ravel()])))
    cell = dens.reshape(8, sub, 8, sub).sum(axis=(1, 3)) * h * h
    obs = np.append(counts.ravel(), n - counts.sum())
    exp = np.append(cell.ravel(), 1 - cell.sum()) * n
    keep = exp > 5
    chi2 = np.sum((obs[keep] - exp[keep]) ** 2 / exp[keep])
    assert stats.chi2(keep.sum() - 1).sf(chi2) > 0.01

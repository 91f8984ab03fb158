import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats

from skewnormal.discrim import (
    TABLE1_HEADER,
    DiscrimModel,
    Table1Config,
    classify_fisher,
    classify_likelihood,
    confusion_matrix,
    fisher_coefficients,
    geometry,
    likelihood_scores,
    linearity_conditions,
    misclassification_exact_fisher,
    misclassification_mc,
    table1_geometry,
    table1_sweep,
    train,
)
from skewnormal.errors import DimensionError, GroupCountError
from skewnormal.param import DpParams
from skewnormal.sample import SeededStream, rvs_sn

R04 = np.array([[1.0, 0.4], [0.4, 1.0]])
CFG = Table1Config()


def probe(n=10**5, seed=0, scale=3.0):
    return np.random.default_rng(seed).normal(scale=scale, size=(n, 2))


def test_model_validation():
    with pytest.raises(ValueError):
        DiscrimModel([[0.0, 0.0], [1.0, 1.0]], R04, [1.0, 1.0], [0.7, 0.7])
    m = DiscrimModel([[0.0, 0.0], [1.0, 1.0]], R04, [1.0, 1.0])
    assert_allclose(m.priors, [0.5, 0.5])
    back = DiscrimModel.from_dict(m.to_dict())
    assert_allclose(back.locations, m.locations)
    with pytest.raises(DimensionError):
        classify_likelihood(m, np.zeros((4, 3)))


def test_zero_shape_rules_are_lda():
    m = DiscrimModel([[0.0, 0.0], [1.0, 0.5], [-1.0, 2.0]], R04, [0.0, 0.0], [0.2, 0.5, 0.3])
    y = probe(20000)
    a, b = classify_likelihood(m, y), classify_fisher(m, y)
    assert np.array_equal(a, b)


def test_zero_shape_exact_error():
    d = np.array([0.6, -0.3])
    m = DiscrimModel([np.zeros(2), d], R04, [0.0, 0.0])
    delta = np.sqrt(d @ np.linalg.solve(R04, d))
    assert_allclose(misclassification_exact_fisher(m), [stats.norm.cdf(-delta / 2)] * 2, atol=1e-8)


def test_tie_goes_to_first_group():
    m = DiscrimModel([[0.0, 0.0], [0.0, 0.0]], R04, [1.0, 2.0])
    assert classify_likelihood(m, [0.3, -0.1]) == 0
    assert classify_fisher(m, [0.3, -0.1]) == 0


def test_tie_on_constructed_boundary():
    # zero shape and locations +-e1: the boundary is the line y1 = 0
    m = DiscrimModel([[1.0, 0.0], [-1.0, 0.0]], np.eye(2), [0.0, 0.0])
    s = likelihood_scores(m, [0.0, 0.7])
    assert s[0, 0] == s[0, 1]
    assert classify_likelihood(m, [0.0, 0.7]) == 0


def test_orthogonal_geometry_rules_coincide():
    m = table1_geometry(CFG, 8)
    lc = linearity_conditions(m)
    assert lc.eq19
    y = probe()
    assert np.array_equal(classify_likelihood(m, y), classify_fisher(m, y))


def test_proportional_geometry_parallel_boundaries():
    m = table1_geometry(CFG, 0)
    lc = linearity_conditions(m)
    assert lc.eq20 and lc.c is not None and lc.c != 0
    # the likelihood boundary is a level set of d' Omega^{-1} y, so its
    # normal is parallel to the Fisher direction
    W, _ = fisher_coefficients(m)
    a = W[:, 0] - W[:, 1]
    n_lik = np.linalg.solve(m.Omega, m.locations[0] - m.locations[1])
    cross = a[0] * n_lik[1] - a[1] * n_lik[0]
    assert abs(cross) < 1e-10 * np.linalg.norm(a) * np.linalg.norm(n_lik)
    # and along that normal the likelihood score difference is monotone
    t = np.linspace(-5, 5, 201)
    pts = np.outer(t, n_lik / np.linalg.norm(n_lik))
    s = likelihood_scores(m, pts)
    assert np.all(np.diff(s[:, 0] - s[:, 1]) > 0) or np.all(np.diff(s[:, 0] - s[:, 1]) < 0)


def test_linearity_conditions_zero_shape():
    lc = linearity_conditions(DiscrimModel([[0.0, 0.0], [1.0, 0.0]], R04, [0.0, 0.0]))
    assert lc.eq19 and not lc.eq20 and lc.c is None


def test_group_count_errors():
    m = DiscrimModel([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], R04, [1.0, 1.0])
    for f in (linearity_conditions, geometry, misclassification_exact_fisher):
        with pytest.raises(GroupCountError):
            f(m)


def test_exact_fisher_against_mc():
    for j in (0, 4, 8, 12, 16):
        m = table1_geometry(CFG, j)
        exact = misclassification_exact_fisher(m)
        mc = misclassification_mc(m, 10**5, 40 + j, rule="fisher")
        assert np.all(np.abs(mc.errors["fisher"] - exact) < 3 * mc.se["fisher"])


def test_mc_zero_shape_rules_agree():
    m = DiscrimModel([[0.0, 0.0], [0.8, 0.4]], R04, [0.0, 0.0])
    mc = misclassification_mc(m, 20000, 3)
    assert_allclose(mc.errors["likelihood"], mc.errors["fisher"])
    assert mc.agreement == 1.0


def test_mc_deterministic():
    m = table1_geometry(CFG, 3)
    a, b = misclassification_mc(m, 5000, 9), misclassification_mc(m, 5000, 9)
    assert_allclose(a.errors["likelihood"], b.errors["likelihood"], rtol=0)
    assert a.agreement == b.agreement


def test_geometry_cosines_in_range():
    for j in range(17):
        g = geometry(table1_geometry(CFG, j))
        assert -1 <= g.cos_theta1 <= 1 and -1 <= g.cos_theta2 <= 1


@pytest.fixture(scope="module")
def sweep():
    return table1_sweep(Table1Config(n_rep=20000))


def test_sweep_shape_and_mirror(sweep):
    assert len(sweep) == 17 and len(TABLE1_HEADER) == 7
    first, last = sweep[0], sweep[-1]
    assert_allclose([first.p1F, first.p2F], [last.p2F, last.p1F], atol=1e-8)
    assert_allclose(first.cos_theta1, -last.cos_theta1)
    mid = sweep[8]
    assert mid.pstar == 1.0
    assert_allclose([mid.p1F, mid.p2F], 0.2593, atol=5e-4)


def test_likelihood_rule_dominates(sweep):
    n = 20000
    for r in sweep:
        lik, fis = r.p1L + r.p2L, r.p1F + r.p2F
        se = np.sqrt((r.p1L * (1 - r.p1L) + r.p2L * (1 - r.p2L)) / n)
        assert lik <= fis + 2 * se


def test_prior_monotonicity():
    y = probe(20000, seed=5)
    base = table1_geometry(CFG, 5)
    prev = None
    for p in (0.2, 0.4, 0.5, 0.6, 0.8):
        m = DiscrimModel(base.locations, base.Omega, base.alpha, [p, 1 - p])
        for rule in (classify_likelihood, classify_fisher):
            in1 = rule(m, y) == 0
            if prev is not None and rule in prev:
                assert np.all(in1[prev[rule]])
        prev = {classify_likelihood: classify_likelihood(m, y) == 0,
                classify_fisher: classify_fisher(m, y) == 0}


def _two_groups(n, sep, seed):
    dp = DpParams(np.zeros(2), R04, [3.0, 3.0])
    a = rvs_sn(dp, n, SeededStream(seed, 0))
    b = rvs_sn(dp, n, SeededStream(seed, 1)) + sep
    return np.r_[a, b], np.array(["a"] * n + ["b"] * n)


def test_train_two_groups():
    sep = np.array([2.5, -1.0])
    y, lab = _two_groups(300, sep, 7)
    model, res, groups = train(y, lab)
    assert groups == ["a", "b"]
    assert_allclose(model.priors, [0.5, 0.5])
    truth = DiscrimModel([np.zeros(2), sep], R04, [3.0, 3.0])
    exact = misclassification_exact_fisher(truth).mean()
    pred = classify_likelihood(model, y)
    err = np.mean(pred != (lab == "b"))
    assert err < exact + 3 * np.sqrt(exact * (1 - exact) / y.shape[0])


def test_train_single_group():
    y = np.random.default_rng(0).normal(size=(20, 2))
    with pytest.raises(GroupCountError):
        train(y, np.zeros(20))


def test_train_four_groups_confusion():
    rng = np.random.default_rng(8)
    sizes = [60, 45, 70, 43]
    dp = DpParams(np.zeros(3), np.array([[1.0, 0.3, 0.1], [0.3, 1.0, 0.2], [0.1, 0.2, 1.0]]),
                  [2.0, -1.0, 3.0])
    y = np.concatenate([rvs_sn(dp, m, rng) + 1.5 * rng.normal(size=3) for m in sizes])
    lab = np.repeat(np.arange(4), sizes)
    model, _, groups = train(y, lab)
    C = confusion_matrix(lab, classify_likelihood(model, y), 4)
    assert C.shape == (4, 4) and C.sum() == sum(sizes)
    assert list(C.sum(axis=0)) == sizes


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_likelihood_scores_consistent(seed):
    rng = np.random.default_rng(seed)
    m = DiscrimModel(rng.normal(size=(3, 2)), R04, rng.normal(scale=3, size=2), [0.2, 0.3, 0.5])
    y = rng.normal(size=(50, 2))
    assert np.array_equal(classify_likelihood(m, y), np.argmax(likelihood_scores(m, y), axis=1))

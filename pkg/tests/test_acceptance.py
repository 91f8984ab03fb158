"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
(and to stdout, visible with ``-s``).
"""

import time

import numpy as np
from scipy import stats

from skewnormal.dist import mardia_indices
from skewnormal.fit_mv import MvRegressionData, fit_mv, profile_grad, profile_loglik
from skewnormal.fit_uv import (
    RegressionData,
    cp_to_dp_theta,
    em,
    fit,
    fit_shape,
    grad_cp,
    hess_cp,
    loglik_cp,
    mom_init,
)
from skewnormal.param import (
    GAMMA1_MAX,
    DpParams,
    delta_to_alpha,
    dp_to_cp_uv,
    dp_to_lambdapsi,
    cp_to_dp_uv,
    lambdapsi_to_dp,
)
from skewnormal.discrim import Table1Config, table1_sweep
from skewnormal.sample import SeededStream, SkewSpec, rvs_skew_elliptical, rvs_sn
from skewnormal.transform import conditional_exact, conditional_sn_approx, independent_blocks, marginal

from .conftest import ACCEPTANCE, random_correlation, random_dp

# published two-group table: p1L p1F p2L p2F p* cos1 cos2
TABLE1 = np.array([
    [0.35, 0.23, 0.10, 0.28, 0.84, 1.000, 1.000],
    [0.35, 0.23, 0.11, 0.28, 0.85, 0.907, 0.981],
    [0.34, 0.23, 0.13, 0.27, 0.87, 0.719, 0.924],
    [0.31, 0.23, 0.16, 0.26, 0.89, 0.530, 0.831],
    [0.29, 0.24, 0.19, 0.26, 0.91, 0.394, 0.707],
    [0.27, 0.25, 0.21, 0.26, 0.92, 0.275, 0.556],
    [0.26, 0.26, 0.24, 0.26, 0.94, 0.175, 0.383],
    [0.26, 0.26, 0.25, 0.26, 0.96, 0.085, 0.195],
    [0.26, 0.26, 0.26, 0.26, 1.00, 0.000, 0.000],
    [0.25, 0.26, 0.26, 0.26, 0.96, -0.085, -0.195],
    [0.24, 0.26, 0.26, 0.26, 0.94, -0.175, -0.383],
    [0.21, 0.26, 0.27, 0.25, 0.92, -0.275, -0.556],
    [0.19, 0.26, 0.29, 0.24, 0.91, -0.394, -0.707],
    [0.16, 0.26, 0.31, 0.23, 0.89, -0.530, -0.831],
    [0.13, 0.27, 0.33, 0.23, 0.87, -0.719, -0.924],
    [0.10, 0.28, 0.35, 0.23, 0.85, -0.907, -0.981],
    [0.10, 0.28, 0.35, 0.23, 0.84, -1.000, -1.000],
])


def record(key, passed, detail):
    ACCEPTANCE[key] = (bool(passed), detail)
    print(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")
    assert passed, detail


def test_criterion_01_table1():
    t0 = time.perf_counter()
    rows = np.array([r.as_tuple() for r in table1_sweep(Table1Config(n_rep=100_000, seed=1))])
    elapsed = time.perf_counter() - t0
    fisher = np.abs(rows[:, [1, 3]] - TABLE1[:, [1, 3]])
    mc = np.abs(rows[:, [0, 2, 4]] - TABLE1[:, [0, 2, 4]])
    bad_f = sorted({int(i) + 1 for i in np.nonzero(fisher > 0.005)[0]})
    bad_mc = sorted({int(i) + 1 for i in np.nonzero(mc > 0.01)[0]})
    detail = (f"max |Fisher dev| {fisher.max():.4f} (tol 0.005, rows off: {bad_f or 'none'}); "
              f"max |likelihood/p* dev| {mc.max():.4f} (tol 0.01, rows off: {bad_mc or 'none'}); "
              f"{elapsed:.1f} s")
    record(1, not bad_f and not bad_mc and elapsed < 300, detail)


def test_criterion_02_mardia_suprema():
    g1, g2 = mardia_indices(1e10)
    ok = round(g1, 3) == round(0.9906, 3) and round(g2, 3) == round(0.8692, 3)
    ok = ok and round(GAMMA1_MAX, 5) == 0.99527
    record(2, ok, f"gamma1 sup {g1:.5f}, gamma2 sup {g2:.5f}, gamma1 max {GAMMA1_MAX:.6f}")


def test_criterion_03_quadratic_form():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    pvals = []
    for i in range(10):
        k = int(rng.integers(1, 6))
        ob = random_correlation(rng, k)
        dp = DpParams(np.zeros(k), ob, rng.normal(scale=4, size=k))
        z = rvs_sn(dp, 10**5, SeededStream(30, i))
        q = np.einsum("ij,ij->i", z, np.linalg.solve(ob, z.T).T)
        pvals.append(stats.kstest(q, stats.chi2(k).cdf).pvalue)
    elapsed = time.perf_counter() - t0
    record(3, min(pvals) > 0.01 and elapsed < 30,
           f"min KS p-value {min(pvals):.3f} over 10 laws; {elapsed:.1f} s")


def _fd(f, x, h):
    out = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h * max(1.0, abs(x[i]))
        out.append((f(x + e) - f(x - e)) / (2 * e[i]))
    return np.array(out)


def test_criterion_04_gradient_hessian():
    rng = np.random.default_rng(4)
    n = 150
    X = np.column_stack([np.ones(n), rng.normal(size=n)])
    y = rvs_sn(DpParams.univariate(0.0, 1.0, 5.0), n, SeededStream(40))[:, 0] + X @ [1.0, 2.0]
    data = RegressionData(y, X)
    g_err = h_err = 0.0
    for _ in range(50):
        th = np.r_[rng.normal(size=2), np.exp(rng.normal(scale=0.3)),
                   rng.uniform(-0.95, 0.95) * GAMMA1_MAX]
        g = grad_cp(th, data)
        gfd = _fd(lambda t: loglik_cp(t, data), th, 1e-5)
        g_err = max(g_err, np.max(np.abs(g - gfd) / np.maximum(np.abs(g), np.abs(g).max())))
        H = hess_cp(th, data)
        Hfd = np.array([_fd(lambda t: grad_cp(t, data)[i], th, 1e-5) for i in range(th.size)])
        h_err = max(h_err, np.max(np.abs(H - Hfd)) / np.abs(H).max())
    mv_err = 0.0
    for s in range(50):
        r = np.random.default_rng(400 + s)
        k = int(r.integers(1, 4))
        Xm = np.column_stack([np.ones(60), r.normal(size=60)])
        dpm = DpParams(np.zeros(k), random_correlation(r, k), r.normal(scale=3, size=k))
        dm = MvRegressionData(rvs_sn(dpm, 60, SeededStream(41, s)), Xm)
        beta, eta = r.normal(scale=0.3, size=(2, k)), r.normal(scale=1.5, size=k)
        theta = np.r_[beta.ravel(), eta]
        f = lambda t: profile_loglik(t[:-k].reshape(2, k), t[-k:], dm)
        fd = np.array([(f(theta + h) - f(theta - h)) / 2e-6 for h in 1e-6 * np.eye(theta.size)])
        gb, ge = profile_grad(beta, eta, dm)
        gm = np.r_[gb.ravel(), ge]
        mv_err = max(mv_err, np.max(np.abs(gm - fd)) / np.abs(gm).max())
    record(4, g_err < 1e-6 and h_err < 1e-4 and mv_err < 1e-6,
           f"CP gradient rel err {g_err:.1e}, Hessian {h_err:.1e}, "
           f"profile gradient {mv_err:.1e} at 50 points each")


def test_criterion_05_round_trips():
    rng = np.random.default_rng(5)
    err = 0.0
    for _ in range(100):
        dp = random_dp(rng, int(rng.integers(1, 6)))
        sh = lambdapsi_to_dp(dp_to_lambdapsi(dp.shape))
        err = max(err, np.max(np.abs(sh.alpha - dp.alpha)) / max(1.0, np.abs(dp.alpha).max()),
                  np.max(np.abs(sh.omega_bar - dp.omega_bar)))
        a = delta_to_alpha(dp.delta, dp.omega_bar)
        err = max(err, np.max(np.abs(a - dp.alpha)) / max(1.0, np.abs(dp.alpha).max()))
        uv = DpParams.univariate(dp.xi[0], dp.omega[0], dp.alpha[0])
        back = cp_to_dp_uv(dp_to_cp_uv(uv))
        err = max(err, abs(back.alpha[0] - uv.alpha[0]) / max(1.0, abs(uv.alpha[0])),
                  abs(back.omega[0] - uv.omega[0]) / uv.omega[0], abs(back.xi[0] - uv.xi[0]))
    record(5, err < 1e-10, f"max round-trip error {err:.1e} over 100 parameter sets")


def test_criterion_06_conditional_approximation():
    rng = np.random.default_rng(6)
    err, n_feasible = 0.0, 0
    for _ in range(200):
        dp = random_dp(rng, int(rng.integers(2, 5)))
        law = conditional_exact(dp, [0], [dp.xi[0] + rng.normal(scale=2) * dp.omega[0]])
        ap = conditional_sn_approx(law)
        if ap.feasible:
            n_feasible += 1
            err = max(err, float(np.max(ap.matched_cumulant_error)))
    # independence: Y3 unskewed and unlinked to (Y1, Y2)
    Om = np.array([[1.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 1.0]])
    ap = conditional_sn_approx(conditional_exact(DpParams(np.zeros(3), Om, [2.0, 1.5, 0.0]), [0], [0.8]))
    indep = independent_blocks(ap.dp.shape, np.eye(2), [[0], [1]]).independent
    indep_err = max(abs(ap.dp.Omega[0, 1]), abs(ap.dp.alpha[1]))
    # marginalise then condition equals condition then marginalise
    r = np.random.default_rng(8)
    dp = DpParams(r.normal(size=3), random_correlation(r, 3), [1.0, 2.0, -0.5])
    a = marginal(conditional_sn_approx(conditional_exact(dp, [0], [0.3])).dp, [0])
    b = conditional_sn_approx(conditional_exact(marginal(dp, [0, 1]), [0], [0.3])).dp
    comm = max(np.max(np.abs(a.xi - b.xi)), np.max(np.abs(a.Omega - b.Omega)),
               np.max(np.abs(a.alpha - b.alpha)))
    record(6, n_feasible > 0 and err < 1e-10 and indep and indep_err < 1e-10 and comm < 1e-10,
           f"cumulant err {err:.1e} on {n_feasible} feasible cases; independence err "
           f"{indep_err:.1e}; commutation err {comm:.1e}")


def test_criterion_07_em_monotone():
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(700 + seed)
        n = int(rng.integers(20, 120))
        if seed % 4 == 0:
            data = RegressionData(np.abs(rng.normal(size=n)) + 0.1)
        else:
            X = np.column_stack([np.ones(n), rng.normal(size=n)])
            y = rvs_sn(DpParams.univariate(0.0, 1.0, rng.normal(scale=4)), n, rng)[:, 0]
            data = RegressionData(y + X @ [1.0, -1.0], X)
        _, trace = em(data, cp_to_dp_theta(mom_init(data), data), max_iter=200, tol=0.0)
        worst = min(worst, float(np.min(np.diff(trace))))
    record(7, worst >= -1e-9, f"largest loglik decrease {-worst:.1e} over 20 datasets")


def test_criterion_08_mle_recovery():
    t0 = time.perf_counter()
    hits_uv = 0
    for s in range(100):
        y = rvs_sn(DpParams.univariate(0.0, 1.0, 5.0), 2000, SeededStream(80, s))[:, 0]
        res = fit(RegressionData(y))
        hits_uv += abs(res.gamma1 - 0.851008) < 3 * res.se_cp[-1]
    hits_mv = 0
    R = np.array([[1.0, 0.4], [0.4, 1.0]])
    for s in range(100):
        y = rvs_sn(DpParams(np.zeros(2), R, [3.0, 3.0]), 2000, SeededStream(81, s))
        res = fit_mv(MvRegressionData(y, np.ones((2000, 1))))
        hits_mv += bool(np.all(np.abs(res.alpha - 3.0) < 3 * res.se_alpha))
    record(8, hits_uv >= 95 and hits_mv >= 95,
           f"univariate {hits_uv}/100, bivariate {hits_mv}/100 within 3 SE; "
           f"{time.perf_counter() - t0:.1f} s")


def test_criterion_09_boundary_frequency():
    n_pos = n_boundary = agree = 0
    for s in range(2000):
        y = rvs_sn(DpParams.univariate(0.0, 1.0, 5.0), 25, SeededStream(90, s))[:, 0]
        pos = bool(np.all(y > 0))
        sf = fit_shape(y, 0.0, 1.0)
        n_pos += pos
        n_boundary += sf.boundary
        agree += sf.boundary == pos
    frac = n_pos / 2000
    record(9, abs(frac - 0.20) <= 0.04 and agree == 2000,
           f"all-positive fraction {frac:.4f}, boundary flags {n_boundary}, agreement {agree}/2000")


def test_criterion_10_skew_elliptical_sampler():
    n = 10**5
    Om = np.array([[1.0, 0.4], [0.4, 1.0]])
    alpha = np.array([3.0, -1.0])
    a = rvs_skew_elliptical(SkewSpec(alpha, Om), n, SeededStream(100, 0))
    b = rvs_sn(DpParams(np.zeros(2), Om, alpha), n, SeededStream(100, 1))
    p = [stats.ks_2samp(a[:, j], b[:, j]).pvalue for j in range(2)]
    record(10, min(p) > 0.01, f"two-sample KS p-values {p[0]:.3f}, {p[1]:.3f}")

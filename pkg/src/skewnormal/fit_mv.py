"""
Multivariate skew-normal regression ``y_i ~ SN_k(x_i' beta, Omega, alpha)``.

With ``eta = omega^{-1} alpha`` the loglikelihood is maximised over
``Omega`` in closed form, ``Omega_hat(beta) = V(beta) = u'u / n`` where
``u = y - X beta``, leaving the profile

    l*(beta, eta) = -n/2 log|V| - nk/2 + sum zeta_0(u eta) - (nk/2) log 2 pi

which is maximised by BFGS with its analytic gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg, optimize, stats

from .errors import DimensionError, DomainError, RankError, SingularError
from .kernels import zeta
from .param import DpParams, GAMMA1_MAX, delta_to_alpha

__all__ = [
    "MvRegressionData",
    "FitOptionsMv",
    "FitResultMv",
    "LrResult",
    "loglik_mv",
    "profile_loglik",
    "profile_grad",
    "fit_mv",
    "lr_normality_mv",
    "partial_correlation_matrix",
    "PairReport",
    "conditional_independence_report",
]

_LOG_2PI = np.log(2.0 * np.pi)
_B = np.sqrt(2.0 / np.pi)


@dataclass(frozen=True)
class MvRegressionData:
    """Response matrix ``y`` (n x k) and design ``X`` (n x p, default ones)."""

    y: np.ndarray
    X: np.ndarray | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        X = np.ones((y.shape[0], 1)) if self.X is None else np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        n, p = X.shape
        k = y.shape[1]
        if y.ndim != 2 or y.shape[0] != n:
            raise DimensionError(f"y has shape {y.shape} but X has {n} rows")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
            raise DomainError("data must be finite")
        if not n > p + k:
            raise DimensionError(f"need n > p + k, got n = {n}, p = {p}, k = {k}")
        if np.linalg.matrix_rank(X) < p:
            raise RankError("design matrix is not of full column rank")
        y = np.array(y)
        X = np.array(X)
        y.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def k(self):
        return self.y.shape[1]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def intercept(self):
        hits = np.flatnonzero(np.all(self.X == 1.0, axis=0))
        return int(hits[0]) if hits.size else None


def loglik_mv(beta, Omega, alpha, data: MvRegressionData) -> float:
    """``-n/2 log|Omega| - n/2 tr(Omega^{-1} V) + sum zeta_0(alpha' omega^{-1} u_i)``
    plus the ``-(nk/2) log 2 pi`` constant.
    """
    beta = np.asarray(beta, dtype=float).reshape(data.p, data.k)
    Omega = np.atleast_2d(np.asarray(Omega, dtype=float))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    try:
        cf = linalg.cho_factor(Omega, lower=True)
    except linalg.LinAlgError:
        raise SingularError("Omega is not positive definite") from None
    n, k = data.n, data.k
    u = data.y - data.X @ beta
    V = u.T @ u / n
    logdet = 2.0 * np.sum(np.log(np.diag(cf[0])))
    tr = np.trace(linalg.cho_solve(cf, V))
    w = np.sqrt(np.diag(Omega))
    return float(-0.5 * n * logdet - 0.5 * n * tr + np.sum(zeta(0, u @ (alpha / w)))
                 - 0.5 * n * k * _LOG_2PI)


def _residual_cov(beta, data):
    u = data.y - data.X @ beta
    V = u.T @ u / data.n
    try:
        cf = linalg.cho_factor(V, lower=True)
    except linalg.LinAlgError:
        raise SingularError("residual covariance V(beta) is singular") from None
    return u, V, cf


def profile_loglik(beta, eta, data: MvRegressionData) -> float:
    beta = np.asarray(beta, dtype=float).reshape(data.p, data.k)
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    u, V, cf = _residual_cov(beta, data)
    n, k = data.n, data.k
    logdet = 2.0 * np.sum(np.log(np.diag(cf[0])))
    return float(-0.5 * n * logdet - 0.5 * n * k + np.sum(zeta(0, u @ eta))
                 - 0.5 * n * k * _LOG_2PI)


def profile_grad(beta, eta, data: MvRegressionData):
    """``(d l*/d beta, d l*/d eta) = (X'u V^{-1} - X' zeta_1(u eta) eta', u' zeta_1(u eta))``."""
    beta = np.asarray(beta, dtype=float).reshape(data.p, data.k)
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    u, V, cf = _residual_cov(beta, data)
    p1 = zeta(1, u @ eta)
    g_beta = data.X.T @ linalg.cho_solve(cf, u.T).T - np.outer(data.X.T @ p1, eta)
    g_eta = u.T @ p1
    return g_beta, g_eta


@dataclass(frozen=True)
class FitOptionsMv:
    """Options for :func:`fit_mv`.

    ``drop`` is the loglik deficit used to pull a divergent fit back from
    the boundary (None means ``2.0 * k``); ``deficits`` requests extra
    fits at other stopping deficits for a sensitivity check.
    """

    max_iter: int = 2000
    gtol: float = 1e-6
    alpha_divergence: float = 1e3
    stall_iters: int = 20
    stall_tol: float = 1e-6
    drop: float | None = None
    resolve_boundary: bool = True
    deficits: tuple = ()
    fd_step: float = 1e-5


@dataclass(frozen=True)
class FitResultMv:
    beta: np.ndarray
    Omega: np.ndarray
    alpha: np.ndarray
    eta: np.ndarray
    loglik: float
    se_beta: np.ndarray
    se_eta: np.ndarray
    se_alpha: np.ndarray
    convergence: str
    boundary: bool
    deficit: float | None = None
    sup_loglik: float | None = None
    n_iter: int = 0
    sensitivity: list = field(default_factory=list)

    def dp_at(self, x):
        """``DpParams`` for a single design row ``x``."""
        return DpParams(np.asarray(x, dtype=float) @ self.beta, self.Omega, self.alpha)

    def to_dict(self):
        def clean(a):
            a = np.asarray(a, dtype=float)
            return np.where(np.isfinite(a), a, np.nan).tolist()

        return {
            "beta": self.beta.tolist(),
            "Omega": self.Omega.tolist(),
            "alpha": self.alpha.tolist(),
            "eta": self.eta.tolist(),
            "loglik": float(self.loglik),
            "se": {"beta": clean(self.se_beta), "eta": clean(self.se_eta),
                   "alpha": clean(self.se_alpha)},
            "convergence": self.convergence,
            "boundary": bool(self.boundary),
            "deficit": None if self.deficit is None else float(self.deficit),
            "sup_loglik": None if self.sup_loglik is None else float(self.sup_loglik),
            "sensitivity": [
                {"deficit": None if s.deficit is None else float(s.deficit), "beta": s.beta.tolist(), "alpha": s.alpha.tolist()}
                for s in self.sensitivity
            ],
        }


def _pack(beta, eta):
    return np.r_[np.ravel(beta), eta]


def _unpack(theta, p, k):
    return theta[: p * k].reshape(p, k), theta[p * k:]


def _standardize(data):
    j = data.intercept
    c = data.y.mean(axis=0) if j is not None else np.zeros(data.k)
    s = data.y.std(axis=0)
    if np.any(s <= 0):
        raise SingularError("a response column has zero spread")
    return MvRegressionData((data.y - c) / s, data.X), c, s, j


def _mom_start(data):
    """OLS ``beta`` and componentwise moment estimates of the shape."""
    beta, *_ = np.linalg.lstsq(data.X, data.y, rcond=None)
    u = data.y - data.X @ beta
    S = u.T @ u / data.n
    sd = np.sqrt(np.diag(S))
    g1 = np.mean(u ** 3, axis=0) / sd ** 3
    g1 = np.clip(g1, -0.9 * GAMMA1_MAX, 0.9 * GAMMA1_MAX)
    R = np.cbrt(2.0 * g1 / (4.0 - np.pi))
    mu_z = R / np.sqrt(1.0 + R * R)
    omega = sd / np.sqrt(1.0 - mu_z * mu_z)
    Om = S + np.outer(omega * mu_z, omega * mu_z)
    ob = Om / np.outer(omega, omega)
    delta = mu_z / _B
    eta = np.zeros(data.k)
    for _ in range(30):
        try:
            eta = delta_to_alpha(delta, ob) / omega
            break
        except DomainError:
            delta = 0.7 * delta
    j = data.intercept
    if j is not None:
        beta[j] -= omega * _B * delta
    return beta, eta


class _Stop(Exception):
    pass


def _fd_hessian(theta, grad, step):
    m = theta.shape[0]
    H = np.empty((m, m))
    for i in range(m):
        h = step * (1.0 + abs(theta[i]))
        e = np.zeros(m)
        e[i] = h
        H[i] = (grad(theta + e) - grad(theta - e)) / (2.0 * h)
    return H


def _newton_polish(theta, neg, neg_grad, step, gtol, iters=20):
    """Newton steps on ``-l*`` using a finite-difference Hessian of the gradient."""
    f = neg(theta)
    for _ in range(iters):
        g = neg_grad(theta)
        if np.max(np.abs(g)) < 1e-3 * gtol:
            break
        H = _fd_hessian(theta, neg_grad, step)
        H = 0.5 * (H + H.T)
        try:
            np.linalg.cholesky(H)
            d = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        for _ in range(30):
            cand = theta + t * d
            fc = neg(cand)
            if fc <= f + 1e-12 * (1.0 + abs(f)):
                break
            t *= 0.5
        else:
            break
        theta, f = cand, fc
    return theta


def _bisect_path(path, fun, target):
    """First point on the piecewise-linear path where ``fun`` reaches ``target``."""
    vals = [fun(t) for t in path]
    idx = next((i for i, v in enumerate(vals) if v >= target), len(path) - 1)
    if idx == 0:
        return path[0]
    a, b = path[idx - 1], path[idx]
    t = optimize.brentq(lambda s: fun(a + s * (b - a)) - target, 0.0, 1.0, xtol=1e-12)
    return a + t * (b - a)


def fit_mv(data: MvRegressionData, options: FitOptionsMv | None = None) -> FitResultMv:
    """Maximise the profile loglikelihood over ``(beta, eta)``.

    A fit whose ``|alpha| = |omega eta|`` exceeds ``alpha_divergence`` while
    the loglik stalls is flagged as a boundary solution; it is then
    replaced (when ``resolve_boundary``) by the first point on the
    optimiser path whose loglik is ``drop`` below the supremum.
    """
    opt = options or FitOptionsMv()
    p, k = data.p, data.k
    sdata, c, s, j = _standardize(data)

    def neg(theta):
        b, e = _unpack(theta, p, k)
        try:
            return -profile_loglik(b, e, sdata)
        except SingularError:
            return np.inf

    def neg_grad(theta):
        b, e = _unpack(theta, p, k)
        gb, ge = profile_grad(b, e, sdata)
        return -_pack(gb, ge)

    theta0 = _pack(*_mom_start(sdata))
    path = [theta0.copy()]
    lls = [-neg(theta0)]
    diverged = {"flag": False}

    def callback(xk):
        path.append(xk.copy())
        lls.append(-neg(xk))
        b, e = _unpack(xk, p, k)
        w = np.sqrt(np.diag(_residual_cov(b, sdata)[1]))
        big = np.linalg.norm(w * e) > opt.alpha_divergence
        if big and len(lls) > opt.stall_iters:
            if lls[-1] - lls[-1 - opt.stall_iters] < opt.stall_tol:
                diverged["flag"] = True
                raise _Stop
        if big and np.linalg.norm(w * e) > 1e3 * opt.alpha_divergence:
            diverged["flag"] = True
            raise _Stop

    try:
        res = optimize.minimize(neg, theta0, jac=neg_grad, method="BFGS", callback=callback,
                                options={"maxiter": opt.max_iter, "gtol": 1e-9})
        theta, n_iter = res.x, res.nit
    except _Stop:
        theta, n_iter = path[-1], len(path) - 1

    b, e = _unpack(theta, p, k)
    w = np.sqrt(np.diag(_residual_cov(b, sdata)[1]))
    boundary = diverged["flag"] or np.linalg.norm(w * e) > opt.alpha_divergence
    if not boundary:
        theta = _newton_polish(theta, neg, neg_grad, opt.fd_step, opt.gtol)
    sup = -neg(theta)
    gnorm = float(np.max(np.abs(neg_grad(theta))))
    status = "boundary" if boundary else ("converged" if gnorm < opt.gtol else "max_iter")

    shift = -data.n * float(np.sum(np.log(s)))

    def build(theta_std, status, deficit=None):
        bs, es = _unpack(theta_std, p, k)
        beta = bs * s
        if j is not None:
            beta[j] += c
        eta = es / s
        u = data.y - data.X @ beta
        Om = u.T @ u / data.n
        omega = np.sqrt(np.diag(Om))
        alpha = omega * eta
        ll = profile_loglik(beta, eta, data)
        if status == "boundary":
            nan = np.full(p * k + k, np.nan)
            se = nan
        else:
            H = _fd_hessian(theta_std, neg_grad, opt.fd_step)
            H = 0.5 * (H + H.T)
            try:
                cov = np.linalg.inv(H)
                d = np.diag(cov)
                se = np.where(d > 0, np.sqrt(np.abs(d)), np.nan)
            except np.linalg.LinAlgError:
                se = np.full(p * k + k, np.nan)
        se_b, se_e = _unpack(se, p, k)
        se_b = se_b * s
        se_e = se_e / s
        return FitResultMv(beta=beta, Omega=Om, alpha=alpha, eta=eta, loglik=ll,
                           se_beta=se_b, se_eta=se_e, se_alpha=omega * se_e,
                           convergence=status, boundary=boundary, deficit=deficit,
                           sup_loglik=sup + shift, n_iter=n_iter)

    if not boundary:
        return build(theta, status)

    fits = []
    drop = 2.0 * k if opt.drop is None else opt.drop
    wanted = [drop] + [d for d in opt.deficits if d != drop]
    for d in wanted:
        if d <= 0:
            fits.append(build(theta, "boundary", 0.0))
            continue
        pt = _bisect_path(path, lambda t: -neg(t), sup - d)
        fits.append(build(pt, "boundary_resolved", float(sup + neg(pt))))
    main = fits[0] if opt.resolve_boundary else build(theta, "boundary")
    return replace(main, sensitivity=fits[1:] if opt.resolve_boundary else fits)


@dataclass(frozen=True)
class LrResult:
    """Likelihood-ratio statistic for ``alpha = 0`` with its chi-square reference."""

    statistic: float
    df: int
    p_value: float

    def __float__(self):
        return self.statistic


def _normal_loglik_mv(data):
    beta, *_ = np.linalg.lstsq(data.X, data.y, rcond=None)
    u = data.y - data.X @ beta
    V = u.T @ u / data.n
    _, logdet = np.linalg.slogdet(V)
    n, k = data.n, data.k
    return -0.5 * n * logdet - 0.5 * n * k - 0.5 * n * k * _LOG_2PI


def lr_normality_mv(data: MvRegressionData, fit: FitResultMv | None = None) -> LrResult:
    """``2 {l(xi_hat, Omega_hat, alpha_hat) - l(mu_hat, Sigma_hat, 0)}`` against chi2_k.

    For boundary fits the supremum of the loglikelihood is used.
    """
    res = fit if fit is not None else fit_mv(data)
    top = res.sup_loglik if res.boundary and res.sup_loglik is not None else res.loglik
    stat = max(2.0 * (top - _normal_loglik_mv(data)), 0.0)
    return LrResult(float(stat), data.k, float(stats.chi2.sf(stat, data.k)))


def partial_correlation_matrix(Omega):
    """``Omega^{-1}`` scaled to unit diagonal with off-diagonal signs changed."""
    Omega = np.atleast_2d(np.asarray(Omega, dtype=float))
    try:
        P = linalg.inv(Omega)
        linalg.cholesky(Omega, lower=True)
    except linalg.LinAlgError:
        raise SingularError("Omega is not positive definite") from None
    d = 1.0 / np.sqrt(np.diag(P))
    out = -P * np.outer(d, d)
    out = 0.5 * (out + out.T)
    np.fill_diagonal(out, 1.0)
    return out


@dataclass(frozen=True)
class PairReport:
    i: int
    j: int
    partial: float
    zero_partial: bool
    alpha_clause: bool

    @property
    def independent(self):
        return self.zero_partial and self.alpha_clause


def conditional_independence_report(fit, zero_tol=1e-8):
    """Per pair: zero entry of ``Omega^{-1}`` and at most one nonzero ``alpha``.

    ``fit`` is a FitResultMv or anything with ``Omega`` and ``alpha``.
    Returns a PairReport for every pair ``i < j``; pairs satisfying both
    clauses have ``independent`` true.
    """
    pc = partial_correlation_matrix(fit.Omega)
    alpha = np.asarray(fit.alpha, dtype=float)
    nz = np.abs(alpha) > zero_tol
    k = alpha.shape[0]
    return [
        PairReport(i, j, float(pc[i, j]), bool(abs(pc[i, j]) <= zero_tol),
                   bool(not (nz[i] and nz[j])))
        for i in range(k) for j in range(i + 1, k)
    ]

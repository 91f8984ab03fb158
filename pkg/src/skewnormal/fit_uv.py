"""
Univariate skew-normal regression by maximum likelihood.

Parameter vectors are flat arrays:

* direct parameters ``theta_dp = (beta_1..beta_p, omega, alpha)`` where
  ``xi_i = x_i' beta``;
* centred parameters ``theta_cp = (beta_1..beta_p, sigma, gamma1)`` where
  ``E Y_i = x_i' beta``.

The two charts differ only in the intercept, ``beta_int^DP = beta_int^CP -
sigma mu_z / sigma_z``, so conversions need an intercept column in ``X``.
Every loglikelihood includes the ``-(n/2) log 2 pi`` constant.

The CP derivatives are computed in ``(beta, sigma, lambda)`` and mapped to
``gamma1`` by the chain rule. At ``gamma1 = 0`` the factor ``d lambda / d
gamma1`` is infinite while ``d l / d lambda`` vanishes; there the
``gamma1`` score uses the expansion ``l_i = -r_i^2/2 + c3(r_i) lambda^3 +
c4(r_i) lambda^4 + O(lambda^5)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, optimize

from .errors import DegenerateError, DimensionError, DomainError, RankError
from .kernels import zeta
from .param import GAMMA1_MAX

__all__ = [
    "BOUNDARY_TOL",
    "RegressionData",
    "FitOptionsUv",
    "FitResultUv",
    "ShapeFit",
    "cp_to_dp_theta",
    "dp_to_cp_theta",
    "loglik_dp",
    "score_dp",
    "loglik_cp",
    "grad_cp",
    "hess_cp",
    "scores_cp",
    "expected_information_cp",
    "mom_init",
    "em_step",
    "em",
    "fit",
    "fit_shape",
    "profile_gamma1",
    "boundary_resolve",
    "lr_normality_uv",
]

_B = np.sqrt(2.0 / np.pi)
_LOG_2PI = np.log(2.0 * np.pi)
_SKEW_CONST = (4.0 - np.pi) / 2.0
# gamma1 ~ _K_PRIME * lambda^3 near 0
_K_PRIME = _SKEW_CONST * _B ** 3
_LAMBDA_SERIES = 1e-4
_HESS_GAMMA_FLOOR = 1e-8
BOUNDARY_TOL = 1e-6
_GAMMA_BOUND = GAMMA1_MAX - 1e-7
MOM_CLIP = 0.9 * GAMMA1_MAX


@dataclass(frozen=True)
class RegressionData:
    """Response ``y`` and design ``X`` (defaults to a column of ones)."""

    y: np.ndarray
    X: np.ndarray | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        X = np.ones((y.shape[0], 1)) if self.X is None else np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        n, p = X.shape
        if n != y.shape[0]:
            raise DimensionError(f"y has {y.shape[0]} rows but X has {n}")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
            raise DomainError("data must be finite")
        if not n > p >= 1:
            raise DimensionError(f"need n > p >= 1, got n = {n}, p = {p}")
        if np.linalg.matrix_rank(X) < p:
            raise RankError("design matrix is not of full column rank")
        y.setflags(write=False)
        X = np.array(X)
        X.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def intercept(self):
        """Index of the first all-ones column, or None."""
        hits = np.flatnonzero(np.all(self.X == 1.0, axis=0))
        return int(hits[0]) if hits.size else None


def _require_intercept(data):
    j = data.intercept
    if j is None:
        raise DimensionError("CP/DP conversion needs an intercept column of ones in X")
    return j


# -- shape maps ---------------------------------------------------------------

def _lambda_of_gamma(g):
    """``lambda``, ``d lambda/d gamma1`` and ``d2 lambda/d gamma1^2``.

    ``R = mu_z/sigma_z = cbrt(2 gamma1/(4 - pi))``, ``T = sqrt(2/pi - (1 - 2/pi) R^2)``.
    """
    if not abs(g) < GAMMA1_MAX:
        raise DomainError(f"|gamma1| must be below {GAMMA1_MAX}")
    c = 1.0 - 2.0 / np.pi
    R = float(np.cbrt(g / _SKEW_CONST))
    T = np.sqrt(2.0 / np.pi - c * R * R)
    lam = R / T
    if R == 0.0:
        return 0.0, np.inf, np.nan
    k = 2.0 / (3.0 * (4.0 - np.pi))
    d1 = k * (1.0 / (T * R * R) + c / T ** 3)
    dR = 2.0 / (3.0 * R * R * (4.0 - np.pi))
    dT = -c * R * dR / T
    d2 = -k * (dT / (T * R) ** 2 + 2.0 * dR / (T * R ** 3) + 3.0 * c * dT / T ** 4)
    return float(lam), float(d1), float(d2)


def _mu_sigma_z(lam):
    mu = _B * lam / np.sqrt(1.0 + lam * lam)
    return mu, np.sqrt(1.0 - mu * mu)


def _gamma_of_lambda(lam):
    mu, s = _mu_sigma_z(lam)
    return _SKEW_CONST * (mu / s) ** 3


def cp_to_dp_theta(theta_cp, data: RegressionData):
    theta_cp = np.asarray(theta_cp, dtype=float)
    j = _require_intercept(data)
    p = data.p
    beta, sigma, g = theta_cp[:p].copy(), theta_cp[p], theta_cp[p + 1]
    lam, _, _ = _lambda_of_gamma(g)
    mu, s = _mu_sigma_z(lam)
    beta[j] -= sigma * mu / s
    return np.r_[beta, sigma / s, lam]


def dp_to_cp_theta(theta_dp, data: RegressionData):
    theta_dp = np.asarray(theta_dp, dtype=float)
    j = _require_intercept(data)
    p = data.p
    beta, omega, lam = theta_dp[:p].copy(), theta_dp[p], theta_dp[p + 1]
    mu, s = _mu_sigma_z(lam)
    beta[j] += omega * mu
    return np.r_[beta, omega * s, _gamma_of_lambda(lam)]


# -- direct parameters ----------------------------------------------------------

def _split_dp(theta, data):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (data.p + 2,):
        raise DimensionError(f"theta has shape {theta.shape}, expected ({data.p + 2},)")
    p = data.p
    omega = theta[p]
    if not omega > 0:
        raise DomainError("omega must be positive")
    return theta[:p], omega, theta[p + 1]


def loglik_dp(theta_dp, data: RegressionData) -> float:
    """``-n log omega - z'z/2 + sum zeta_0(alpha z_i) - (n/2) log 2 pi``."""
    beta, omega, alpha = _split_dp(theta_dp, data)
    z = (data.y - data.X @ beta) / omega
    n = data.n
    return float(-n * np.log(omega) - 0.5 * z @ z + np.sum(zeta(0, alpha * z))
                 - 0.5 * n * _LOG_2PI)


def score_dp(theta_dp, data: RegressionData):
    beta, omega, alpha = _split_dp(theta_dp, data)
    z = (data.y - data.X @ beta) / omega
    p1 = zeta(1, alpha * z)
    g_beta = data.X.T @ (z - alpha * p1) / omega
    g_omega = (-data.n + z @ z - alpha * (p1 @ z)) / omega
    g_alpha = p1 @ z
    return np.r_[g_beta, g_omega, g_alpha]


# -- centred parameters ---------------------------------------------------------

def _split_cp(theta, data):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (data.p + 2,):
        raise DimensionError(f"theta has shape {theta.shape}, expected ({data.p + 2},)")
    p = data.p
    sigma, g = theta[p], theta[p + 1]
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    if not abs(g) < GAMMA1_MAX:
        raise DomainError(f"|gamma1| must be below {GAMMA1_MAX}")
    return theta[:p], sigma, g


@dataclass
class _CpPieces:
    lam: float
    mu: float
    s: float
    r: np.ndarray
    z: np.ndarray
    p1: np.ndarray
    dmu: float
    ds: float
    dz: np.ndarray


def _pieces(beta, sigma, lam, data):
    mu, s = _mu_sigma_z(lam)
    r = (data.y - data.X @ beta) / sigma
    z = mu + s * r
    p1 = zeta(1, lam * z)
    dmu = _B / (1.0 + lam * lam) ** 1.5
    ds = -mu * dmu / s
    dz = dmu + r * ds
    return _CpPieces(lam, mu, s, r, z, p1, dmu, ds, dz)


def _series_coefs(r):
    c3 = np.sqrt(2.0) * r * (4.0 * r * r + np.pi * (3.0 - r * r) - 12.0) / (6.0 * np.pi ** 1.5)
    r2 = r * r
    c4 = (-r2 * r2 + 6.0 * r2 + np.pi * (r2 * r2 - 6.0 * r2 + 3.0) / 3.0 - 3.0) / np.pi ** 2
    return c3, c4


def loglik_cp(theta_cp, data: RegressionData) -> float:
    """``n log(sigma_z/sigma) - z'z/2 + sum zeta_0(lambda z_i) - (n/2) log 2 pi``."""
    beta, sigma, g = _split_cp(theta_cp, data)
    lam, _, _ = _lambda_of_gamma(g)
    mu, s = _mu_sigma_z(lam)
    z = mu + s * (data.y - data.X @ beta) / sigma
    n = data.n
    return float(n * np.log(s / sigma) - 0.5 * z @ z + np.sum(zeta(0, lam * z))
                 - 0.5 * n * _LOG_2PI)


def scores_cp(theta_cp, data: RegressionData):
    """Per-observation CP score contributions, an ``n x (p + 2)`` array."""
    beta, sigma, g = _split_cp(theta_cp, data)
    lam, dlam, _ = _lambda_of_gamma(g)
    pc = _pieces(beta, sigma, lam, data)
    resid = pc.z - lam * pc.p1
    s_beta = (pc.s / sigma) * data.X * resid[:, None]
    s_sigma = -1.0 / sigma + (pc.s / sigma) * pc.r * resid
    if abs(lam) < _LAMBDA_SERIES:
        c3, c4 = _series_coefs(pc.r)
        s_gamma = (c3 + (4.0 / 3.0) * c4 * lam) / _K_PRIME
    else:
        s_lam = pc.ds / pc.s - pc.z * pc.dz + pc.p1 * (pc.z + lam * pc.dz)
        s_gamma = s_lam * dlam
    return np.column_stack([s_beta, s_sigma, s_gamma])


def grad_cp(theta_cp, data: RegressionData):
    """Gradient of :func:`loglik_cp` in ``(beta, sigma, gamma1)``; finite at ``gamma1 = 0``."""
    return scores_cp(theta_cp, data).sum(axis=0)


def hess_cp(theta_cp, data: RegressionData):
    """Hessian of :func:`loglik_cp` in ``(beta, sigma, gamma1)``.

    The ``gamma1`` curvature grows like ``|gamma1|^{-2/3}`` at the origin, so
    ``|gamma1|`` is floored at ``1e-8`` here.
    """
    beta, sigma, g = _split_cp(theta_cp, data)
    if abs(g) < _HESS_GAMMA_FLOOR:
        g = _HESS_GAMMA_FLOOR if g >= 0 else -_HESS_GAMMA_FLOOR
    lam, dlam, d2lam = _lambda_of_gamma(g)
    pc = _pieces(beta, sigma, lam, data)
    X, n, p = data.X, data.n, data.p
    r, z, p1, s, ds, mu, dmu, dz = pc.r, pc.z, pc.p1, pc.s, pc.ds, pc.mu, pc.dmu, pc.dz
    p2 = zeta(2, lam * z)
    d2mu = -3.0 * mu / (1.0 + lam * lam) ** 2
    d2s = -(dmu * (dmu * s - mu * ds) / s ** 2 + mu * d2mu / s)
    d2z = d2mu + d2s * r
    zt = z + lam * dz
    w = 1.0 - lam * lam * p2
    ones = np.ones(n)

    # negative Hessian blocks in (beta, sigma, lambda)
    h_bb = (s / sigma) ** 2 * (X.T * w) @ X
    h_bs = (s / sigma ** 2) * X.T @ (z - lam * p1 + w * (z - mu * ones))
    h_bl = X.T @ (ds * (-2.0 * r * s + lam * p1 - mu * ones)
                  + s * (p1 + lam * p2 * zt - dmu * ones)) / sigma
    h_ss = (-n + 2.0 * s * r @ (z - lam * p1) + s * s * r @ (w * r)) / sigma ** 2
    h_sl = -r @ (ds * (z - lam * p1) + s * (dz - p1 - lam * p2 * zt)) / sigma
    h_ll = (n * (ds * ds - s * d2s) / s ** 2 + dz @ dz + z @ d2z - zt @ (p2 * zt)
            - p1 @ (2.0 * dz + lam * d2z))
    g_lam = n * ds / s - z @ dz + p1 @ zt

    H = np.empty((p + 2, p + 2))
    H[:p, :p] = -h_bb
    H[:p, p] = H[p, :p] = -h_bs
    H[:p, p + 1] = H[p + 1, :p] = -h_bl * dlam
    H[p, p] = -h_ss
    H[p, p + 1] = H[p + 1, p] = -h_sl * dlam
    H[p + 1, p + 1] = -h_ll * dlam ** 2 + g_lam * d2lam
    return H


def expected_information_cp(theta_cp):
    """Expected information per observation for ``X = 1_n``, by quadrature of ``E[s s']``."""
    theta_cp = np.asarray(theta_cp, dtype=float)
    if theta_cp.shape != (3,):
        raise DimensionError("expected information is available for X = 1_n only")
    mu0, sigma, g = theta_cp
    lam, _, _ = _lambda_of_gamma(g)
    muz, sz = _mu_sigma_z(lam)
    omega = sigma / sz
    xi = mu0 - omega * muz

    def integrand(y):
        d = RegressionData.__new__(RegressionData)
        object.__setattr__(d, "y", np.array([y]))
        object.__setattr__(d, "X", np.ones((1, 1)))
        sc = scores_cp(theta_cp, d)[0]
        zz = (y - xi) / omega
        dens = np.exp(-0.5 * zz * zz + zeta(0, lam * zz) - 0.5 * _LOG_2PI) / omega
        return np.outer(sc, sc) * dens

    val, _ = integrate.quad_vec(integrand, -np.inf, np.inf, epsabs=1e-11, epsrel=1e-10)
    return 0.5 * (val + val.T)


# -- initial values and EM ----------------------------------------------------

def mom_init(data: RegressionData):
    """Method-of-moments start in CP: OLS ``beta``, residual sd and clipped skewness."""
    beta, *_ = np.linalg.lstsq(data.X, data.y, rcond=None)
    e = data.y - data.X @ beta
    m2 = float(np.mean(e * e))
    scale = max(1.0, float(np.max(np.abs(data.y))))
    if not m2 > (1e-14 * scale) ** 2:
        raise DegenerateError("residuals have zero spread")
    g1 = float(np.mean(e ** 3)) / m2 ** 1.5
    g1 = float(np.clip(g1, -MOM_CLIP, MOM_CLIP))
    return np.r_[beta, np.sqrt(m2), g1]


def em_step(theta_dp, data: RegressionData):
    """One EM update in DP coordinates; returns ``(theta_new, loglik_new)``.

    The latent variable is ``h = |X0|``. Given ``y_i`` it is normal with
    mean ``delta z_i`` and variance ``1 - delta^2`` truncated to ``h > 0``,
    so ``E h = m + sqrt(v) zeta_1(alpha z)`` and ``E h^2 = m^2 + v + m
    sqrt(v) zeta_1(alpha z)``. The M-step regresses ``y`` on ``[X, h]``.
    """
    beta, omega, alpha = _split_dp(theta_dp, data)
    X, y = data.X, data.y
    delta = alpha / np.sqrt(1.0 + alpha * alpha)
    z = (y - X @ beta) / omega
    m = delta * z
    sv = 1.0 / np.sqrt(1.0 + alpha * alpha)
    q = zeta(1, alpha * z)
    eh = m + sv * q
    eh2 = m * m + sv * sv + m * sv * q
    p = data.p
    A = np.empty((p + 1, p + 1))
    A[:p, :p] = X.T @ X
    A[:p, p] = A[p, :p] = X.T @ eh
    A[p, p] = eh2.sum()
    rhs = np.r_[X.T @ y, eh @ y]
    sol = np.linalg.solve(A, rhs)
    beta_new, psi = sol[:p], sol[p]
    e = y - X @ beta_new
    tau2 = float(np.mean(e * e - 2.0 * psi * e * eh + psi * psi * eh2))
    tau2 = max(tau2, 1e-300)
    omega_new = np.sqrt(tau2 + psi * psi)
    theta = np.r_[beta_new, omega_new, psi / np.sqrt(tau2)]
    return theta, loglik_dp(theta, data)


def em(data: RegressionData, theta_dp, max_iter=200, tol=1e-12):
    """Iterate :func:`em_step`; returns ``(theta, trace)`` with the loglik trace."""
    theta = np.asarray(theta_dp, dtype=float)
    ll = loglik_dp(theta, data)
    trace = [ll]
    for _ in range(max_iter):
        new, new_ll = em_step(theta, data)
        if not np.all(np.isfinite(new)):
            break
        theta, step = new, new_ll - ll
        ll = new_ll
        trace.append(ll)
        if abs(step) <= tol * (1.0 + abs(ll)):
            break
    return theta, trace


# -- staged fit ---------------------------------------------------------------

@dataclass(frozen=True)
class FitOptionsUv:
    """Options for :func:`fit`.

    ``em_iters`` EM steps refine the moment start; ``max_iter`` bounds the
    quasi-Newton stage; ``full_em_iters`` bounds the fallback EM run.
    """

    em_iters: int = 5
    max_iter: int = 500
    full_em_iters: int = 5000
    newton_iters: int = 50
    gtol: float = 1e-8


@dataclass(frozen=True)
class FitResultUv:
    """Estimates in both charts, loglikelihood and observed-information SEs.

    ``convergence`` is one of ``"converged"``, ``"boundary"``,
    ``"boundary_resolved"`` or ``"max_iter"``.
    """

    cp: np.ndarray
    dp: np.ndarray
    loglik: float
    se_cp: np.ndarray
    convergence: str
    trace: list = field(default_factory=list)
    boundary_deficit: float | None = None
    grad_norm: float = float("nan")

    @property
    def gamma1(self):
        return float(self.cp[-1])

    @property
    def alpha(self):
        return float(self.dp[-1])

    def to_dict(self):
        return {
            "cp": {"beta": self.cp[:-2].tolist(), "sigma": float(self.cp[-2]),
                   "gamma1": float(self.cp[-1])},
            "dp": {"beta": self.dp[:-2].tolist(), "omega": float(self.dp[-2]),
                   "alpha": float(self.dp[-1])},
            "loglik": float(self.loglik),
            "se_cp": [None if not np.isfinite(v) else float(v) for v in self.se_cp],
            "convergence": self.convergence,
            "boundary_deficit": None if self.boundary_deficit is None else float(self.boundary_deficit),
            "trace": [float(v) for v in self.trace],
        }


def _standardize(data):
    j = data.intercept
    c = float(np.mean(data.y)) if j is not None else 0.0
    s = float(np.std(data.y))
    if not s > 0:
        raise DegenerateError("response has zero spread")
    return RegressionData((data.y - c) / s, data.X), c, s, j


def _to_std(theta, c, s, j):
    t = np.array(theta, dtype=float)
    if j is not None:
        t[j] -= c
    t[:-1] /= s
    return t


def _from_std(theta, c, s, j):
    t = np.array(theta, dtype=float)
    t[:-1] *= s
    if j is not None:
        t[j] += c
    return t


def _bounds(p):
    return [(None, None)] * p + [(1e-10, None), (-_GAMMA_BOUND, _GAMMA_BOUND)]


def _quasi_newton(theta0, data, max_iter, fixed=None):
    """L-BFGS-B on ``-loglik_cp``; ``fixed`` optionally pins ``gamma1``."""
    p = data.p

    def fun(t):
        full = t if fixed is None else np.r_[t, fixed]
        try:
            val = -loglik_cp(full, data)
            g = -grad_cp(full, data)
        except DomainError:
            return np.inf, np.zeros_like(t)
        if fixed is not None:
            g = g[:-1]
        return val, g

    x0 = theta0 if fixed is None else theta0[:-1]
    bounds = _bounds(p) if fixed is None else _bounds(p)[:-1]
    res = optimize.minimize(fun, x0, jac=True, method="L-BFGS-B", bounds=bounds,
                            options={"maxiter": max_iter, "ftol": 1e-15, "gtol": 1e-10,
                                     "maxcor": 20})
    x = res.x if fixed is None else np.r_[res.x, fixed]
    return x, res


def _newton_polish(theta, data, iters, gtol):
    """Damped Newton steps with the analytic Hessian while it is negative definite."""
    ll = loglik_cp(theta, data)
    for _ in range(iters):
        g = grad_cp(theta, data)
        if np.max(np.abs(g)) < gtol * (1.0 + abs(ll)):
            break
        H = hess_cp(theta, data)
        try:
            np.linalg.cholesky(-H)
        except np.linalg.LinAlgError:
            break
        step = np.linalg.solve(-H, g)
        t = 1.0
        improved = False
        for _ in range(30):
            cand = theta + t * step
            if cand[-2] > 0 and abs(cand[-1]) < _GAMMA_BOUND:
                try:
                    cll = loglik_cp(cand, data)
                except DomainError:
                    cll = -np.inf
                if cll >= ll - 1e-12 * (1.0 + abs(ll)):
                    theta, ll, improved = cand, cll, True
                    break
            t *= 0.5
        if not improved:
            break
    return theta, ll


def _se(theta, data):
    try:
        H = hess_cp(theta, data)
        cov = np.linalg.inv(-H)
        d = np.diag(cov)
        return np.where(d > 0, np.sqrt(np.abs(d)), np.nan)
    except (np.linalg.LinAlgError, DomainError):
        return np.full(theta.shape, np.nan)


def _is_boundary(theta):
    return abs(theta[-1]) >= GAMMA1_MAX - BOUNDARY_TOL


def _finish(theta, data, trace, status):
    ll = loglik_cp(theta, data)
    grad = grad_cp(theta, data)
    se = _se(theta, data) if status != "boundary" else np.full(theta.shape, np.nan)
    return FitResultUv(cp=theta, dp=cp_to_dp_theta(theta, data), loglik=ll, se_cp=se,
                       convergence=status, trace=list(trace),
                       grad_norm=float(np.max(np.abs(grad))))


def fit(data: RegressionData, options: FitOptionsUv | None = None) -> FitResultUv:
    """Maximum likelihood in the centred parametrization.

    Stages: method-of-moments start, a few EM steps, quasi-Newton with
    Newton polishing; if the quasi-Newton stage fails a full EM run is
    used instead. Estimates at ``|gamma1| >= GAMMA1_MAX - 1e-6`` are
    flagged as boundary solutions.
    """
    opt = options or FitOptionsUv()
    _require_intercept(data)
    sdata, c, s, j = _standardize(data)

    start = mom_init(sdata)
    trace = [loglik_cp(start, sdata)]
    if opt.em_iters > 0:
        th_dp, em_trace = em(sdata, cp_to_dp_theta(start, sdata), max_iter=opt.em_iters)
        cand = dp_to_cp_theta(th_dp, sdata)
        if abs(cand[-1]) < MOM_CLIP and np.isfinite(em_trace[-1]) and em_trace[-1] >= trace[0]:
            start = cand
            trace.extend(em_trace[1:])

    theta, res = _quasi_newton(start, sdata, opt.max_iter)
    trace.append(-float(res.fun))
    status = "converged"
    if _is_boundary(theta):
        status = "boundary"
    else:
        theta, ll = _newton_polish(theta, sdata, opt.newton_iters, opt.gtol)
        trace.append(ll)
        if np.max(np.abs(grad_cp(theta, sdata))) >= opt.gtol * (1.0 + abs(ll)) * 100:
            # quasi-Newton failure: full EM from the moment start
            th_dp, em_trace = em(sdata, cp_to_dp_theta(mom_init(sdata), sdata),
                                 max_iter=opt.full_em_iters, tol=1e-14)
            trace.extend(em_trace)
            cand = dp_to_cp_theta(th_dp, sdata)
            if _is_boundary(cand) or not abs(cand[-1]) < _GAMMA_BOUND:
                theta = np.r_[cand[:-1], np.sign(cand[-1]) * _GAMMA_BOUND]
                status = "boundary"
            else:
                theta, ll = _newton_polish(cand, sdata, opt.newton_iters, opt.gtol)
                trace.append(ll)
                ok = np.max(np.abs(grad_cp(theta, sdata))) < opt.gtol * (1.0 + abs(ll)) * 100
                status = "converged" if ok else "max_iter"

    out = _from_std(theta, c, s, j)
    shift = -data.n * np.log(s)
    return _finish(out, data, [t + shift for t in trace], status)


# -- boundary handling -----------------------------------------------------------

@dataclass(frozen=True)
class ShapeFit:
    """Shape-only fit with known location and scale."""

    alpha: float
    loglik: float
    boundary: bool


def fit_shape(y, xi=0.0, omega=1.0) -> ShapeFit:
    """Maximise ``sum zeta_0(alpha z_i)`` over ``alpha`` with ``xi``, ``omega`` known.

    The objective is concave; if every ``z_i`` has the same sign it
    increases without bound in that direction and ``alpha = +-inf``.
    """
    z = (np.asarray(y, dtype=float).ravel() - xi) / omega
    n = z.shape[0]
    base = -n * np.log(omega) - 0.5 * z @ z - 0.5 * n * _LOG_2PI
    if np.all(z > 0) or np.all(z < 0):
        sgn = 1.0 if z[0] > 0 else -1.0
        return ShapeFit(sgn * np.inf, float(base), True)

    def score(a):
        return float(z @ zeta(1, a * z))

    lo, hi = -1.0, 1.0
    while score(hi) > 0:
        hi *= 2.0
    while score(lo) < 0:
        lo *= 2.0
    a = optimize.brentq(score, lo, hi, xtol=1e-14, rtol=1e-14)
    return ShapeFit(float(a), float(base + np.sum(zeta(0, a * z))), False)


def profile_gamma1(gamma1, data: RegressionData, start=None, max_iter=500):
    """Profile loglikelihood of ``gamma1``: maximum over ``(beta, sigma)``.

    Returns ``(loglik, theta_cp)``.
    """
    if start is None:
        start = mom_init(data)
    start = np.r_[np.asarray(start, dtype=float)[:-1], gamma1]
    theta, res = _quasi_newton(start, data, max_iter, fixed=float(gamma1))
    return -float(res.fun), theta


def boundary_resolve(fit_result: FitResultUv, data: RegressionData, drop: float = 2.0):
    """Move a boundary fit inward until the loglik deficit equals ``drop``.

    The profile loglikelihood of ``gamma1`` is followed from the boundary
    toward 0. Interior fits and ``drop = 0`` return the input unchanged. If
    the deficit stays below ``drop`` all the way to ``gamma1 = 0`` the
    symmetric fit is returned with its (smaller) deficit.
    """
    if fit_result.convergence != "boundary" or drop <= 0:
        return fit_result
    sdata, c, s, j = _standardize(data)
    shift = -data.n * np.log(s)
    sup = fit_result.loglik - shift
    sgn = 1.0 if fit_result.gamma1 > 0 else -1.0
    warm = {"theta": _to_std(fit_result.cp, c, s, j)}

    def deficit(g):
        ll, th = profile_gamma1(g, sdata, start=warm["theta"])
        warm["theta"] = th
        return sup - ll, th

    d0, th0 = deficit(0.0)
    if d0 <= drop:
        theta = th0
    else:
        warm["theta"] = _to_std(fit_result.cp, c, s, j)
        g = optimize.brentq(lambda g: deficit(g)[0] - drop, 0.0, sgn * _GAMMA_BOUND,
                            xtol=1e-10)
        _, theta = deficit(g)
    out = _from_std(theta, c, s, j)
    res = _finish(out, data, fit_result.trace, "boundary_resolved")
    return replace(res, boundary_deficit=float(fit_result.loglik - res.loglik))


def lr_normality_uv(data: RegressionData, fit_result: FitResultUv | None = None) -> float:
    """``2 (l(SN fit) - l(normal fit))``, floored at 0."""
    beta, *_ = np.linalg.lstsq(data.X, data.y, rcond=None)
    e = data.y - data.X @ beta
    n = data.n
    ll0 = -0.5 * n * (_LOG_2PI + np.log(np.mean(e * e)) + 1.0)
    res = fit_result if fit_result is not None else fit(data)
    return float(max(2.0 * (res.loglik - ll0), 0.0))

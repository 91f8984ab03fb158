"""
Parametrizations of the skew-normal family and exact conversions between them.

Direct parameters (DP)
    ``Y ~ SN_k(xi, Omega, alpha)`` with density
    ``2 phi_k(y - xi; Omega) Phi(alpha' omega^{-1} (y - xi))`` where
    ``omega = sqrt(diag(Omega))``. The normalised shape pair is
    ``(Omega_bar, alpha)`` with ``Omega_bar = omega^{-1} Omega omega^{-1}``.

delta
    ``delta = Omega_bar alpha / sqrt(1 + alpha' Omega_bar alpha)``; every
    cumulant of order >= 3 is a rank-one tensor in ``omega delta``.

(lambda, Psi)
    The older parametrization of the same shape family; ``lambda_j =
    delta_j / sqrt(1 - delta_j^2)`` and ``Psi`` is a correlation matrix.

Centred parameters (CP, univariate)
    ``(mu, sigma, gamma1)``: mean, standard deviation and skewness index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg

from .errors import DimensionError, DomainError, SingularError

__all__ = [
    "SYM_TOL",
    "GAMMA1_MAX",
    "DpShape",
    "DpParams",
    "LambdaPsiParams",
    "CpParamsUv",
    "validate_correlation",
    "validate_delta",
    "dp_to_delta",
    "delta_to_alpha",
    "dp_to_lambdapsi",
    "lambdapsi_to_dp",
    "cp_to_dp_uv",
    "dp_to_cp_uv",
    "cp_convert_mv",
    "gamma1_from_delta",
    "params_to_dict",
    "params_from_dict",
]

SYM_TOL = 1e-12
_SQRT_2_PI = np.sqrt(2.0 / np.pi)
_SKEW_CONST = (4.0 - np.pi) / 2.0
# sup of |gamma1| as |alpha| -> infinity (delta -> 1)
GAMMA1_MAX = float(_SKEW_CONST * (2.0 / (np.pi - 2.0)) ** 1.5)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_symmetric(m, name):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > SYM_TOL * scale:
        raise SingularError(f"{name} is not symmetric")
    return 0.5 * (m + m.T)


def _cholesky(m, name):
    try:
        return linalg.cholesky(m, lower=True)
    except linalg.LinAlgError:
        raise SingularError(f"{name} is not positive definite") from None


def validate_correlation(m):
    """Return ``m`` as a symmetric positive-definite matrix with unit diagonal.

    Raises
    ------
    SingularError
        If ``m`` is asymmetric, has a non-unit diagonal, or fails Cholesky.
    """
    m = _check_symmetric(m, "correlation matrix")
    if np.max(np.abs(np.diag(m) - 1.0)) > SYM_TOL:
        raise SingularError("correlation matrix must have unit diagonal")
    _cholesky(m, "correlation matrix")
    return m


@dataclass(frozen=True)
class DpShape:
    """Normalised shape pair ``(Omega_bar, alpha)``; every pair is feasible."""

    omega_bar: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        ob = validate_correlation(self.omega_bar)
        al = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        if al.shape != (ob.shape[0],):
            raise DimensionError(
                f"alpha has shape {al.shape}, expected ({ob.shape[0]},)"
            )
        object.__setattr__(self, "omega_bar", _frozen(ob))
        object.__setattr__(self, "alpha", _frozen(al))

    @property
    def k(self):
        return self.alpha.shape[0]

    @cached_property
    def delta(self):
        return dp_to_delta(self)


@dataclass(frozen=True)
class DpParams:
    """Direct parameters ``(xi, Omega, alpha)`` of ``SN_k``.

    ``Omega`` is the covariance-type scale matrix. The scale vector
    ``omega``, the correlation ``omega_bar`` and the lower Cholesky factor
    of ``Omega`` are derived (and validated) at construction.
    """

    xi: np.ndarray
    Omega: np.ndarray
    alpha: np.ndarray
    omega: np.ndarray = field(init=False, repr=False)
    omega_bar: np.ndarray = field(init=False, repr=False)
    chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        Om = np.atleast_2d(np.asarray(self.Omega, dtype=float))
        al = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        k = xi.shape[0]
        if xi.ndim != 1 or Om.shape != (k, k) or al.shape != (k,):
            raise DimensionError(
                f"inconsistent shapes xi{xi.shape}, Omega{Om.shape}, alpha{al.shape}"
            )
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(Om)) and np.all(np.isfinite(al))):
            raise DomainError("parameters must be finite")
        Om = _check_symmetric(Om, "Omega")
        L = _cholesky(Om, "Omega")
        w = np.sqrt(np.diag(Om))
        ob = Om / np.outer(w, w)
        ob = 0.5 * (ob + ob.T)
        np.fill_diagonal(ob, 1.0)
        for name, val in (("xi", xi), ("Omega", Om), ("alpha", al),
                          ("omega", w), ("omega_bar", ob), ("chol", L)):
            object.__setattr__(self, name, _frozen(val))

    @classmethod
    def univariate(cls, xi, omega, alpha):
        """Scalar ``SN(xi, omega^2, alpha)`` given the scale ``omega``."""
        if not omega > 0:
            raise DomainError("omega must be positive")
        return cls([xi], [[omega * omega]], [alpha])

    @classmethod
    def from_shape(cls, shape, xi=None, omega=None):
        k = shape.k
        xi = np.zeros(k) if xi is None else xi
        w = np.ones(k) if omega is None else np.atleast_1d(np.asarray(omega, dtype=float))
        return cls(xi, shape.omega_bar * np.outer(w, w), shape.alpha)

    @property
    def k(self):
        return self.xi.shape[0]

    @cached_property
    def shape(self):
        return DpShape(self.omega_bar, self.alpha)

    @cached_property
    def delta(self):
        return dp_to_delta(self.shape)

    @cached_property
    def log_det_Omega(self):
        return 2.0 * float(np.sum(np.log(np.diag(self.chol))))

    def __eq__(self, other):
        if not isinstance(other, DpParams):
            return NotImplemented
        return (np.array_equal(self.xi, other.xi)
                and np.array_equal(self.Omega, other.Omega)
                and np.array_equal(self.alpha, other.alpha))

    __hash__ = None


@dataclass(frozen=True)
class LambdaPsiParams:
    """Shape in the ``(lambda, Psi)`` parametrization."""

    lam: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        psi = validate_correlation(self.psi)
        lam = np.atleast_1d(np.asarray(self.lam, dtype=float))
        if lam.shape != (psi.shape[0],):
            raise DimensionError("lambda and Psi dimensions disagree")
        object.__setattr__(self, "lam", _frozen(lam))
        object.__setattr__(self, "psi", _frozen(psi))


@dataclass(frozen=True)
class CpParamsUv:
    """Univariate centred parameters: mean, standard deviation, skewness."""

    mu: float
    sigma: float
    gamma1: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not abs(self.gamma1) < GAMMA1_MAX:
            raise DomainError(
                f"|gamma1| = {abs(self.gamma1)} is not below the maximum {GAMMA1_MAX}"
            )


def dp_to_delta(shape):
    """``delta = Omega_bar alpha / sqrt(1 + alpha' Omega_bar alpha)``."""
    oa = shape.omega_bar @ shape.alpha
    return oa / np.sqrt(1.0 + shape.alpha @ oa)


def validate_delta(delta, omega_bar):
    """Check ``|delta_j| < 1`` and ``Omega_bar - delta delta'`` positive definite."""
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    if delta.shape != (omega_bar.shape[0],):
        raise DimensionError("delta and Omega_bar dimensions disagree")
    if np.any(np.abs(delta) > 1.0 - SYM_TOL):
        raise DomainError("all components of delta must be below 1 in modulus")
    try:
        linalg.cholesky(omega_bar - np.outer(delta, delta), lower=True)
    except linalg.LinAlgError:
        raise DomainError("Omega_bar - delta delta' is not positive definite") from None
    return delta


def delta_to_alpha(delta, omega_bar):
    """Inverse of :func:`dp_to_delta`.

    Raises
    ------
    DomainError
        If ``1 - delta' Omega_bar^{-1} delta <= 0`` or a component of
        ``delta`` reaches 1 in modulus.
    """
    omega_bar = np.atleast_2d(np.asarray(omega_bar, dtype=float))
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    if np.any(np.abs(delta) > 1.0 - SYM_TOL):
        raise DomainError("all components of delta must be below 1 in modulus")
    c, low = linalg.cho_factor(omega_bar, lower=True)
    sol = linalg.cho_solve((c, low), delta)
    q = 1.0 - delta @ sol
    if not q > 0:
        raise DomainError("1 - delta' Omega_bar^{-1} delta must be positive")
    return sol / np.sqrt(q)


def dp_to_lambdapsi(shape):
    d = dp_to_delta(shape)
    s = np.sqrt(1.0 - d * d)
    lam = d / s
    psi = (shape.omega_bar - np.outer(d, d)) / np.outer(s, s)
    psi = 0.5 * (psi + psi.T)
    np.fill_diagonal(psi, 1.0)
    return LambdaPsiParams(lam, psi)


def lambdapsi_to_dp(lp):
    lam, psi = lp.lam, lp.psi
    dg = 1.0 / np.sqrt(1.0 + lam * lam)
    ob = np.outer(dg, dg) * (psi + np.outer(lam, lam))
    ob = 0.5 * (ob + ob.T)
    np.fill_diagonal(ob, 1.0)
    psi_inv_lam = linalg.solve(psi, lam, assume_a="pos")
    alpha = psi_inv_lam / dg / np.sqrt(1.0 + lam @ psi_inv_lam)
    return DpShape(ob, alpha)


def gamma1_from_delta(delta):
    """Univariate skewness index as a function of scalar ``delta``."""
    mu_z = _SQRT_2_PI * np.asarray(delta, dtype=float)
    return _SKEW_CONST * (mu_z / np.sqrt(1.0 - mu_z * mu_z)) ** 3


def cp_to_dp_uv(cp):
    """Centred to direct parameters, ``k = 1``.

    Inverts the skewness map in closed form: with ``R = mu_z / sigma_z =
    cbrt(2 gamma1 / (4 - pi))`` and ``T = sqrt(2/pi - (1 - 2/pi) R^2)`` the
    shape is ``alpha = R / T``.
    """
    if not abs(cp.gamma1) < GAMMA1_MAX:
        raise DomainError(f"|gamma1| must be below {GAMMA1_MAX}")
    R = np.cbrt(cp.gamma1 / _SKEW_CONST)
    T2 = 2.0 / np.pi - (1.0 - 2.0 / np.pi) * R * R
    if not T2 > 0:
        raise DomainError(f"|gamma1| must be below {GAMMA1_MAX}")
    alpha = R / np.sqrt(T2)
    mu_z = R / np.sqrt(1.0 + R * R)
    sigma_z = 1.0 / np.sqrt(1.0 + R * R)
    omega = cp.sigma / sigma_z
    xi = cp.mu - omega * mu_z
    return DpParams.univariate(float(xi), float(omega), float(alpha))


def dp_to_cp_uv(dp):
    if dp.k != 1:
        raise DimensionError("dp_to_cp_uv needs a univariate DpParams")
    delta = float(dp.delta[0])
    mu_z = _SQRT_2_PI * delta
    sigma_z = np.sqrt(1.0 - mu_z * mu_z)
    omega = float(dp.omega[0])
    return CpParamsUv(
        mu=float(dp.xi[0] + omega * mu_z),
        sigma=float(omega * sigma_z),
        gamma1=float(_SKEW_CONST * (mu_z / sigma_z) ** 3),
    )


def cp_convert_mv(dp):
    """Componentwise centred parameters of each univariate margin."""
    from .transform import marginal

    return [dp_to_cp_uv(marginal(dp, [j])) for j in range(dp.k)]


# -- JSON interchange -------------------------------------------------------

def params_to_dict(dp, parametrization="dp"):
    """Serialise ``dp`` in the requested parametrization.

    ``"dp"`` gives ``{"xi", "Omega", "alpha"}``; ``"lambda_psi"`` gives
    ``{"xi", "omega", "lambda", "Psi"}``; ``"cp"`` gives componentwise
    ``{"mu", "sigma", "gamma1"}`` lists (exactly invertible only for k = 1).
    """
    if parametrization == "dp":
        out = {"xi": dp.xi.tolist(), "Omega": dp.Omega.tolist(), "alpha": dp.alpha.tolist()}
    elif parametrization == "lambda_psi":
        lp = dp_to_lambdapsi(dp.shape)
        out = {"xi": dp.xi.tolist(), "omega": dp.omega.tolist(),
               "lambda": lp.lam.tolist(), "Psi": lp.psi.tolist()}
    elif parametrization == "cp":
        cps = cp_convert_mv(dp)
        out = {"mu": [c.mu for c in cps], "sigma": [c.sigma for c in cps],
               "gamma1": [c.gamma1 for c in cps]}
    else:
        raise ValueError(f"unknown parametrization {parametrization!r}")
    return {"parametrization": parametrization, **out}


def params_from_dict(d):
    """Inverse of :func:`params_to_dict`; the tag defaults to ``"dp"``."""
    kind = d.get("parametrization", "dp")
    try:
        if kind == "dp":
            return DpParams(d["xi"], d["Omega"], d["alpha"])
        if kind == "lambda_psi":
            shape = lambdapsi_to_dp(LambdaPsiParams(d["lambda"], d["Psi"]))
            return DpParams.from_shape(shape, xi=d["xi"], omega=d["omega"])
        if kind == "cp":
            mu, sigma, g1 = (np.atleast_1d(d[key]) for key in ("mu", "sigma", "gamma1"))
            if mu.shape != (1,) or sigma.shape != (1,) or g1.shape != (1,):
                raise DimensionError("centred parameters are only invertible for k = 1")
            return cp_to_dp_uv(CpParamsUv(float(mu[0]), float(sigma[0]), float(g1[0])))
    except KeyError as exc:
        raise DimensionError(f"missing field {exc.args[0]!r} for {kind!r} parameters") from None
    raise ValueError(f"unknown parametrization {kind!r}")

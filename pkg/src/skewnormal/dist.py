"""Density, cumulant generating function, moments and shape indices of SN_k."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DimensionError
from .kernels import half_normal_cumulant, zeta
from .param import DpParams

__all__ = [
    "MomentSummary",
    "logpdf",
    "pdf",
    "cgf",
    "moments",
    "cumulant_array",
    "alpha_star",
    "mardia_indices",
    "as_points",
]

_LOG_2PI = np.log(2.0 * np.pi)
_SQRT_2_PI = np.sqrt(2.0 / np.pi)


@dataclass(frozen=True)
class MomentSummary:
    mean: np.ndarray
    variance: np.ndarray
    mardia_gamma1: float
    mardia_gamma2: float


def as_points(dp, y):
    """Coerce ``y`` to an ``(n, k)`` array; report whether it was a single point.

    For ``k = 1`` a flat array is read as ``n`` scalar observations; for
    ``k > 1`` a flat array of length ``k`` is a single point.
    """
    y = np.asarray(y, dtype=float)
    k = dp.k
    if y.ndim == 0:
        if k != 1:
            raise DimensionError(f"scalar point given for k = {k}")
        return y.reshape(1, 1), True
    if y.ndim == 1:
        if k == 1:
            return y.reshape(-1, 1), False
        if y.shape[0] != k:
            raise DimensionError(f"point has length {y.shape[0]}, expected {k}")
        return y.reshape(1, k), True
    if y.ndim != 2 or y.shape[1] != k:
        raise DimensionError(f"data have shape {y.shape}, expected (n, {k})")
    return y, False


def logpdf(dp: DpParams, y):
    """Log density ``log 2 + log phi_k(y - xi; Omega) + log Phi(alpha' omega^{-1}(y - xi))``."""
    pts, single = as_points(dp, y)
    r = pts - dp.xi
    w = linalg.solve_triangular(dp.chol, r.T, lower=True)
    log_phi = -0.5 * np.sum(w * w, axis=0) - 0.5 * dp.log_det_Omega - 0.5 * dp.k * _LOG_2PI
    out = log_phi + zeta(0, r @ (dp.alpha / dp.omega))
    return float(out[0]) if single else out


def pdf(dp: DpParams, y):
    return np.exp(logpdf(dp, y))


def cgf(dp: DpParams, t):
    """``K(t) = t'xi + t'Omega t / 2 + log(2 Phi(delta' omega t))``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (dp.k,):
        raise DimensionError(f"t has shape {t.shape}, expected ({dp.k},)")
    return float(t @ dp.xi + 0.5 * t @ dp.Omega @ t + zeta(0, dp.delta @ (dp.omega * t)))


def _q_index(alpha_star_sq):
    # mu_z' Sigma_bar^{-1} mu_z as a function of a = alpha' Omega_bar alpha
    a = alpha_star_sq
    return 2.0 * a / (np.pi + (np.pi - 2.0) * a)


def mardia_indices(alpha_star_value):
    """Mardia skewness and excess kurtosis for a given ``alpha_star``.

    Both depend on the parameters only through ``alpha_star``.
    """
    q = _q_index(float(alpha_star_value) ** 2)
    g1 = ((4.0 - np.pi) / 2.0) ** 2 * q ** 3
    g2 = 2.0 * (np.pi - 3.0) * q ** 2
    return float(g1), float(g2)


def moments(dp: DpParams):
    """Mean, variance and Mardia indices of ``SN_k(xi, Omega, alpha)``."""
    mu_y = dp.omega * (_SQRT_2_PI * dp.delta)
    mean = dp.xi + mu_y
    var = dp.Omega - np.outer(mu_y, mu_y)
    g1, g2 = mardia_indices(alpha_star(dp))
    return MomentSummary(mean=mean, variance=0.5 * (var + var.T), mardia_gamma1=g1,
                         mardia_gamma2=g2)


def cumulant_array(dp: DpParams, order: int):
    """Symmetric array of cumulants of order 3 or 4.

    All such cumulants have the rank-one form ``kappa_m^V (omega delta)^{(x) m}``.
    """
    if order not in (3, 4):
        raise ValueError("order must be 3 or 4")
    v = dp.omega * dp.delta
    arr = half_normal_cumulant(order) * v
    for _ in range(order - 1):
        arr = np.multiply.outer(arr, v)
    return arr


def alpha_star(dp):
    """``sqrt(alpha' Omega_bar alpha)``; accepts a DpParams or a DpShape."""
    return float(np.sqrt(max(dp.alpha @ dp.omega_bar @ dp.alpha, 0.0)))

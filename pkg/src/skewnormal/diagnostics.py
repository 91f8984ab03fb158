"""Goodness-of-fit diagnostics built on Mahalanobis distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .param import DpParams, cp_convert_mv
from .transform import mahalanobis

__all__ = ["HealyData", "chi2_cdf", "healy", "healy_fit", "fit_report", "sample_mardia"]


def chi2_cdf(x, k):
    """chi-square distribution function via the regularized incomplete gamma."""
    return special.gammainc(0.5 * k, 0.5 * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class HealyData:
    """Both plot variants.

    ``sorted_probs`` against ``nominal`` (``i/n``) is the probability plot;
    ``sorted_distances`` against ``chi2_quantiles`` is the QQ plot.
    """

    sorted_probs: np.ndarray
    nominal: np.ndarray
    max_abs_dev: float
    sorted_distances: np.ndarray
    chi2_quantiles: np.ndarray

    def rows(self, variant="cdf"):
        if variant == "cdf":
            return np.column_stack([self.nominal, self.sorted_probs])
        if variant == "qq":
            return np.column_stack([self.chi2_quantiles, self.sorted_distances])
        raise ValueError(f"unknown variant {variant!r}")


def healy(dp: DpParams, y, locations=None) -> HealyData:
    """Healy-type diagnostic for a fitted ``SN_k``.

    ``locations`` optionally gives per-row locations (regression fits).
    """
    d = np.atleast_1d(mahalanobis(dp, y, locations))
    n, k = d.shape[0], dp.k
    ds = np.sort(d)
    probs = chi2_cdf(ds, k)
    nominal = np.arange(1, n + 1) / n
    q = stats.chi2.ppf((np.arange(1, n + 1) - 0.5) / n, k)
    return HealyData(probs, nominal, float(np.max(np.abs(probs - nominal))), ds, q)


def healy_fit(fit, data) -> HealyData:
    """Healy diagnostic for a FitResultMv on its data."""
    loc = data.X @ fit.beta
    return healy(DpParams(loc[0], fit.Omega, fit.alpha), data.y, loc)


def fit_report(fit, data) -> dict:
    """JSON-serialisable summary of a multivariate fit."""
    from .fit_mv import lr_normality_mv

    lr = lr_normality_mv(data, fit)
    h = healy_fit(fit, data)
    cps = cp_convert_mv(DpParams(np.zeros(data.k), fit.Omega, fit.alpha))
    return {
        "loglik": float(fit.loglik),
        "convergence": fit.convergence,
        "boundary": bool(fit.boundary),
        "lr_normality": {"statistic": lr.statistic, "df": lr.df, "p_value": lr.p_value},
        "healy_max_abs_dev": h.max_abs_dev,
        "gamma1": [float(c.gamma1) for c in cps],
    }


def sample_mardia(y):
    """Sample Mardia skewness ``b_1`` and excess kurtosis ``b_2 - k(k + 2)``."""
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    n, k = y.shape
    u = y - y.mean(axis=0)
    L = np.linalg.cholesky(u.T @ u / n)
    w = np.linalg.solve(L, u.T).T
    # sum_ij (w_i'w_j)^3 / n^2 equals the squared norm of the third-moment tensor
    m3 = np.einsum("ia,ib,ic->abc", w, w, w) / n
    b1 = float(np.sum(m3 * m3))
    b2 = float(np.mean(np.sum(w * w, axis=1) ** 2))
    return b1, b2 - k * (k + 2)

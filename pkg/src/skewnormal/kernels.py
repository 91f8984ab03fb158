"""
Scalar special functions used throughout the package.

``zeta(m, x)`` is the m-th derivative of ``zeta_0(x) = log(2 Phi(x))``.
All functions are vectorised over ``x``.

Evaluation strategy
-------------------
Above the crossover the inverse Mills ratio ``zeta_1 = phi/Phi`` comes
from ``log_ndtr`` and the higher orders follow from the recurrences

    zeta_2 = -zeta_1 (x + zeta_1)
    zeta_3 = -zeta_2 (x + zeta_1) - zeta_1 (1 + zeta_2)
    zeta_4 = -zeta_3 (x + 2 zeta_1) - 2 zeta_2 (1 + zeta_2)

Below it, ``h(x) = x + zeta_1(x)`` (the quantity that cancels in the left
tail) and its derivative come from the continued fraction of the Mills
ratio, evaluated in long double. The recurrences lose roughly two digits
per unit of |x| for orders 3 and 4, hence the higher crossover for m >= 2.
"""

import numpy as np
from scipy import special

__all__ = [
    "norm_pdf",
    "norm_cdf",
    "norm_logpdf",
    "norm_logcdf",
    "zeta",
    "half_normal_cumulant",
    "TAIL_CROSSOVER",
]

TAIL_CROSSOVER = -10.0
_HIGHER_ORDER_CROSSOVER = -2.0
_CF_TERMS = 200
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG2 = np.log(2.0)


def norm_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x - _LOG_SQRT_2PI)


def norm_logpdf(x):
    x = np.asarray(x, dtype=float)
    return -0.5 * x * x - _LOG_SQRT_2PI


def norm_cdf(x):
    """Standard normal distribution function (erfc based, accurate in both tails)."""
    return special.ndtr(np.asarray(x, dtype=float))


def norm_logcdf(x):
    return special.log_ndtr(np.asarray(x, dtype=float))


def _tail_g(t):
    """Continued fraction g(t) = 2/(t + 3/(t + 4/(t + ...))) in long double.

    With ``t = -x`` the Mills-ratio expansion gives ``h = 1/(t + g)``.
    """
    t = np.asarray(t, dtype=np.longdouble)
    acc = np.zeros_like(t)
    for j in range(_CF_TERMS, 1, -1):
        acc = j / (t + acc)
    return acc


def _zeta_body(x, m):
    """Recurrences in terms of zeta_1."""
    z1 = np.exp(norm_logpdf(x) - norm_logcdf(x)).astype(np.longdouble)
    xl = x.astype(np.longdouble)
    if m == 1:
        return z1
    z2 = -z1 * (xl + z1)
    if m == 2:
        return z2
    z3 = -z2 * (xl + z1) - z1 * (1 + z2)
    if m == 3:
        return z3
    return -z3 * (xl + 2 * z1) - 2 * z2 * (1 + z2)


def _zeta_tail(x, m):
    """Left-tail forms built on h = x + zeta_1 and h' = 1 + zeta_2."""
    t = -x.astype(np.longdouble)
    g = _tail_g(t)
    h = 1 / (t + g)
    if m == 1:
        return t + h
    # 1 - h (t + h) rewritten to avoid cancellation
    dh = (g * (t + g) - 1) / (t + g) ** 2
    if m == 2:
        return dh - 1
    d2h = h - (t + 2 * h) * dh
    if m == 3:
        return d2h
    return 2 * dh - 2 * dh * dh - (t + 2 * h) * d2h


def zeta(m, x):
    """Derivatives of ``log(2 Phi(x))``.

    Parameters
    ----------
    m : int
        Order, 0 to 4.
    x : array_like
        Evaluation points.

    Returns
    -------
    ndarray or float
        ``zeta_m(x)``, same shape as ``x``.
    """
    if m not in (0, 1, 2, 3, 4):
        raise ValueError(f"zeta order must be in 0..4, got {m!r}")
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)

    if m == 0:
        out = _LOG2 + norm_logcdf(x_arr)
    else:
        out = np.empty(x_arr.shape, dtype=float)
        cross = TAIL_CROSSOVER if m == 1 else _HIGHER_ORDER_CROSSOVER
        body = x_arr >= cross
        if np.any(body):
            out[body] = _zeta_body(x_arr[body], m)
        if not np.all(body):
            out[~body] = _zeta_tail(x_arr[~body], m)
    return float(out[0]) if scalar else out


def half_normal_cumulant(m):
    """Cumulant of order ``m`` (1..4) of ``|U|``, ``U ~ N(0, 1)``."""
    b = np.sqrt(2.0 / np.pi)
    table = {
        1: b,
        2: 1.0 - 2.0 / np.pi,
        3: b * (4.0 / np.pi - 1.0),
        4: 4.0 * (2.0 - 6.0 / np.pi) / np.pi,
    }
    if m not in table:
        raise ValueError(f"half-normal cumulant order must be in 1..4, got {m!r}")
    return float(table[m])

"""
Discrimination between skew-normal populations sharing ``(Omega, alpha)``.

The likelihood rule allocates to ``argmax_i log pi_i + log f_i(y)``; the
Fisher rule uses the linear scores built from the exact SN means
``xi_i + omega mu_z`` and the common covariance ``Omega - omega mu_z mu_z'
omega``. Ties go to the lowest group index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .dist import logpdf, moments
from .errors import DimensionError, DomainError, GroupCountError
from .param import DpParams
from .sample import SeededStream, rvs_sn
from .transform import affine

__all__ = [
    "DiscrimModel",
    "GeometrySummary",
    "LinearityConditions",
    "McResult",
    "Table1Config",
    "Table1Row",
    "classify_likelihood",
    "classify_fisher",
    "fisher_coefficients",
    "geometry",
    "linearity_conditions",
    "misclassification_exact_fisher",
    "misclassification_mc",
    "table1_geometry",
    "table1_sweep",
    "train",
    "confusion_matrix",
]

_TOL = 1e-10


@dataclass(frozen=True)
class DiscrimModel:
    """Group locations (``g x k``), shared ``Omega`` and ``alpha``, priors."""

    locations: np.ndarray
    Omega: np.ndarray
    alpha: np.ndarray
    priors: np.ndarray | None = None

    def __post_init__(self):
        loc = np.atleast_2d(np.asarray(self.locations, dtype=float))
        g, k = loc.shape
        if g < 2:
            raise GroupCountError("need at least two groups")
        pri = np.full(g, 1.0 / g) if self.priors is None else np.asarray(self.priors, dtype=float)
        if pri.shape != (g,):
            raise DimensionError("one prior per group is required")
        if np.any(pri <= 0) or abs(pri.sum() - 1.0) > 1e-12:
            raise DomainError("priors must be positive and sum to 1")
        # validates Omega and alpha
        DpParams(loc[0], self.Omega, self.alpha)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "Omega", np.atleast_2d(np.asarray(self.Omega, dtype=float)))
        object.__setattr__(self, "alpha", np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        object.__setattr__(self, "priors", pri)

    @property
    def g(self):
        return self.locations.shape[0]

    @property
    def k(self):
        return self.locations.shape[1]

    def group(self, i) -> DpParams:
        return DpParams(self.locations[i], self.Omega, self.alpha)

    def to_dict(self):
        return {"locations": self.locations.tolist(), "Omega": self.Omega.tolist(),
                "alpha": self.alpha.tolist(), "priors": self.priors.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["locations"], d["Omega"], d["alpha"], d.get("priors"))


def _points(model, y):
    y = np.asarray(y, dtype=float)
    if y.ndim == 1 and model.k > 1:
        if y.shape[0] != model.k:
            raise DimensionError(f"point has length {y.shape[0]}, expected {model.k}")
        return y[None, :], True
    if y.ndim <= 1:
        return y.reshape(-1, 1), y.ndim == 0
    if y.shape[1] != model.k:
        raise DimensionError(f"data have {y.shape[1]} columns, expected {model.k}")
    return y, False


def _argmax(scores, single):
    out = np.argmax(scores, axis=1)
    return int(out[0]) if single else out


def likelihood_scores(model: DiscrimModel, y):
    pts, _ = _points(model, y)
    return np.column_stack([np.log(model.priors[i]) + logpdf(model.group(i), pts)
                            for i in range(model.g)])


def classify_likelihood(model: DiscrimModel, y):
    """Group index (0-based) maximising ``log pi_i + log f_i(y)``."""
    pts, single = _points(model, y)
    return _argmax(likelihood_scores(model, pts), single)


def fisher_coefficients(model: DiscrimModel):
    """Linear score coefficients ``(W, c)``: score_i(y) = ``y' W[:, i] + c[i]``."""
    mom = moments(model.group(0))
    shift = mom.mean - model.locations[0]
    means = model.locations + shift
    W = linalg.solve(mom.variance, means.T, assume_a="pos")
    c = -0.5 * np.sum(means.T * W, axis=0) + np.log(model.priors)
    return W, c


def classify_fisher(model: DiscrimModel, y):
    pts, single = _points(model, y)
    W, c = fisher_coefficients(model)
    return _argmax(pts @ W + c, single)


@dataclass(frozen=True)
class GeometrySummary:
    """Cosines of the angles of ``omega^{-1} alpha`` with ``d`` and with ``Omega^{-1} d``."""

    cos_theta1: float
    cos_theta2: float


def _cos(a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def geometry(model: DiscrimModel) -> GeometrySummary:
    if model.g != 2:
        raise GroupCountError("geometry is defined for two groups")
    d = model.locations[0] - model.locations[1]
    a = model.alpha / np.sqrt(np.diag(model.Omega))
    return GeometrySummary(_cos(a, d), _cos(a, linalg.solve(model.Omega, d, assume_a="pos")))


@dataclass(frozen=True)
class LinearityConditions:
    eq19: bool
    eq20: bool
    c: float | None


def linearity_conditions(model: DiscrimModel) -> LinearityConditions:
    """Orthogonality ``d' omega^{-1} alpha = 0`` and proportionality
    ``omega^{-1} alpha = c Omega^{-1} d`` with ``c != 0``."""
    if model.g != 2:
        raise GroupCountError("linearity conditions are defined for two groups")
    d = model.locations[0] - model.locations[1]
    a = model.alpha / np.sqrt(np.diag(model.Omega))
    scale = max(1.0, float(np.linalg.norm(d) * np.linalg.norm(a)))
    eq19 = abs(float(d @ a)) <= _TOL * scale
    v = linalg.solve(model.Omega, d, assume_a="pos")
    vv = float(v @ v)
    c = float(a @ v) / vv if vv > 0 else 0.0
    resid = np.linalg.norm(a - c * v)
    eq20 = vv > 0 and abs(c) > _TOL and resid <= _TOL * max(1.0, float(np.linalg.norm(a)))
    return LinearityConditions(bool(eq19), bool(eq20), c if eq20 else None)


def _sn_cdf(dp: DpParams, t):
    """``P(X <= t)`` for scalar SN by adaptive quadrature of the density."""
    xi, w = float(dp.xi[0]), float(dp.omega[0])

    def f(x):
        return float(np.exp(logpdf(dp, np.array([x]))[0]))

    # split at the location so quad sees the bulk of the mass
    if t <= xi:
        val, _ = integrate.quad(f, -np.inf, t, epsabs=1e-10, epsrel=1e-10, limit=200)
        return val
    left, _ = integrate.quad(f, -np.inf, xi, epsabs=1e-10, epsrel=1e-10, limit=200)
    mid, _ = integrate.quad(f, xi, t, epsabs=1e-10, epsrel=1e-10, limit=200,
                            points=[xi + w * s for s in (1.0, 2.0, 4.0) if xi + w * s < t])
    return left + mid


def misclassification_exact_fisher(model: DiscrimModel):
    """Error probabilities ``(p_1F, p_2F)`` of the Fisher rule, two groups.

    The rule reads ``a'y >= t`` for group 1; ``a'Y`` is scalar SN under each
    population, so each error is a univariate SN tail probability.
    """
    if model.g != 2:
        raise GroupCountError("exact Fisher errors are defined for two groups")
    W, c = fisher_coefficients(model)
    a = W[:, 0] - W[:, 1]
    t = c[1] - c[0]
    p1 = _sn_cdf(affine(model.group(0), a), t)
    p2 = 1.0 - _sn_cdf(affine(model.group(1), a), t)
    return np.array([p1, p2])


@dataclass(frozen=True)
class McResult:
    """Monte Carlo error rates per group for each rule, with binomial SEs.

    ``agreement`` is the fraction of pooled draws allocated identically by
    the two rules.
    """

    errors: dict
    se: dict
    agreement: float
    n_rep: int


def misclassification_mc(model: DiscrimModel, n_rep: int, seed: int, rule: str = "both"):
    """Simulate ``n_rep`` draws per group (group ``i`` uses stream id ``i``)."""
    if n_rep < 1:
        raise DomainError("n_rep must be at least 1")
    rules = ("likelihood", "fisher") if rule == "both" else (rule,)
    for r in rules:
        if r not in ("likelihood", "fisher"):
            raise ValueError(f"unknown rule {r!r}")
    errs = {r: np.empty(model.g) for r in rules}
    agree = 0
    for i in range(model.g):
        y = rvs_sn(model.group(i), n_rep, SeededStream(seed, i))
        alloc = {}
        if "likelihood" in rules:
            alloc["likelihood"] = classify_likelihood(model, y)
        if "fisher" in rules:
            alloc["fisher"] = classify_fisher(model, y)
        for r in rules:
            errs[r][i] = np.mean(alloc[r] != i)
        if len(rules) == 2:
            agree += int(np.sum(alloc["likelihood"] == alloc["fisher"]))
    se = {r: np.sqrt(e * (1.0 - e) / n_rep) for r, e in errs.items()}
    agreement = agree / (model.g * n_rep) if len(rules) == 2 else float("nan")
    return McResult(errs, se, float(agreement), n_rep)


@dataclass(frozen=True)
class Table1Config:
    """Two-group sweep: equal priors, ``omega = I``, ``alpha = (3, 3)``,
    correlation ``rho``, unit distance between the locations."""

    rho: float = 0.4
    alpha: tuple = (3.0, 3.0)
    distance: float = 1.0
    n_rows: int = 17
    n_rep: int = 100_000
    seed: int = 1


@dataclass(frozen=True)
class Table1Row:
    p1L: float
    p1F: float
    p2L: float
    p2F: float
    pstar: float
    cos_theta1: float
    cos_theta2: float

    def as_tuple(self):
        return (self.p1L, self.p1F, self.p2L, self.p2F, self.pstar,
                self.cos_theta1, self.cos_theta2)


TABLE1_HEADER = ("p1L", "p1F", "p2L", "p2F", "pstar", "cos_theta1", "cos_theta2")


def table1_geometry(config: Table1Config, j: int) -> DiscrimModel:
    """Model for row ``j``: ``xi_1 = 0`` and ``xi_2 = u``, where ``u`` makes the
    angle ``pi j / (n_rows - 1)`` with ``alpha``."""
    Om = np.array([[1.0, config.rho], [config.rho, 1.0]])
    alpha = np.asarray(config.alpha, dtype=float)
    e = alpha / np.linalg.norm(alpha)
    e_perp = np.array([-e[1], e[0]])
    ang = np.pi * j / (config.n_rows - 1)
    u = config.distance * (np.cos(ang) * e + np.sin(ang) * e_perp)
    return DiscrimModel(np.vstack([np.zeros(2), u]), Om, alpha)


def table1_sweep(config: Table1Config | None = None):
    """Rows of the two-group comparison table.

    Fisher columns are exact; likelihood columns and the agreement rate
    are Monte Carlo with ``n_rep`` draws per population. The cosine
    columns follow the published layout: with ``u = xi_2 - xi_1`` they are
    the cosines of ``alpha`` with ``Omega^{-1} u`` and with ``u``, i.e.
    ``geometry()`` of the row model with the sign flipped and the two
    entries exchanged.
    """
    cfg = config or Table1Config()
    rows = []
    for j in range(cfg.n_rows):
        model = table1_geometry(cfg, j)
        pF = misclassification_exact_fisher(model)
        mc = misclassification_mc(model, cfg.n_rep, cfg.seed + j)
        geo = geometry(model)
        rows.append(Table1Row(float(mc.errors["likelihood"][0]), float(pF[0]),
                              float(mc.errors["likelihood"][1]), float(pF[1]),
                              mc.agreement, -geo.cos_theta2, -geo.cos_theta1))
    return rows


def confusion_matrix(true, predicted, g):
    """``C[i, j]`` counts units of group ``j`` allocated to group ``i``."""
    C = np.zeros((g, g), dtype=int)
    np.add.at(C, (np.asarray(predicted), np.asarray(true)), 1)
    return C


def train(y, labels, X=None, priors=None, options=None):
    """Fit common ``(Omega, alpha)`` and group locations through a
    group-indicator design.

    Returns ``(model, fit, groups)`` where ``groups`` lists the label of
    each model group in order.
    """
    from .fit_mv import MvRegressionData, fit_mv

    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    labels = np.asarray(labels)
    groups = sorted(set(labels.tolist()))
    g, k = len(groups), y.shape[1]
    if g < 2:
        raise GroupCountError("need at least two groups")
    counts = np.array([np.sum(labels == lab) for lab in groups])
    if np.any(counts < k + 1):
        raise DimensionError("each group needs at least k + 1 observations")
    D = np.column_stack([(labels == lab).astype(float) for lab in groups])
    res = fit_mv(MvRegressionData(y, D), options)
    pri = counts / counts.sum() if priors is None else np.asarray(priors, dtype=float)
    model = DiscrimModel(res.beta, res.Omega, res.alpha, pri)
    return model, res, groups

"""
Margins, linear maps, canonical form, independence and quadratic forms,
and conditional distributions of skew-normal vectors.

Matrix conventions follow the density parametrization: a linear map is
written ``X = A' Y`` with ``A`` of size ``k x h``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .dist import as_points, cumulant_array, moments
from .errors import DimensionError, DomainError, RankError
from .kernels import half_normal_cumulant, norm_logcdf, zeta
from .param import DpParams, delta_to_alpha, validate_delta

__all__ = [
    "ALGEBRAIC_TOL",
    "marginal",
    "affine",
    "canonical",
    "IndependenceResult",
    "independent_blocks",
    "chi2_projector",
    "quadratic_form_is_chi2",
    "quad_forms_independent",
    "FisherCochranResult",
    "fisher_cochran",
    "ConditionalLaw",
    "conditional_exact",
    "SnApproximation",
    "conditional_sn_approx",
    "mahalanobis",
]

ALGEBRAIC_TOL = 1e-10
_SQRT_2_PI = np.sqrt(2.0 / np.pi)


def _is_zero(m, scale=1.0):
    return float(np.max(np.abs(m), initial=0.0)) <= ALGEBRAIC_TOL * max(1.0, scale)


def _split(k, indices):
    idx = [int(i) for i in np.atleast_1d(indices)]
    if not idx:
        raise IndexError("index set must be nonempty")
    if len(set(idx)) != len(idx):
        raise IndexError("repeated indices")
    for i in idx:
        if not 0 <= i < k:
            raise IndexError(f"index {i} out of range for k = {k}")
    rest = [j for j in range(k) if j not in idx]
    return idx, rest


def marginal(dp: DpParams, indices) -> DpParams:
    """Distribution of the components ``indices`` (in the given order)."""
    i1, i2 = _split(dp.k, indices)
    al = dp.alpha
    if not i2:
        return DpParams(dp.xi[i1], dp.Omega[np.ix_(i1, i1)], al[i1])
    ob = dp.omega_bar
    o11, o12, o22 = ob[np.ix_(i1, i1)], ob[np.ix_(i1, i2)], ob[np.ix_(i2, i2)]
    sol = linalg.solve(o11, o12, assume_a="pos")
    o22_1 = o22 - o12.T @ sol
    a2 = al[i2]
    abar1 = (al[i1] + sol @ a2) / np.sqrt(1.0 + a2 @ o22_1 @ a2)
    return DpParams(dp.xi[i1], dp.Omega[np.ix_(i1, i1)], abar1)


def affine(dp: DpParams, A, shift=None) -> DpParams:
    """Law of ``shift + A' Y`` for a ``k x h`` matrix ``A``.

    Raises
    ------
    RankError
        If ``A' Omega A`` is singular.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.shape[0] != dp.k:
        raise DimensionError(f"A has {A.shape[0]} rows, expected {dp.k}")
    Om_x = A.T @ dp.Omega @ A
    Om_x = 0.5 * (Om_x + Om_x.T)
    try:
        cf = linalg.cho_factor(Om_x, lower=True)
    except linalg.LinAlgError:
        raise RankError("A' Omega A is singular") from None
    if np.linalg.cond(Om_x) > 1e12:
        raise RankError("A' Omega A is numerically singular")
    w_x = np.sqrt(np.diag(Om_x))
    B = (dp.Omega @ A) / dp.omega[:, None]
    OinvBt = linalg.cho_solve(cf, B.T)
    resid = dp.omega_bar - B @ OinvBt
    denom = np.sqrt(1.0 + max(float(dp.alpha @ resid @ dp.alpha), 0.0))
    alpha_x = w_x * (OinvBt @ dp.alpha) / denom
    xi_x = A.T @ dp.xi
    if shift is not None:
        xi_x = xi_x + np.asarray(shift, dtype=float)
    return DpParams(xi_x, Om_x, alpha_x)


def canonical(shape):
    """Linear map to the canonical form.

    Returns ``(A_star, alpha_star_vec)`` such that ``A_star Z ~ SN_k(I,
    alpha_star_vec)`` when ``Z ~ SN_k(Omega_bar, alpha)``; only the first
    component of ``alpha_star_vec`` can be nonzero. Accepts a DpShape or a
    DpParams (in which case ``Z`` is the standardised variable).
    """
    ob, al = shape.omega_bar, shape.alpha
    k = al.shape[0]
    L = linalg.cholesky(ob, lower=True)
    L_inv = linalg.solve_triangular(L, np.eye(k), lower=True)
    v = L.T @ al
    nv = float(np.linalg.norm(v))
    H = np.eye(k)
    if nv > 0:
        u = np.eye(k)[0] - v / nv
        uu = float(u @ u)
        if uu > 1e-30:
            H = H - 2.0 * np.outer(u, u) / uu
    A_star = H @ L_inv
    a_star = np.zeros(k)
    a_star[0] = nv
    return A_star, a_star


@dataclass(frozen=True)
class IndependenceResult:
    independent: bool
    orthogonal_blocks: bool
    skewed_blocks: int
    block_params: list = field(default_factory=list)


def independent_blocks(shape, A, partition) -> IndependenceResult:
    """Block independence of ``Y = A' Z`` for ``Z ~ SN_k(Omega_bar, alpha)``.

    Independent iff ``A_i' Omega_bar A_j = 0`` for all ``i != j`` and
    ``A_i' Omega_bar alpha != 0`` for at most one block. ``block_params``
    holds the marginal law of each block.
    """
    ob, al = shape.omega_bar, shape.alpha
    A = np.asarray(A, dtype=float)
    blocks = [list(np.atleast_1d(b).astype(int)) for b in partition]
    flat = sorted(i for b in blocks for i in b)
    if not blocks or any(len(b) == 0 for b in blocks) or flat != list(range(A.shape[1])):
        raise ValueError("partition must split the columns of A into nonempty disjoint blocks")
    M = A.T @ ob @ A
    scale = float(np.max(np.abs(M)))
    orth = all(
        _is_zero(M[np.ix_(bi, bj)], scale)
        for i, bi in enumerate(blocks) for j, bj in enumerate(blocks) if i < j
    )
    v = A.T @ ob @ al
    vscale = float(np.linalg.norm(A, 2) * np.linalg.norm(al))
    skewed = sum(not _is_zero(v[b], vscale) for b in blocks)
    base = DpParams(np.zeros(al.shape[0]), ob, al)
    params = [affine(base, A[:, b]) for b in blocks]
    return IndependenceResult(orth and skewed <= 1, orth, skewed, params)


def chi2_projector(C, omega_bar):
    """``C (C' Omega_bar C)^{-1} C'`` for a full-rank ``k x p`` matrix ``C``."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape[0] != omega_bar.shape[0]:
        C = C.T
    if np.linalg.matrix_rank(C) != C.shape[1]:
        raise RankError("C must have full column rank")
    G = C.T @ omega_bar @ C
    B = C @ linalg.solve(G, C.T, assume_a="pos")
    return 0.5 * (B + B.T)


def quadratic_form_is_chi2(shape, B):
    """Degrees of freedom ``p`` if ``Z'BZ ~ chi2_p`` via ``B Omega_bar B = B``, else None."""
    B = np.asarray(B, dtype=float)
    ob = shape.omega_bar
    if not _is_zero(B @ ob @ B - B, float(np.max(np.abs(B), initial=0.0))):
        return None
    if _is_zero(B):
        return 0
    return int(np.linalg.matrix_rank(B, tol=1e-8 * float(np.linalg.norm(B, 2))))


def quad_forms_independent(shape, Bs):
    """Sufficient condition for mutual independence of the forms ``Z'B_iZ``."""
    ob, al = shape.omega_bar, shape.alpha
    Bs = [np.asarray(B, dtype=float) for B in Bs]
    scale = max(float(np.max(np.abs(B))) for B in Bs)
    for i in range(len(Bs)):
        for j in range(i + 1, len(Bs)):
            if not _is_zero(Bs[i] @ ob @ Bs[j], scale):
                return False
    oa = ob @ al
    skewed = sum(not _is_zero(oa @ B @ oa, scale * float(oa @ oa)) for B in Bs)
    return skewed <= 1


@dataclass(frozen=True)
class FisherCochranResult:
    applicable: bool
    independent_chi2: bool
    ranks: list


def fisher_cochran(alpha, Bs) -> FisherCochranResult:
    """Cochran-type decomposition for ``Z ~ SN_k(I, alpha)``.

    Applicable when ``sum B_i = I`` and ``B_i alpha != 0`` for at most one
    ``i``; the forms are then independent chi-squares iff the ranks sum to k.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    k = alpha.shape[0]
    Bs = [np.asarray(B, dtype=float) for B in Bs]
    ranks = [int(np.linalg.matrix_rank(B, tol=1e-8)) for B in Bs]
    total_ok = _is_zero(sum(Bs) - np.eye(k))
    skewed = sum(not _is_zero(B @ alpha, float(np.linalg.norm(alpha))) for B in Bs)
    applicable = total_ok and skewed <= 1
    return FisherCochranResult(applicable, applicable and sum(ranks) == k, ranks)


@dataclass(frozen=True)
class ConditionalLaw:
    """Exact law of ``Y_2`` given ``Y_1 = y_1``.

    Density ``phi(y2 - xi2c; Omega22_1) Phi(alpha2' omega2^{-1}(y2 - xi2c) + x0')
    / Phi(x0)``; cumulants of order ``m >= 3`` are ``zeta_m(x0) tau^{(x) m}``.
    """

    cond_indices: tuple
    free_indices: tuple
    xi2c: np.ndarray
    omega22_1: np.ndarray
    omega2: np.ndarray
    alpha2: np.ndarray
    x0: float
    x0_prime: float
    tau: np.ndarray
    log_normalizer: float

    @property
    def normalizer(self):
        return float(np.exp(self.log_normalizer))

    @property
    def mean(self):
        return self.xi2c + zeta(1, self.x0) * self.tau

    @property
    def variance(self):
        return self.omega22_1 + zeta(2, self.x0) * np.outer(self.tau, self.tau)

    def cumulant(self, order):
        arr = zeta(order, self.x0) * self.tau
        for _ in range(order - 1):
            arr = np.multiply.outer(arr, self.tau)
        return arr

    def logpdf(self, y2):
        y2 = np.asarray(y2, dtype=float)
        single = y2.ndim <= 1 and (y2.ndim == 0 or y2.shape[0] == self.xi2c.shape[0])
        pts = np.atleast_2d(y2).reshape(-1, self.xi2c.shape[0])
        r = pts - self.xi2c
        L = linalg.cholesky(self.omega22_1, lower=True)
        w = linalg.solve_triangular(L, r.T, lower=True)
        m = self.xi2c.shape[0]
        log_phi = (-0.5 * np.sum(w * w, axis=0) - np.sum(np.log(np.diag(L)))
                   - 0.5 * m * np.log(2.0 * np.pi))
        out = log_phi + norm_logcdf(r @ (self.alpha2 / self.omega2) + self.x0_prime) \
            - self.log_normalizer
        return float(out[0]) if single else out

    def pdf(self, y2):
        return np.exp(self.logpdf(y2))


def conditional_exact(dp: DpParams, cond_indices, y1) -> ConditionalLaw:
    i1, i2 = _split(dp.k, cond_indices)
    if not i2:
        raise DimensionError("conditioning set must leave at least one free component")
    y1 = np.atleast_1d(np.asarray(y1, dtype=float))
    if y1.shape != (len(i1),):
        raise DimensionError(f"y1 has shape {y1.shape}, expected ({len(i1)},)")
    Om = dp.Omega
    O11, O12, O22 = Om[np.ix_(i1, i1)], Om[np.ix_(i1, i2)], Om[np.ix_(i2, i2)]
    sol = linalg.solve(O11, O12, assume_a="pos")
    d1 = y1 - dp.xi[i1]
    xi2c = dp.xi[i2] + sol.T @ d1
    O22_1 = O22 - O12.T @ sol
    O22_1 = 0.5 * (O22_1 + O22_1.T)
    w1, w2 = dp.omega[i1], dp.omega[i2]
    a1, a2 = dp.alpha[i1], dp.alpha[i2]
    ob22_1 = O22_1 / np.outer(w2, w2)
    s = np.sqrt(1.0 + a2 @ ob22_1 @ a2)
    abar1 = (a1 + w1 * (sol @ (a2 / w2))) / s
    x0 = float(abar1 @ (d1 / w1))
    tau = w2 * (ob22_1 @ a2) / s
    return ConditionalLaw(
        cond_indices=tuple(i1),
        free_indices=tuple(i2),
        xi2c=xi2c,
        omega22_1=O22_1,
        omega2=w2,
        alpha2=a2,
        x0=x0,
        x0_prime=float(s * x0),
        tau=tau,
        log_normalizer=float(norm_logcdf(x0)),
    )


@dataclass(frozen=True)
class SnApproximation:
    """SN law matching the first three cumulants of an exact conditional.

    ``dp`` is None when no SN member matches (skewness outside the SN
    range); ``fallback`` is always the normal law with the exact mean and
    variance.
    """

    dp: DpParams | None
    feasible: bool
    matched_cumulant_error: np.ndarray
    fallback: DpParams
    scale_factor: float


def conditional_sn_approx(law: ConditionalLaw) -> SnApproximation:
    """Third-order cumulant matching.

    With ``c = cbrt(zeta_3(x0) / kappa_3^V)`` the SN member has
    ``omega delta = c tau``, ``Omega = Var + (2/pi) c^2 tau tau'`` and
    ``xi = E - sqrt(2/pi) c tau``.
    """
    mean, var = law.mean, law.variance
    fallback = DpParams(mean, var, np.zeros_like(mean))
    c = float(np.cbrt(zeta(3, law.x0) / half_normal_cumulant(3)))
    v = c * law.tau
    Om = var + (2.0 / np.pi) * np.outer(v, v)
    xi = mean - _SQRT_2_PI * v
    w = np.sqrt(np.diag(Om))
    ob = Om / np.outer(w, w)
    try:
        delta = validate_delta(v / w, ob)
        alpha = delta_to_alpha(delta, ob)
        dp = DpParams(xi, Om, alpha)
    except DomainError:
        return SnApproximation(None, False, np.full(3, np.nan), fallback, c)
    mom = moments(dp)
    err = np.array([
        np.max(np.abs(mom.mean - mean)),
        np.max(np.abs(mom.variance - var)),
        np.max(np.abs(cumulant_array(dp, 3) - law.cumulant(3))),
    ])
    return SnApproximation(dp, True, err, fallback, c)


def mahalanobis(dp: DpParams, y, locations=None):
    """``(y_i - xi)' Omega^{-1} (y_i - xi)`` per row.

    ``locations`` optionally gives a per-row location (regression fits).
    """
    pts, single = as_points(dp, y)
    loc = dp.xi if locations is None else np.asarray(locations, dtype=float).reshape(pts.shape)
    w = linalg.solve_triangular(dp.chol, (pts - loc).T, lower=True)
    d = np.sum(w * w, axis=0)
    return float(d[0]) if single else d

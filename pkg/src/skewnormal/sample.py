"""
Random variate generation.

Skew-normal draws use the sign representation: with ``(X0, X) ~
N_{k+1}(0, Omega*)`` and ``Omega* = [[1, delta'], [delta, Omega_bar]]``,
``Z = sign(X0) X ~ SN_k(Omega_bar, alpha)``. Skew-elliptical draws flip the
sign of a symmetric draw ``Y`` unless ``U < G(a'Y)``.

Streams are value objects: a ``(seed, stream_id)`` pair always yields the
same generator state, so chunked generation is reproducible regardless of
how chunks are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg, stats

from .errors import DimensionError, DomainError
from .kernels import norm_cdf, norm_logcdf
from .param import DpParams

__all__ = [
    "SeededStream",
    "SkewSpec",
    "rvs_sn",
    "rvs_sn_chunked",
    "rvs_skew_elliptical",
    "skew_elliptical_logpdf",
]


@dataclass(frozen=True)
class SeededStream:
    """Deterministic source of random numbers identified by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if int(self.seed) < 0 or int(self.stream_id) < 0:
            raise DomainError("seed and stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream_id: int) -> "SeededStream":
        return SeededStream(self.seed, stream_id)


def _as_generator(stream):
    if isinstance(stream, SeededStream):
        return stream.generator()
    if isinstance(stream, np.random.Generator):
        return stream
    return SeededStream(int(stream)).generator()


def rvs_sn(dp: DpParams, n: int, stream) -> np.ndarray:
    """``n`` draws from ``SN_k(xi, Omega, alpha)`` as an ``(n, k)`` array."""
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = _as_generator(stream)
    k = dp.k
    delta = dp.delta
    omega_star = np.empty((k + 1, k + 1))
    omega_star[0, 0] = 1.0
    omega_star[0, 1:] = omega_star[1:, 0] = delta
    omega_star[1:, 1:] = dp.omega_bar
    L = linalg.cholesky(omega_star, lower=True)
    draws = rng.standard_normal((n, k + 1)) @ L.T
    z = np.where(draws[:, :1] >= 0, draws[:, 1:], -draws[:, 1:])
    return dp.xi + z * dp.omega


def rvs_sn_chunked(dp: DpParams, n: int, seed: int, n_chunks: int, max_workers: int = 1):
    """Draw ``n`` variates in ``n_chunks`` independent streams.

    Chunk ``i`` uses stream id ``i`` and has the size given by
    ``np.array_split``; chunks are concatenated in stream-id order, so the
    result does not depend on ``max_workers``.
    """
    if n_chunks < 1:
        raise DomainError("n_chunks must be at least 1")
    sizes = [len(c) for c in np.array_split(np.arange(n), n_chunks)]
    jobs = [(size, SeededStream(seed, i)) for i, size in enumerate(sizes) if size > 0]

    def run(job):
        return rvs_sn(dp, job[0], job[1])

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class SkewSpec:
    """Skewed version ``2 f(y) G(a'y)`` of a centred elliptical density ``f``.

    Parameters
    ----------
    direction : array_like
        The vector ``a``.
    scatter : array_like, optional
        Scatter matrix of ``f``; identity by default.
    base : {"normal", "t"}
        Family of ``f``.
    df : float, optional
        Degrees of freedom when ``base == "t"``.
    G : callable
        Distribution function of a variable symmetric about 0.
    """

    direction: np.ndarray
    scatter: np.ndarray | None = None
    base: str = "normal"
    df: float | None = None
    G: Callable = norm_cdf
    log_G: Callable | None = None

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.direction, dtype=float))
        k = a.shape[0]
        S = np.eye(k) if self.scatter is None else np.atleast_2d(np.asarray(self.scatter, dtype=float))
        if S.shape != (k, k):
            raise DimensionError("scatter and direction dimensions disagree")
        if self.base not in ("normal", "t"):
            raise ValueError(f"unknown base density {self.base!r}")
        if self.base == "t" and not (self.df is not None and self.df > 0):
            raise DomainError("Student t base needs df > 0")
        object.__setattr__(self, "direction", a)
        object.__setattr__(self, "scatter", S)
        if self.log_G is None and self.G is norm_cdf:
            object.__setattr__(self, "log_G", norm_logcdf)

    @property
    def k(self):
        return self.direction.shape[0]

    def base_logpdf(self, y):
        if self.base == "normal":
            return stats.multivariate_normal(np.zeros(self.k), self.scatter).logpdf(y)
        return stats.multivariate_t(np.zeros(self.k), self.scatter, df=self.df).logpdf(y)


def _base_draws(spec: SkewSpec, n, rng):
    L = linalg.cholesky(spec.scatter, lower=True)
    y = rng.standard_normal((n, spec.k)) @ L.T
    if spec.base == "t":
        # normal / sqrt(chi2 / df) compound
        w = rng.chisquare(spec.df, size=n) / spec.df
        y = y / np.sqrt(w)[:, None]
    return y


def rvs_skew_elliptical(spec: SkewSpec, n: int, stream) -> np.ndarray:
    """``n`` draws from ``2 f(y) G(a'y)`` by sign flipping; no rejection."""
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = _as_generator(stream)
    y = _base_draws(spec, n, rng)
    u = rng.random(n)
    keep = u < spec.G(y @ spec.direction)
    return np.where(keep[:, None], y, -y)


def skew_elliptical_logpdf(spec: SkewSpec, y):
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if y.shape[1] != spec.k:
        y = y.reshape(-1, spec.k)
    w = y @ spec.direction
    log_g = spec.log_G(w) if spec.log_G is not None else np.log(spec.G(w))
    return np.log(2.0) + spec.base_logpdf(y) + log_g

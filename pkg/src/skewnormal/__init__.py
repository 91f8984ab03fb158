"""Skew-normal distributions: density, sampling, transformations and inference."""

from .dist import cgf, cumulant_array, logpdf, moments, pdf
from .errors import (
    DegenerateError,
    DimensionError,
    DomainError,
    GroupCountError,
    RankError,
    SingularError,
    SkewNormalError,
)
from .param import CpParamsUv, DpParams, DpShape, LambdaPsiParams

__all__ = [
    "DpParams",
    "DpShape",
    "LambdaPsiParams",
    "CpParamsUv",
    "logpdf",
    "pdf",
    "cgf",
    "moments",
    "cumulant_array",
    "SkewNormalError",
    "DomainError",
    "DimensionError",
    "RankError",
    "SingularError",
    "DegenerateError",
    "GroupCountError",
]

__version__ = "0.1.0"

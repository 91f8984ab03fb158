"""Exception types raised across the package."""


class SkewNormalError(ValueError):
    """Base class for invalid inputs to skew-normal routines."""


class DomainError(SkewNormalError):
    """A parameter lies outside the admissible region."""


class DimensionError(SkewNormalError):
    """Array shapes do not agree."""


class RankError(SkewNormalError):
    """A transformation matrix is rank deficient."""


class SingularError(SkewNormalError):
    """A covariance-type matrix is not positive definite."""


class DegenerateError(SkewNormalError):
    """The data carry no information about a parameter (e.g. zero spread)."""


class GroupCountError(SkewNormalError):
    """Wrong number of groups for a discrimination routine."""

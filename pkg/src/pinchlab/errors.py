"""Exception hierarchy shared by all pinchlab modules."""


class PinchlabError(Exception):
    """Base class for all domain errors raised by this package."""


class FormatError(PinchlabError):
    """Malformed serialized input (matrix JSON, plan JSON, block grammar)."""


class NotHermitianError(PinchlabError):
    """Input matrix deviates from its adjoint beyond tolerance."""


class NoConvergenceError(PinchlabError):
    """Iterative factorization exhausted its budget."""


class NotOrthonormalError(PinchlabError):
    """Supplied vectors are not orthonormal within tolerance."""


class NotIdempotentError(PinchlabError):
    """Matrix fails Q @ Q == Q within tolerance."""


class NotNormalError(PinchlabError):
    """Matrix fails to commute with its adjoint within tolerance."""


class NotInRangeError(PinchlabError):
    """Requested value lies outside the numerical range."""


class ValueOutOfDiscError(PinchlabError):
    """Prescribed value or block violates the strict-contraction bound."""


class DomainError(PinchlabError):
    """Scalar argument outside its mathematical domain."""


class DegenerateSpectrumError(PinchlabError):
    """Operation requires distinct eigenvalues."""


class DimensionMismatchError(PinchlabError):
    """Operands have incompatible shapes."""


class WeightsNotNormalizedError(PinchlabError):
    """Mixture weights must be positive and sum to one."""


class TargetMismatchError(PinchlabError):
    """Plans passed to a mixture disagree on source or target."""

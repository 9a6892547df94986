"""Exception types raised by nlspin."""


class NlspinError(ValueError):
    """Base class for all domain errors."""


class DimensionError(NlspinError):
    pass


class NotHermitianError(NlspinError):
    pass


class RangeError(NlspinError):
    """A parameter lies outside the domain of an operation."""


class DegenerateError(NlspinError):
    """The input states are orthogonal or identical, so there is nothing to discriminate."""


class VerificationError(NlspinError):
    """A closed-form result disagreed with its tensor-pipeline oracle."""

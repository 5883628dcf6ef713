"""Exception hierarchy shared by all engines."""


class EbfError(Exception):
    """Base class for all package errors."""


class DomainError(EbfError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DegenerateRegionError(EbfError, ValueError):
    """A hypothesis region carries no usable posterior mass (underflow)."""


class UnsupportedRegionError(EbfError, ValueError):
    """The requested region kind is not defined for this test family."""


class UnsupportedFamilyError(EbfError, ValueError):
    """The engine does not handle this test family."""


class ContractError(EbfError, ValueError):
    """Ingredients violate an interface contract (e.g. mixing corrected and
    uncorrected marginal likelihoods in one evidence ratio)."""


class NonConvergedError(EbfError, RuntimeError):
    """A numerical routine failed to reach its requested tolerance.

    Carries the best available estimate so callers can inspect it.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate

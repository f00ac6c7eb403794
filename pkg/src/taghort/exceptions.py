"""Exception types raised by taghort."""


class TaghortError(ValueError):
    """Base class for all taghort input and solver errors."""


class DimensionMismatchError(TaghortError):
    pass


class NonFiniteError(TaghortError):
    pass


class NonBinaryError(TaghortError):
    pass


class EmptyCohortError(TaghortError):
    pass


class UnknownColumnError(TaghortError):
    pass


class KindMismatchError(TaghortError):
    pass


class DegenerateBinsError(TaghortError):
    pass


class DictionaryMismatchError(TaghortError):
    pass


class InfeasibleKError(TaghortError):
    """Raised when more cohorts are requested than there are samples."""


class KTooLargeError(TaghortError):
    pass


class SolverTimeoutError(TaghortError):
    """The time limit expired before any feasible partition was found."""

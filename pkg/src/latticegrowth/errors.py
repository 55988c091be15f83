"""Exception hierarchy shared by all modules."""


class LatticeGrowthError(Exception):
    """Base class for every error raised by this package."""


class StepSetParseError(LatticeGrowthError, ValueError):
    pass


class DomainError(LatticeGrowthError, ValueError):
    """An argument lies outside the domain of the function (e.g. a non-positive point)."""


class UnsupportedError(LatticeGrowthError, ValueError):
    """The operation is not defined for this kind of input (wrong dimension, large steps, ...)."""


class InvalidNormalError(LatticeGrowthError, ValueError):
    pass


class NoCriticalPointError(LatticeGrowthError, ValueError):
    """A one-dimensional inventory is trivial and has no positive critical point."""


class ConvergenceError(LatticeGrowthError, RuntimeError):
    pass


class CapacityError(LatticeGrowthError, MemoryError):
    pass


class InsufficientDataError(LatticeGrowthError, ValueError):
    pass


class InessentialModelError(LatticeGrowthError, ValueError):
    pass


class LedgerIntegrityError(LatticeGrowthError, AssertionError):
    """A lower bound exceeds an upper bound: some bound computation is wrong."""


class PreconditionError(LatticeGrowthError, ValueError):
    pass


class InconsistencyError(LatticeGrowthError, AssertionError):
    """Two formulas that must coincide disagree beyond tolerance."""

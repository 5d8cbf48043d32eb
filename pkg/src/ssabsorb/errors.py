"""Exception hierarchy shared by the numerical modules and the CLI."""


class SsabsorbError(Exception):
    """Base class for every error raised by the package."""


class ModelError(SsabsorbError, ValueError):
    """A model or configuration violates one of its invariants."""


class DomainError(SsabsorbError, ValueError):
    """An argument lies outside the domain where a formula is valid."""


class ConvergenceError(SsabsorbError, ArithmeticError):
    """An iterative procedure failed to reach its tolerance.

    ``achieved`` carries the best error estimate seen, when one exists.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class QuadratureError(ConvergenceError):
    pass


class PoleError(DomainError):
    """A product or Gamma ratio hit a pole."""


class ConsistencyError(SsabsorbError, ArithmeticError):
    """A computed probability escaped its admissible range."""

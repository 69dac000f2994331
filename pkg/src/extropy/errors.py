"""Exception hierarchy shared by the estimators, oracles and CLI."""


class ExtropyError(Exception):
    """Base class for every error raised by this package."""


class InvalidSampleError(ExtropyError, ValueError):
    """Input data violates the sample invariants (empty, non-positive, non-finite)."""


class InsufficientDataError(ExtropyError, ValueError):
    """Too few observations for a pairwise estimator."""

    def __init__(self, message: str, count: int):
        super().__init__(message)
        self.count = count


class InsufficientTailError(InsufficientDataError):
    """Fewer than two observations strictly above the threshold."""


class InsufficientHeadError(InsufficientDataError):
    """Fewer than two observations at or below the threshold."""


class InsufficientEventsError(InsufficientDataError):
    """Fewer than two uncensored observations."""


class IpcwDegenerateError(ExtropyError, ArithmeticError):
    """An event time has an estimated censoring survival of zero."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class UnstableBootstrapError(ExtropyError, RuntimeError):
    """Too many bootstrap replicates had to be skipped."""

    def __init__(self, message: str, skipped: int, n_boot: int):
        super().__init__(message)
        self.skipped = skipped
        self.n_boot = n_boot


class NumericError(ExtropyError, ArithmeticError):
    """Quadrature did not reach the requested tolerance."""


class CalibrationError(ExtropyError, ArithmeticError):
    """No censoring rate in the search bracket attains the target."""


class FixtureError(ExtropyError, LookupError):
    """Unknown fixture name, or a fixture that ships disabled."""

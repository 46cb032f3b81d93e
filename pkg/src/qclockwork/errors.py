"""Exception and warning types raised by qclockwork."""


class ClockError(Exception):
    """Base class for all qclockwork errors."""


class ParameterError(ClockError, ValueError):
    """Invalid clock parameters or operation arguments."""


class WrongVariantError(ParameterError):
    """A closed-form profile was requested outside the (d, M) it applies to."""


class DegenerateGradientError(ClockError, ArithmeticError):
    """Hot and cold machine qubits have identical partition functions."""


class DegenerateProfileError(ClockError, ArithmeticError):
    """The cumulative hazard over one cycle is (numerically) zero.

    ``resolution`` carries the limiting tick rate, which is 0 in this regime.
    """

    def __init__(self, message, cycle_hazard=0.0):
        super().__init__(message)
        self.cycle_hazard = cycle_hazard
        self.resolution = 0.0


class DegenerateSampleError(ClockError, ArithmeticError):
    """A tick sample has zero variance, so its accuracy is undefined."""


class ConsistencyError(ClockError, ArithmeticError):
    """An internal invariant failed (e.g. a per-cycle survival factor >= 1)."""


class OracleSizeError(ClockError):
    """The dense oracle Hilbert space exceeds the configured guardrail."""

    def __init__(self, dim, limit):
        super().__init__(f"oracle Hilbert dimension {dim} exceeds the guardrail of {limit}")
        self.dim = dim
        self.limit = limit


class PrecisionWarning(RuntimeWarning):
    """Result is computed but sits close to the limits of double precision."""

"""Exception hierarchy shared by every crestwave module."""


class CrestwaveError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(CrestwaveError, ValueError):
    """Invalid grid bounds, out-of-window (mu, nu), or bad solver options."""


class NonIntegrableSingularityError(CrestwaveError, ValueError):
    pass


class DivergentTailError(CrestwaveError, ValueError):
    pass


class UnsupportedInputError(CrestwaveError, ValueError):
    """Raised when an operator receives data outside its domain (e.g. non-decaying)."""


class InconsistentStateError(CrestwaveError, RuntimeError):
    pass


class NumericalFailureError(CrestwaveError, RuntimeError):
    """NaN iterates, monotonicity loss beyond tolerance, and similar breakdowns."""


class InversionError(CrestwaveError, RuntimeError):
    pass


class WindowError(CrestwaveError, ValueError):
    """A diagnostic fit window is not covered by the available data."""


class ArchiveFormatError(CrestwaveError, ValueError):
    pass

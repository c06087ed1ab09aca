"""Exception and warning types shared across the package."""


class NetRealError(Exception):
    """Base class for all library errors."""


class InputError(NetRealError, ValueError):
    """Invalid argument: bad dimensions, indices, or file contents."""


class PoleError(NetRealError, ArithmeticError):
    """Frequency-response evaluation requested too close to a pole."""


class InversionError(NetRealError, ArithmeticError):
    """A direct term is missing, singular, or too ill-conditioned to invert."""


class NumericalError(NetRealError, RuntimeError):
    """A numerical routine failed to produce a usable result."""


class StabilityWarning(UserWarning):
    """A construction combined factors with spectral radius >= 1."""

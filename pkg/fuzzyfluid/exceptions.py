"""Exceptions raised by fuzzyfluid."""


class FuzzyFluidException(Exception):
    """Custom exception to distinguish fuzzyfluid related errors (usage etc)
    from the usual."""
    pass


class AntipodeError(FuzzyFluidException):
    """Group element at (or numerically too close to) g = -1, whose chart
    momentum is at infinity."""
    pass


class SingularFrameError(FuzzyFluidException):
    """Maurer-Cartan frame can not be inverted."""
    pass


class EmptyGridError(FuzzyFluidException):
    """Lattice parameters that produce no usable momentum grid."""
    pass


class OutOfBandError(FuzzyFluidException):
    """Composed momentum whose deposition reaches outside the grid."""
    pass


class NonFiniteError(FuzzyFluidException):
    """Integration produced NaN or Inf.

    Carries the last finite state and the records collected until then, so the
    caller can save them.
    """

    def __init__(self, message, last_state=None, records=None):
        super().__init__(message)
        self.last_state = last_state
        self.records = list(records) if records is not None else list()


class ConfigError(FuzzyFluidException, ValueError):
    """Invalid configuration. The message names the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key

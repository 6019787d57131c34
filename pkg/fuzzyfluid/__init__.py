__all__ = ['su2', 'modes', 'star', 'classical', 'dynamics', 'config',
           'exceptions', '__version__']

from ._version import __version__

from fuzzyfluid import config
from fuzzyfluid.exceptions import (AntipodeError, ConfigError, EmptyGridError,
                                   FuzzyFluidException, NonFiniteError,
                                   OutOfBandError, SingularFrameError)

"""Exception hierarchy shared by all modules."""


class DistChaosError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(DistChaosError, ValueError):
    """Mismatched lengths, alphabets or horizons."""


class SymbolError(DistChaosError, ValueError):
    """A word contains a symbol outside the alphabet."""


class StructureError(DistChaosError):
    """A shift lacks the structure an operation needs (mixing, fixed point, bridge)."""


class ParameterError(DistChaosError, ValueError):
    """A parameter is outside its admissible range."""


class EscapeError(DistChaosError):
    """An orbit left the integration domain (bailout radius)."""

    def __init__(self, message, time=None, state=None):
        super().__init__(message)
        self.time = time
        self.state = state


class NumericError(DistChaosError, ArithmeticError):
    """Non-finite state or step-size underflow during integration."""


class SearchError(DistChaosError):
    """A root or fixed-point search failed to converge."""


class ConfigError(DistChaosError, ValueError):
    """Invalid or incomplete run configuration."""

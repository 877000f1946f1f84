"""Exception hierarchy shared by all modules."""


class LieReduceError(Exception):
    """Base class for errors raised by this package."""


class InputError(LieReduceError, ValueError):
    """Malformed arguments: wrong shapes, non-finite values, support violations."""


class DomainError(InputError):
    """Argument outside the domain of a map (e.g. log at the cut locus)."""


class GroupStateError(LieReduceError):
    """A matrix that should represent an SE(2) element drifted off the group."""


class CollisionError(LieReduceError):
    """Two agents entered the forbidden shell of their pair potential."""

    def __init__(self, message, pair=None, step=None, time=None):
        super().__init__(message)
        self.pair = pair
        self.step = step
        self.time = time


class NumericalError(LieReduceError):
    """Non-finite values appeared during integration."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class ConfigError(LieReduceError):
    """Invalid scenario configuration; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field

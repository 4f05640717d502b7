"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): bad input that
the user can fix (``InvalidInputError``, exit 1) and numerical failures of an
otherwise well-formed problem (``NumericalError``, exit 2).
"""


class ControlError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(ControlError, ValueError):
    pass


class ParameterError(InvalidInputError):
    pass


class DegenerateInputError(InvalidInputError):
    pass


class ImproperSystemError(InvalidInputError):
    pass


class ConfigError(InvalidInputError):
    pass


class NumericalError(ControlError, ArithmeticError):
    pass


class SpectralFactorizationError(NumericalError):
    pass


class NotEvenError(SpectralFactorizationError):
    pass


class NotNonnegativeError(SpectralFactorizationError):
    pass


class MarginalFactorizationError(SpectralFactorizationError):
    pass


class CoprimenessError(NumericalError):
    pass


class SingularSubstitutionError(NumericalError):
    pass


class SingularLoopError(NumericalError):
    pass


class NoRiseError(NumericalError):
    pass


class DivergenceError(NumericalError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"simulation diverged at sample {index}")

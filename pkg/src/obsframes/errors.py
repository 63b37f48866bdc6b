"""Exception hierarchy.

Everything raised on purpose by the package derives from ``ObsFrameError``.
The CLI maps these to exit code 2 (infeasible configuration); anything else
is treated as an internal error.
"""


class ObsFrameError(Exception):
    pass


class ParameterError(ObsFrameError, ValueError):
    """An argument is outside its admissible range."""


class StepSizeError(ParameterError):
    """A sampling step collides with the eigenvalue lattice condition."""

    def __init__(self, message, pair=None, distance=None):
        super().__init__(message)
        self.pair = pair
        self.distance = distance


class PreconditionError(ParameterError):
    """A structural precondition (Hurwitz, observability, ...) fails."""


class NotAFrameError(ObsFrameError, ArithmeticError):
    """The frame matrix is numerically singular."""


class NumericalError(ObsFrameError, ArithmeticError):
    pass

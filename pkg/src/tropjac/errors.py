"""Exception hierarchy; the CLI maps each class to an exit code."""


class TropjacError(Exception):
    exit_code = 1


class InvalidInputError(TropjacError, ValueError):
    exit_code = 2


class NoJacobianError(InvalidInputError):
    pass


class GuardExceededError(TropjacError):
    exit_code = 3


class RegularityError(TropjacError):
    """A cell complex failed a structural check (for instance d o d != 0)."""

    exit_code = 1

    def __init__(self, message: str, cells=()):
        super().__init__(message)
        self.cells = list(cells)


class VerificationFailure(TropjacError):
    exit_code = 1

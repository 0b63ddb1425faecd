"""Exception hierarchy shared by all modules and mapped to CLI exit codes."""


class VsiError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class UsageError(VsiError, ValueError):
    exit_code = 2


class ConfigError(UsageError):
    """Missing, unknown, malformed or out-of-range configuration values."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class InfeasibleError(VsiError, ValueError):
    """The requested operating point cannot be realised by the converter."""

    exit_code = 3


class NoOperatingPointError(InfeasibleError):
    pass


class InfeasibleZeroSequenceError(InfeasibleError):
    pass


class InfeasibleDutyError(InfeasibleError):
    pass


class PoleError(VsiError, ZeroDivisionError):
    """Transfer function evaluated on (or numerically at) a pole."""

    exit_code = 3

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class DivergedError(VsiError, ArithmeticError):
    exit_code = 4

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index

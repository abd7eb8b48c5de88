# core/errors.py


class ParArmError(Exception):
    """Base class for every error raised by the simulator and its tools."""


class DomainError(ParArmError, ValueError):
    pass


class RangeError(ParArmError, ValueError):
    pass


class ConfigError(ParArmError, ValueError):
    pass


class DegenerateInstanceError(ParArmError, ValueError):
    pass


class SizeError(ParArmError, ValueError):
    pass


class BudgetExhaustedError(ParArmError):
    """A run hit its round/batch/pull cap. `trace` holds what was executed."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class InfeasibleDeadlineError(ParArmError):
    """The deadline cannot pay for at least one pull per surviving arm."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage

"""Exception types raised across the package."""


class EapmsError(Exception):
    """Base class for all package errors."""


class InvalidInstanceError(EapmsError, ValueError):
    """Instance data violates a structural or numeric invariant."""


class InstanceParseError(EapmsError, ValueError):
    """An instance document could not be parsed into the expected shape."""


class DegenerateInstanceError(EapmsError, ValueError):
    """A metric is undefined for the given input (e.g. zero makespan)."""


class CandidateInfeasibleError(EapmsError):
    """Some task type has no machine type it may run on under the makespan target."""

    def __init__(self, ms: float, task_type: int):
        super().__init__(f"no machine type admits task type {task_type} at MS={ms:g}")
        self.ms = ms
        self.task_type = task_type


class MalformedGraphError(EapmsError):
    """A slot graph admits no matching covering every task-type demand."""


class BudgetExceededError(EapmsError):
    """Exhaustive enumeration needs more states than the budget allows."""


class SweepError(EapmsError):
    """The makespan candidate sweep cannot be built or produced no schedule."""


class InvalidSpecError(EapmsError, ValueError):
    """An experiment specification has out-of-range settings."""

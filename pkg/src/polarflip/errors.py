"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An argument broke a documented precondition."""


class PlanningError(ValueError):
    """A partition plan could not be constructed from the given inputs."""


class InsufficientDataError(RuntimeError):
    """A statistical routine ran out of budget before collecting enough events.

    Carries the counts so callers can decide whether to extend the run.
    """

    def __init__(self, message: str, collected: int = 0, required: int = 0):
        super().__init__(message)
        self.collected = collected
        self.required = required

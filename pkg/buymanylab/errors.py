from typing import Optional


class BuyManyLabError(Exception):
    """Base class for errors raised by buymanylab."""


class InstanceValidationError(BuyManyLabError, ValueError):
    """An instance document or domain object violates the schema or an invariant."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class CapacityError(BuyManyLabError, RuntimeError):
    """A configured size limit was exceeded."""

    def __init__(self, what: str, limit: int, requested: int):
        self.what = what
        self.limit = limit
        self.requested = requested
        super().__init__(f"{what} exceeds capacity: requested {requested}, limit {limit}")


class NonTerminatingPolicyError(BuyManyLabError, ValueError):
    def __init__(self, state: int, entry: int):
        self.state = state
        self.entry = entry
        super().__init__(
            f"Policy loops forever at state {state:#b}: entry {entry} never grows the held set"
        )


class SetSystemSamplingError(BuyManyLabError, RuntimeError):
    def __init__(self, attempts: int, found: int, wanted: int):
        self.attempts = attempts
        self.found = found
        self.wanted = wanted
        super().__init__(
            f"Retry budget exhausted after {attempts} attempts ({found}/{wanted} sets found)"
        )


class ContinuityInvariantError(BuyManyLabError, AssertionError):
    """An atom that switched to a much cheaper entry does not have a large total value."""


class SolverError(BuyManyLabError, RuntimeError):
    """The LP solver stopped without an optimal solution."""

    def __init__(self, what: str, status: int, message: str):
        self.what = what
        self.status = status
        super().__init__(f"{what} failed with status {status}: {message}")

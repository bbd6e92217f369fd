"""Exception hierarchy shared by all solver modules."""


class TranswassError(Exception):
    """Base class for all library errors."""


class InputError(TranswassError, ValueError):
    """Malformed or inconsistent user input (shapes, masses, parameters)."""


class InfeasibilityError(TranswassError, RuntimeError):
    """The flow problem admits no feasible solution."""


class ResourceLimitError(TranswassError, RuntimeError):
    """A size guard was hit; the approximate path should be used instead."""


class SolverError(TranswassError, RuntimeError):
    """The flow solver failed to converge (pivot safety cap reached)."""

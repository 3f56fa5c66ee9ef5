"""Exception types shared across the package."""


class TriperiodError(Exception):
    """Base class for all package errors."""


class DomainError(TriperiodError, ValueError):
    """Input outside the domain where an operation is defined."""


class SingularityError(TriperiodError, ArithmeticError):
    """An integrand or kernel was evaluated on its singular set."""


class ContractError(TriperiodError, RuntimeError):
    """A checked precondition on caller-supplied data failed."""


class RangeError(DomainError):
    """Argument outside the supported numeric range."""

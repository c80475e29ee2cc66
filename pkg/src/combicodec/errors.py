"""Exception hierarchy shared across the library."""


class CombicodecError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CombicodecError):
    """An object, context, or parameter violates a model precondition."""


class CodingError(CombicodecError):
    """The arithmetic coder was misused or its input is corrupt."""


class ContainerError(CombicodecError):
    """A binary container is malformed or inconsistent with the context."""


class BudgetError(CombicodecError):
    """An exhaustive enumeration would exceed the configured budget."""

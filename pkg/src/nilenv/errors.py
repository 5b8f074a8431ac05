"""Exception types shared across the package."""

from __future__ import annotations


class MalformedInputError(ValueError):
    """Raised when user-supplied data fails structural validation."""


class ParentMismatchError(ValueError):
    """Raised when an operation mixes subgroups of different parent groups."""


class NotASubgroupError(ValueError):
    """Raised when a set of elements is not closed under the group operations."""


class HypothesisError(ValueError):
    """Raised when a checker is invoked on inputs that violate its preconditions."""


class NotNilpotentError(ValueError):
    """Raised when a nilpotent subgroup is required but the input is not nilpotent."""


class NotNormalError(ValueError):
    """Raised when a normal subgroup is required but the input is not normal."""


class ArityMismatchError(ValueError):
    """Raised when a parameter tuple does not match the arity a formula expects."""


class FormulaSyntaxError(ValueError):
    """Raised on unparseable formula text.  Carries the offending position."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class CapExceededError(RuntimeError):
    """Raised when an enumeration exceeds a configured cap.

    ``partial`` records how far the enumeration got before giving up.
    """

    def __init__(self, message: str, partial: int) -> None:
        super().__init__(message)
        self.partial = partial


class WitnessBoundError(RuntimeError):
    """Raised when a greedy witness search exceeds its length bound."""


class InternalCheckError(RuntimeError):
    """Raised when two independent computations of the same quantity disagree.

    This always indicates a bug in this package, never bad input.
    """

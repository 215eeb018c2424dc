"""Exception types shared across the package."""

from __future__ import annotations


class InvariantError(ValueError):
    """A structural invariant failed.

    ``invariant`` names the failed property and ``witness`` holds the smallest
    offending data found (a triple of group elements, a point, ...).
    """

    def __init__(self, invariant: str, witness=None, message: str | None = None):
        self.invariant = invariant
        self.witness = witness
        text = message or f"invariant '{invariant}' violated"
        if witness is not None:
            text += f" (witness: {witness!r})"
        super().__init__(text)


class MismatchError(ValueError):
    """Operands live over different actions or fields, or have incompatible shapes."""


class InconsistentSystemError(ValueError):
    """A linear system has no solution."""


class SingularMatrixError(ValueError):
    pass


class UnsupportedMapError(ValueError):
    """Direct image requested along a map whose group homomorphism is not injective."""


class NonSplittingFieldError(ValueError):
    pass


class SplittingFailedError(RuntimeError):
    """Randomized idempotent splitting ran out of retries."""


class BudgetExceededError(RuntimeError):
    """An exhaustive search would exceed the configured budget."""


class IncompatibleSectionError(InvariantError):
    """Chart data do not glue: some transition composite disagrees."""

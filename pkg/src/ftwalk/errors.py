"""Exception types shared across the package.

``ValidationError`` marks bad user input (malformed files, non-unitary
matrices, inconsistent dimensions) and maps to exit code 2 in the CLI.
``InternalError`` marks a violated internal invariant (failed reconstruction,
impossible measurement branch) and maps to exit code 3.
"""


class ValidationError(ValueError):
    """Input failed validation."""


class InternalError(RuntimeError):
    """An internal consistency check failed."""


class DecompositionError(InternalError):
    """A decomposition did not reproduce its input within tolerance."""


class UnsupportedOperationError(ValidationError):
    """An operation kind that the gate compiler cannot lower."""

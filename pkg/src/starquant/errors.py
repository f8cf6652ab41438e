"""Shared exception types."""


class PreconditionError(ValueError):
    """A mathematical precondition of an operation was violated.

    Raised e.g. for a singular matrix where invertibility is required, an
    asymmetric ordering matrix, or a series whose leading coefficient is not
    invertible.  The CLI maps this to exit code 3.
    """


class SchemaError(ValueError):
    """Malformed or out-of-contract input data (CLI exit code 2)."""

"""Exception types shared across the package.

The CLI maps these onto exit codes: InputDataError -> 2,
CompatibilityError -> 3, anything else -> 1 (internal error).
"""


class PrnuVidError(Exception):
    """Base class for all errors raised by this package."""


class InputDataError(PrnuVidError):
    """Unreadable, malformed, or missing input data (files, frames, manifests)."""


class CompatibilityError(PrnuVidError):
    """Inputs are well-formed but incompatible with the requested configuration,
    e.g. a query video smaller than the enrollment resolution."""

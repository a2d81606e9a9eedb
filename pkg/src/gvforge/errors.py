"""Exception taxonomy shared across the package.

Three externally meaningful failure classes, mirrored by CLI exit codes:
argument/domain errors (exit 1), failed or undecidable checks (exit 2),
and capacity refusals (exit 3).
"""


class GvforgeError(Exception):
    """Base class for package errors."""


class DomainError(GvforgeError, ValueError):
    """An argument is outside the documented domain of an operation."""


class CapacityError(GvforgeError):
    """The request exceeds a documented size cap; refuse rather than degrade."""


class IndeterminateError(GvforgeError):
    """An enclosure straddles a decision threshold and cannot certify either way."""


class TauSearchError(CapacityError):
    """Translate search exhausted its grid budget without a certified box.

    Retry with a finer grid (larger max_grid); never returns an under-count.
    """


class BoundaryContact(GvforgeError):
    """A lattice point cannot be strictly classified against a box face."""


class ConditionFailure(GvforgeError):
    """A named parameter condition failed; .failures lists the condition names."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))

"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class BLFormError(Exception):
    """Base class for every error raised on purpose by ``blform``."""


class DimensionError(BLFormError, ValueError):
    """Shapes or lengths of the inputs do not fit together."""


class DomainError(BLFormError, ValueError):
    """Inputs are well formed but the requested quantity does not exist."""


class RankDeficientError(DomainError):
    """The ground vectors do not span the ambient space, so there are no bases."""


class DegenerateError(DomainError):
    """A construction collapsed (e.g. a zero step length)."""


class PropertyViolation(BLFormError):
    """A structural property that was expected to hold has been falsified.

    Carries an optional ``witness`` describing the counterexample.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness

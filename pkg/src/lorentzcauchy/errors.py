"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` that the CLI maps to
its exit status and JSON error class.
"""

from __future__ import annotations


class LorentzError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InputError(LorentzError, ValueError):
    """Malformed input: bad shape, out-of-range index, unreadable file."""

    code = "input"


class InvariantError(LorentzError):
    """A structural invariant of a model or space does not hold."""

    code = "invariant"

    def __init__(self, message: str, witness=None, invariant: str | None = None):
        super().__init__(message, witness)
        if invariant is not None:
            self.code = invariant


class PreconditionError(InvariantError):
    """An operation was called on an input outside its domain."""

    code = "precondition"


class InconsistentCurveError(InvariantError):
    """Behaviour flags of a sampled curve contradict its samples."""

    code = "curve_flags"


class BoundaryEscapeError(InvariantError):
    """A limit construction left the admissible region of the model."""

    code = "boundary_escape"

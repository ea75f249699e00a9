"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class BeilinsonError(Exception):
    pass


class InputError(BeilinsonError, ValueError):
    """Malformed or out-of-range input."""


class FieldParseError(InputError):
    pass


class InvariantViolation(BeilinsonError, ArithmeticError):
    """A structural identity (d∘d = 0, chain map, ...) failed exactly."""


class PreconditionError(InputError):
    pass


class NonTransverseError(InputError):
    pass


class UnsupportedOperation(BeilinsonError, NotImplementedError):
    pass

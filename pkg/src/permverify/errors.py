"""Exception types raised by the verifier."""


class InputError(ValueError):
    """Malformed or inconsistent user input (files, dimensions, permutations)."""


class DimensionError(InputError):
    """Array shapes do not compose."""


class PreconditionError(ValueError):
    """An operation was called on data it does not support."""


class InapplicableError(Exception):
    """A backward simplification does not apply to the given polytope."""


class NumericalError(ArithmeticError):
    """A non-finite value appeared during propagation."""

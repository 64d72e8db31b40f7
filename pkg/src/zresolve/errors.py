"""Exception types shared across the package."""


class RingMismatchError(ValueError):
    """Operands live over different variable lists."""


class ParseError(ValueError):
    """Malformed polynomial or problem-file syntax."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class CoverError(RuntimeError):
    """The Jacobian minors of the ambient ideal do not cover X.

    Signals a non-regular (or non-equidimensional) ambient input.
    """


class DescentError(RuntimeError):
    """Ambient descent got stuck; input is not reduced or over-determined."""


class InternalError(RuntimeError):
    """An internal invariant that must hold was violated."""

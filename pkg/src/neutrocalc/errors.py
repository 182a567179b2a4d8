"""Exception types shared by all engine modules."""


class NeutroError(Exception):
    """Base class for all library errors."""


class InvalidEndpoint(NeutroError):
    """A set endpoint is NaN or infinite."""


class EmptySetError(NeutroError):
    """An operation that needs a non-empty set received the empty set."""


class DivisionBySetContainingZero(NeutroError):
    """Division by a set whose closure contains zero."""


class DivisionByZero(NeutroError):
    """Division of an indeterminacy number by the crisp zero."""


class UndefinedSubindeterminacyProduct(NeutroError):
    """Product of two distinct indeterminacy symbols has no defined value."""


class NotInvertible(NeutroError):
    """An indeterminacy number with no multiplicative inverse."""


class IndeterminateDenominator(NeutroError):
    """Rational evaluation hit a non-crisp or zero denominator."""


class DomainError(NeutroError):
    """An argument falls outside a function's domain of definition."""


class NotSupported(NeutroError):
    """The requested transformation is not defined for this spec shape."""


class OverlapError(NeutroError):
    """Piecewise definition with overlapping piece domains."""


class OutOfRange(NeutroError):
    """Target value lies outside the bracketing range."""


class NotFound(NeutroError):
    """No witness found at the requested grid resolution."""


class PreconditionError(NeutroError):
    """An operation's precondition does not hold for the given inputs."""


class IntegrationError(NeutroError):
    """Evaluation failed while accumulating a definite integral."""


class InvalidBounds(NeutroError):
    """Set-valued integration bounds that do not form increasing chains."""


class NonMonotoneParameter(NeutroError):
    """Midpoint check failed: the single-parameter family is not monotone."""


class ParseError(NeutroError):
    """Deterministic parse failure with source position.

    Attributes:
        span: (line, column, length) into the input text.
        expected: description of what the parser wanted.
        found: description of what it saw.
    """

    def __init__(self, span, expected, found):
        self.span = span
        self.expected = expected
        self.found = found
        line, column, _ = span
        super().__init__(
            f"parse error at line {line}, column {column}: expected {expected}, found {found}"
        )


class UsageError(NeutroError):
    """Bad command-line usage (unknown name, missing flag...)."""

"""
Engine Errors
One exception hierarchy for every backend, calculus procedure and surface
"""

from typing import Iterable, Optional

# ============================================================================
# EXIT CODES / HTTP STATUS
# ============================================================================

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_UNDECIDED = 3
EXIT_UNSUPPORTED = 4

HTTP_INPUT_ERROR = 400
HTTP_UNDECIDED = 409
HTTP_UNSUPPORTED = 501


class BTrackError(Exception):
    """
    Base class for all engine errors

    Every subclass names the error the way reports and the CLI print it,
    carries a one-line remedy and knows its exit code / HTTP status.
    """

    name = "BTrackError"
    remedy = "check the inputs and try again"
    exit_code = EXIT_INPUT_ERROR
    http_status = HTTP_INPUT_ERROR

    def __init__(self, message: str = "", remedy: Optional[str] = None):
        super().__init__(message or self.name)
        self.message = message or self.name
        if remedy:
            self.remedy = remedy

    def to_dict(self) -> dict:
        return {
            "status": "error",
            "error": self.name,
            "message": self.message,
            "remedy": self.remedy,
        }


# ============================================================================
# INPUT ERRORS (exit 2)
# ============================================================================

class ParseError(BTrackError):
    name = "ParseError"
    remedy = "fix the expression; use explicit '*' and parenthesize rational exponents"

    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnboundVariable(BTrackError):
    name = "UnboundVariable"
    remedy = "bind every variable used by the expression (x, n or k)"


class DivisionByZero(BTrackError):
    name = "DivisionByZero"
    remedy = "avoid dividing by an exact zero element"


class DomainError(BTrackError):
    name = "DomainError"
    remedy = "choose a point or interval inside the function's domain"


class NegativeLeading(DomainError):
    name = "NegativeLeading"
    remedy = "even roots need a positive leading coefficient"


class NotFinite(BTrackError):
    name = "NotFinite"
    remedy = "the value is infinite; standard part and transcendental evaluation need finite input"


class NotEventuallyNonzero(BTrackError):
    name = "NotEventuallyNonzero"
    remedy = "the divisor vanishes on tail indices; pick a divisor that is eventually nonzero"


class NotCauchy(BTrackError):
    name = "NotCauchy"
    remedy = "the sequence does not settle within st_tolerance by the cutoff"


class NotDifferentiable(BTrackError):
    name = "NotDifferentiable"
    remedy = "different infinitesimal increments give different standard parts"


class NoSignChange(BTrackError):
    name = "NoSignChange"
    remedy = "choose an interval [a, b] with f(a)*f(b) < 0"


class NonNumericValue(BTrackError):
    name = "NonNumericValue"
    remedy = "the function has no rational value at a subdivision point"


class DegreeOverflow(BTrackError):
    name = "DegreeOverflow"
    remedy = "rational-function degrees are capped; simplify the expression"


class ConfigError(BTrackError):
    name = "ConfigError"
    remedy = "check --truncation/--precision/--cutoff/--tol and the BTRACK_CONFIG file"


# ============================================================================
# UNDECIDED (exit 3)
# ============================================================================

class Undecided(BTrackError):
    name = "Undecided"
    remedy = "no cofinite agreement found; only a free ultrafilter would decide this"
    exit_code = EXIT_UNDECIDED
    http_status = HTTP_UNDECIDED


# ============================================================================
# BACKEND UNSUPPORTED (exit 4)
# ============================================================================

class NoTransfer(BTrackError):
    name = "NoTransfer"
    remedy = "rational functions carry no transcendental structure; use --backend lc"
    exit_code = EXIT_UNSUPPORTED
    http_status = HTTP_UNSUPPORTED


class UnsupportedBackend(BTrackError):
    name = "UnsupportedBackend"
    remedy = "pick a backend that supports this operation (see --help)"
    exit_code = EXIT_UNSUPPORTED
    http_status = HTTP_UNSUPPORTED

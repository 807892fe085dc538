"""Exception hierarchy shared by every module."""


class ZdiError(Exception):
    """Base class for all errors raised by :mod:`zdi`."""


class ValidationError(ZdiError, ValueError):
    """Input matrix or document failed a structural check."""


class ParseError(ZdiError, ValueError):
    """Matrix document could not be decoded.

    ``line`` and ``column`` are 1-based when known; ``field`` names the
    offending JSON path (e.g. ``entries[0][1]``).
    """

    def __init__(self, message, *, line=None, column=None, field=None):
        self.line = line
        self.column = column
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if field is not None:
            where.append(f"field {field}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class NotHermitian(ValidationError):
    pass


class NotWeightedPermutation(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class HintMismatch(ValidationError):
    """A document's class hint does not describe its matrix."""


class NoConvergence(ZdiError, ArithmeticError):
    pass


class InconsistentFormulations(ZdiError, ArithmeticError):
    """The eigenvalue-minimum and signature-count routes disagree on d."""


class TheoremViolation(ZdiError, AssertionError):
    """A guaranteed structural bound failed; indicates upstream numerical trouble.

    ``diagnostics`` carries the quantities that were compared.
    """

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class NotDivisible(ZdiError, ArithmeticError):
    """Kippenhahn cubic has a nonzero z-free part."""


class NotOnBoundary(ZdiError, ValueError):
    """0 is outside W(A) or in its interior."""


class SearchFailed(ZdiError, RuntimeError):
    def __init__(self, message, best_residual=float("inf"), restarts=0):
        self.best_residual = best_residual
        self.restarts = restarts
        super().__init__(f"{message} (best residual {best_residual:.3e} after {restarts} restarts)")

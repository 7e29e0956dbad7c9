class LambdaError(Exception):
    """
    Base class of every error raised by pyadiabaton. `code` is the stable
    machine-readable identifier reported by the command line front end.
    """

    code = "LAMBDA_ERROR"


class InvalidEnvelope(LambdaError, ValueError):
    code = "INVALID_ENVELOPE"


class InvalidGrid(LambdaError, ValueError):
    code = "INVALID_GRID"


class DegeneratePulse(LambdaError):
    code = "DEGENERATE_PULSE"


class NonUnitary(LambdaError):
    code = "NON_UNITARY"

    def __init__(self, message, *, residual=None):
        super().__init__(message)
        self.residual = residual


class NonFinite(LambdaError):
    code = "NON_FINITE"


class Blowup(LambdaError):
    code = "BLOWUP"


class WindowTooSmall(LambdaError):
    code = "WINDOW_TOO_SMALL"


class WindowExceeded(LambdaError):
    code = "WINDOW_EXCEEDED"


class MultivaluedError(LambdaError):
    """Characteristics have crossed: the adiabatic solution is multivalued."""

    code = "SHOCK"

    def __init__(self, message, *, tau=None, zeta=None):
        super().__init__(message)
        self.tau = tau
        self.zeta = zeta


class NoRoot(LambdaError):
    code = "NO_ROOT"


class Infeasible(LambdaError):
    code = "INFEASIBLE_TARGET"


class CrossedCharacteristics(LambdaError):
    code = "CROSSED_CHARACTERISTICS"


class NonConvergent(LambdaError):
    code = "NON_CONVERGENT"


class ParseError(LambdaError):
    code = "PARSE_ERROR"

    def __init__(self, message, *, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(LambdaError):
    code = "VALIDATION_ERROR"

    def __init__(self, message, *, key=None):
        if key:
            message = f"{key}: {message}"
        super().__init__(message)
        self.key = key


class IoError(LambdaError):
    code = "IO_ERROR"


def _all_errors(cls=LambdaError):
    yield cls
    for sub in cls.__subclasses__():
        yield from _all_errors(sub)


def error_class(code):
    """The LambdaError subclass reported under code; LambdaError if unknown."""
    for cls in _all_errors():
        if cls.code == code:
            return cls
    return LambdaError


def from_info(info):
    """Rebuilds an error from its {type, code, message} record."""
    if info is None:
        return None
    return error_class(info.get("code"))(info.get("message", ""))

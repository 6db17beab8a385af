"""Exception hierarchy shared by all eigextrap modules."""


class EigextrapError(Exception):
    """Base class for library errors."""


class UsageError(EigextrapError, ValueError):
    """Invalid arguments: dimension mismatch, zero start vector, bad config."""


class SingularMatrixError(EigextrapError, ArithmeticError):
    pass


class BreakdownError(EigextrapError, ArithmeticError):
    """An iteration produced a zero or non-finite iterate."""


class DegenerateSpectrumError(EigextrapError, ArithmeticError):
    pass


class ParseError(EigextrapError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFormatError(ParseError):
    def __init__(self, token, line=None):
        self.token = token
        super().__init__(f"unsupported Matrix Market qualifier {token!r}", line)

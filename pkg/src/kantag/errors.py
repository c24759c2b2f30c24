"""Exception hierarchy shared by every module."""


class TaggerError(Exception):
    pass


class ParseError(TaggerError, ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(TaggerError, ValueError):
    pass


class ContractError(TaggerError, ValueError):
    """Inputs violate a structural contract (shapes, alignment, config)."""


class NumericError(TaggerError, ArithmeticError):
    pass

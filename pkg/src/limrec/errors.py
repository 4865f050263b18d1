"""Shared exception types."""


class LimrecError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LimrecError):
    """A value fell outside its declared domain (sort, range, arity)."""


class ParseError(LimrecError):
    """Syntax error in a formula or structure file, with position info."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class FormulaError(LimrecError):
    """Ill-formed AST: sort clash or incompatible tuple lengths."""


class RecognitionError(LimrecError):
    """Input is not in the required graph class; carries a certificate."""

    def __init__(self, message, certificate=None):
        self.certificate = certificate
        super().__init__(message)

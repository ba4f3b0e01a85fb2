"""Exception hierarchy shared across the package."""


class RefdecodeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfig(RefdecodeError):
    """A DecodeConfig field violates its invariant."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InvalidParam(RefdecodeError, ValueError):
    """A generator or harness parameter is out of range."""


class TokenOutOfRange(RefdecodeError):
    """A token id is negative or >= the model's vocab size."""


class LengthMismatch(RefdecodeError):
    """Verification outputs do not have length draft+1."""


class ContextTooShort(RefdecodeError):
    """A scripted model was queried with a context shorter than its prompt."""


class ParseError(RefdecodeError):
    """A dataset or corpus file line could not be parsed."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class SchemaError(RefdecodeError):
    """A dataset record is structurally invalid (missing/ill-typed field)."""


class EmptyInput(RefdecodeError):
    """An aggregate was requested over an empty collection."""


class OutputMismatch(RefdecodeError):
    """Accelerated and stepwise outputs differ; the benchmark aborts."""

"""Exception types shared across the package."""


class GraphDigitError(Exception):
    """Base class for all graphdigit errors."""


class ParameterError(GraphDigitError, ValueError):
    """An argument violates an operation's precondition."""


class ValidationError(GraphDigitError, ValueError):
    """Input data (in-memory or loaded) violates a documented invariant."""


class FormatError(GraphDigitError, ValueError):
    """File content is inconsistent with its own declared header or schema."""


class RasterParseError(FormatError):
    """A raster file could not be parsed; carries the failing byte offset."""

    def __init__(self, message: str, *, byte_offset: int | None = None, path=None):
        self.byte_offset = byte_offset
        self.path = path
        where = f" at byte {byte_offset}" if byte_offset is not None else ""
        src = f" in {path}" if path is not None else ""
        super().__init__(f"{message}{where}{src}")


class DegenerateSampleError(GraphDigitError, ValueError):
    """A statistical test was given a sample it is undefined for."""


class CannotImputeError(GraphDigitError, ValueError):
    """False-negative imputation has no predictions to draw from."""

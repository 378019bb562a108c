"""Exception hierarchy shared by the engine and the CLI."""

from __future__ import annotations


class DetcertError(Exception):
    """Base class for every error raised by detcert."""


class DimensionError(DetcertError, ValueError):
    """Variable counts or index ranges do not match."""


class PolySyntaxError(DetcertError, ValueError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class ValidationError(DetcertError, ValueError):
    """The matrix family is outside what the graded engine accepts."""


class NotQuasihomogeneous(ValidationError):
    def __init__(self, offending: list[tuple[int, int]]):
        self.offending = offending
        cells = ", ".join(f"({i + 1},{j + 1})" for i, j in offending)
        super().__init__(f"entries not weighted homogeneous: {cells}")


class TypeRelationViolated(ValidationError):
    def __init__(self, tuple_ilj: tuple[int, int, int, int] | None, detail: str = ""):
        self.tuple = tuple_ilj
        if tuple_ilj is not None:
            i, l, j, k = tuple_ilj
            detail = (
                f"d[{i + 1},{j + 1}] - d[{i + 1},{k + 1}] != "
                f"d[{l + 1},{j + 1}] - d[{l + 1},{k + 1}]" + (f" ({detail})" if detail else "")
            )
        super().__init__(f"degree type relation violated: {detail}")


class UnconstrainedZeroEntry(ValidationError):
    def __init__(self, cells: list[tuple[int, int]]):
        self.cells = cells
        listed = ", ".join(f"({i + 1},{j + 1})" for i, j in cells)
        super().__init__(f"zero entries whose degree is not pinned by the type relations: {listed}")


class DegenerateEntry(ValidationError):
    """An entry has non-positive degree (a unit entry); the engine rejects it."""


class LevelError(DetcertError, ValueError):
    """A target matrix is not homogeneous of a single level."""


class PreconditionError(DetcertError, ValueError):
    """A certify-level precondition does not hold."""


class RetryLimitExceeded(DetcertError, RuntimeError):
    pass

"""Source positions and diagnostics for desired-state descriptions."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Position:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


NOWHERE = Position(0, 0)


@dataclass(frozen=True)
class Diagnostic:
    position: Position
    severity: str
    message: str

    def __str__(self) -> str:
        return f"{self.position}: {self.severity}: {self.message}"

    def as_dict(self) -> dict:
        return {
            "line": self.position.line,
            "column": self.position.column,
            "severity": self.severity,
            "message": self.message,
        }


class DsdError(Exception):
    """Raised when a description cannot be tokenized, parsed or resolved.

    Carries every diagnostic collected so far; ``str()`` shows the first.
    """

    def __init__(self, diagnostics):
        if isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__(str(self.diagnostics[0]) if self.diagnostics else "error")

    @property
    def position(self) -> Position:
        return self.diagnostics[0].position


class LexError(DsdError):
    pass


class ParseError(DsdError):
    pass


class ResolveError(DsdError):
    pass


def error(position: Position, message: str) -> Diagnostic:
    return Diagnostic(position, "error", message)

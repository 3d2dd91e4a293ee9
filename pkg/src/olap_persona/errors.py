"""Engine-wide error type carrying a stable code and an optional source position."""

from __future__ import annotations


class EngineError(Exception):
    """Raised for every user-facing failure.

    `code` is a stable kebab-case identifier (e.g. "syntax-error",
    "duplicate-key"); `position` is a 1-based (line, column) pair when the
    failure points into some source text.
    """

    def __init__(self, code: str, message: str, position: tuple[int, int] | None = None):
        self.code = code
        self.message = message
        self.position = position
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.position is not None:
            line, col = self.position
            return f"{self.code} at {line}:{col}: {self.message}"
        return f"{self.code}: {self.message}"

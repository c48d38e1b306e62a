"""Exception types; the CLI maps each to an exit code."""


class DexFocusError(Exception):
    exit_code = 1


class FormatError(DexFocusError, ValueError):
    """Malformed input file or stream (exit code 3)."""

    exit_code = 3

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MismatchError(DexFocusError):
    """A plan, trajectory, or stream disagree with each other (exit code 4)."""

    exit_code = 4

"""Exception hierarchy shared by every meshkit module."""


class MeshkitError(Exception):
    """Domain error: a precondition failed or a result would be unreliable."""


class QuiverError(MeshkitError):
    """Malformed quiver data (duplicate ids, dangling references, bad paths)."""


class PreconditionError(MeshkitError, ValueError):
    """An operation was called outside its contract."""


class OutOfWindowError(MeshkitError):
    """The answer depends on data cut off by a truncation frontier."""


class OracleTooLarge(MeshkitError):
    """The brute-force oracle refuses instances above its size cap."""


class ParseError(Exception):
    """Syntax error in a quiver or covering file."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message

"""
Exception hierarchy shared by every pipeline stage.

Each error carries the process exit code the CLI reports for it:
0 success, 1 unexpected, 2 config/schema, 3 precondition/coverage, 4 I/O.
"""
from typing import List, Optional, Sequence


class BfmError(Exception):
    exit_code = 1


class ConfigError(BfmError):
    exit_code = 2

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")


class PreconditionError(BfmError):
    exit_code = 3


class DomainError(PreconditionError, ValueError):
    """Special-function argument outside its domain."""


class SingularityError(PreconditionError):
    """Two points that must be distinct coincide (Green's function singularity)."""


class DegenerateError(PreconditionError):
    """All-zero signal or map where a nonzero one is required."""


class UnitError(PreconditionError):
    pass


class CoverageError(PreconditionError):
    def __init__(self, message: str, missing: Optional[Sequence] = None,
                 available: Optional[Sequence[float]] = None):
        self.missing: List = list(missing or [])
        self.available: List[float] = list(available or [])
        super().__init__(message)


class FresnelParseError(PreconditionError):
    def __init__(self, line_number: int, token: str, message: str):
        self.line_number = line_number
        self.token = token
        super().__init__(f"line {line_number}: {message} (token {token!r})")


class QuadratureError(PreconditionError):
    pass


class DataIOError(BfmError):
    exit_code = 4

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(message)


class TruncationWarning(UserWarning):
    """Series tail certificate did not pass within the configured q_max."""


class QuadratureResidueWarning(UserWarning):
    """Imaginary residue of the phase integral exceeded its diagnostic bound."""

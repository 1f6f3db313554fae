"""Domain errors and their CLI exit codes"""
from typing import Any, Dict, Optional


class EmbeddingError(Exception):
    """Base error. Carries a human detail and the CLI exit code."""

    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None, **context: Any):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code
        self.context: Dict[str, Any] = context

    @property
    def code(self) -> str:
        return type(self).__name__

    def line(self) -> str:
        """Single-line, machine-parseable rendering used by the CLI"""
        return f"{self.code}: {' '.join(self.detail.split())}"


# Input / validation (exit 2)
class MalformedFile(EmbeddingError):
    exit_code = 2


class InvalidSegment(EmbeddingError):
    exit_code = 2


class DegreeViolation(EmbeddingError):
    exit_code = 2

    def __init__(self, vertex: str, detail: str):
        super().__init__(detail, vertex=vertex)
        self.vertex = vertex


class NoPath(EmbeddingError):
    exit_code = 2


class IdMismatch(EmbeddingError):
    exit_code = 2


# Disconnected networks (exit 3)
class DisconnectedPair(EmbeddingError):
    exit_code = 3

    def __init__(self, i: int, j: int, detail: str, components: Optional[list] = None):
        super().__init__(detail, i=i, j=j)
        self.i = i
        self.j = j
        self.components = components or []


# Optimizer failures (exit 4)
class ZeroDistance(EmbeddingError):
    exit_code = 4

    def __init__(self, i: int, j: int):
        super().__init__(f"distance between {i} and {j} is zero; weight d^-alpha undefined", i=i, j=j)
        self.i = i
        self.j = j


class DimensionMismatch(EmbeddingError):
    exit_code = 4


class NonFiniteLayout(EmbeddingError):
    exit_code = 4


class CoincidentPoints(EmbeddingError):
    exit_code = 4

    def __init__(self, i: int, j: int):
        super().__init__(f"points {i} and {j} coincide; direction undefined", i=i, j=j)
        self.i = i
        self.j = j


class DomainViolation(EmbeddingError):
    exit_code = 4


class DegenerateDenominator(EmbeddingError):
    exit_code = 4


class IndexOutOfRange(EmbeddingError):
    exit_code = 4


# Configuration (exit 5)
class InvalidSchedule(EmbeddingError):
    exit_code = 5


class TooFewRuns(EmbeddingError):
    exit_code = 5


class InvalidConfig(EmbeddingError):
    exit_code = 5

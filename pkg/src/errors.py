"""
Exception hierarchy. Every error names the operation that raised it so the
CLI can report it.
"""

from typing import Iterable, Optional


class DualkitError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, operation: str = ''):
        super().__init__(message)
        self.operation = operation

    def describe(self) -> str:
        if self.operation:
            return f"{self.operation}: {self}"
        return str(self)


class DimensionError(DualkitError, ValueError):
    """Matrix is not square or its size is not a perfect square d²."""


class RankDeficient(DualkitError, ArithmeticError):
    """A polar projection or canonical step met a vanishing singular value."""

    def __init__(self, message: str, operation: str = '', smallest: Optional[float] = None):
        super().__init__(message, operation)
        self.smallest = smallest


class EntangledColumn(DualkitError):
    """Some column states U|ij> are not product states."""

    def __init__(self, columns: Iterable[tuple[int, int]], operation: str = 'extract_quantum_design'):
        self.columns = list(columns)
        listed = ', '.join(f'({i},{j})' for i, j in self.columns)
        super().__init__(f"entangled columns: {listed}", operation)


class UnknownGate(DualkitError, KeyError):
    """Name not present in the gate catalog."""

    def __init__(self, name: str, known: Iterable[str]):
        self.name = name
        super().__init__(f"unknown gate {name!r}; known: {', '.join(sorted(known))}", 'named_gate')

    def __str__(self) -> str:
        return self.args[0]


class MeasureMismatch(DualkitError, ValueError):
    """Histograms built from different entanglement measures."""


class NotAPermutation(DualkitError, ValueError):
    """Compact permutation is not a bijection on 1..d²."""

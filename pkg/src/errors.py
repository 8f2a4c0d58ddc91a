"""
Exception hierarchy for digraph kernel computations.

Every error raised by the library derives from DigraphKernelError so callers
(the CLI in particular) can map them to exit codes in one place.
"""

from typing import Optional


class DigraphKernelError(Exception):
    """Root of all library errors"""


class ParseError(DigraphKernelError):
    """Malformed graph input. Carries the 1-based line number when known."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class DuplicateEdge(ParseError):
    """The same (src, dst) pair appears twice"""


class BadWeight(ParseError):
    """Edge weight is not a positive number"""


class DanglingVertex(DigraphKernelError):
    """A zero row of Q needs a dangling policy that was not given"""


class WeaklyDisconnected(DigraphKernelError):
    """Decomposition requested on a graph with several weak components"""


class NotStronglyConnected(DigraphKernelError):
    """Vertex set does not induce a strongly connected subgraph"""


class SingularSystem(DigraphKernelError):
    """Linear system could not be solved (zero pivot or float breakdown)"""


class ZeroDegree(DigraphKernelError):
    """In-degree vanishes on a vertex where a division by it is needed"""


class DimensionMismatch(DigraphKernelError):
    """Operand shapes do not agree"""


class ToleranceUnreachable(DigraphKernelError):
    """Requested accuracy is below what the float evaluation can certify"""


class BadAlpha(DigraphKernelError):
    """Teleport weight alpha (or damping beta) out of range"""


class MaxIterExceeded(DigraphKernelError):
    """Iteration did not reach the tolerance within the iteration cap"""


class PeriodicCabal(DigraphKernelError):
    """Plain power limit requested while some cabal has period above 1"""


class UnknownVertex(DigraphKernelError):
    """Vertex label not present in the graph"""


class InvariantViolation(DigraphKernelError):
    """A constructed matrix breaks one of its defining properties"""


class ArithmeticModeError(DigraphKernelError):
    """Float-only operation invoked on exact data (or the reverse)"""


__all__ = [
    'DigraphKernelError',
    'ParseError',
    'DuplicateEdge',
    'BadWeight',
    'DanglingVertex',
    'WeaklyDisconnected',
    'NotStronglyConnected',
    'SingularSystem',
    'ZeroDegree',
    'DimensionMismatch',
    'ToleranceUnreachable',
    'BadAlpha',
    'MaxIterExceeded',
    'PeriodicCabal',
    'UnknownVertex',
    'InvariantViolation',
    'ArithmeticModeError',
]

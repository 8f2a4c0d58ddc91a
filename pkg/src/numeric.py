"""
Module Numeric: exact (rational) and float arithmetic backends

Exact data lives in numpy object arrays of fractions.Fraction, float data in
float64 arrays. The two never mix inside one matrix; every operation picks a
backend from the dtype of its inputs or from an explicit ``exact`` flag.
"""

import logging
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, SingularSystem

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]

# Exact arithmetic is the default up to this many vertices
RATIONAL_MAX_VERTICES = 512


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction, decimal string, "p/q" string or float to Fraction.

    Floats go through their shortest repr, so 0.85 becomes 17/20 rather than
    the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError(f"Not a number: {value!r}")
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"Non-finite value {value!r} has no rational form")
        return Fraction(repr(float(value)))
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return Fraction(str(value).strip())


def is_exact_array(arr: np.ndarray) -> bool:
    """True for object arrays (the exact representation)"""
    return np.asarray(arr).dtype == object


def to_float_array(arr) -> np.ndarray:
    """Float64 copy of an exact or float array"""
    arr = np.asarray(arr)
    if arr.dtype == object:
        return np.vectorize(float, otypes=[np.float64])(arr) if arr.size else arr.astype(np.float64)
    return arr.astype(np.float64)


def format_scalar(value) -> Union[str, float]:
    """JSON form of a scalar: reduced "p/q" strings for rationals, floats as-is.

    ``json`` writes floats with repr, which is the shortest round-trip form.
    """
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return str(Fraction(int(value)))
    return value


def format_array(arr) -> list:
    """Nested lists of formatted scalars"""
    arr = np.asarray(arr)
    if arr.ndim == 0:
        return format_scalar(arr.item())
    return [format_array(row) if np.ndim(row) else format_scalar(row) for row in arr]


class RationalBackend:
    """Exact arithmetic on object arrays of Fraction"""

    exact = True
    name = 'rational'

    def array(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=object)
        out = np.empty(arr.shape, dtype=object)
        for idx, value in np.ndenumerate(arr):
            out[idx] = to_fraction(value)
        return out

    def scalar(self, value) -> Fraction:
        return to_fraction(value)

    def zeros(self, shape) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def ones(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=object)
        out.fill(Fraction(1))
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = Fraction(1)
        return out

    def is_zero(self, arr, tol: Optional[float] = None) -> bool:
        return all(value == 0 for value in np.asarray(arr).ravel())

    def max_abs(self, arr):
        arr = np.asarray(arr).ravel()
        return max((abs(v) for v in arr), default=Fraction(0))

    def solve(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Solve A X = B by Gauss-Jordan elimination over the whole block B"""
        A = np.asarray(A, dtype=object)
        B = np.asarray(B, dtype=object)
        _check_square_system(A, B)
        vector_rhs = B.ndim == 1
        m = A.shape[0]

        X = self.array(A)
        Y = self.array(B.reshape(m, -1))

        for i in range(m):
            pivot = next((r for r in range(i, m) if X[r, i] != 0), None)
            if pivot is None:
                raise SingularSystem(f"Zero pivot in column {i} of a {m}x{m} exact system")
            if pivot != i:
                X[[i, pivot]] = X[[pivot, i]]
                Y[[i, pivot]] = Y[[pivot, i]]

            inv = 1 / X[i, i]
            X[i, :] = X[i, :] * inv
            Y[i, :] = Y[i, :] * inv

            for r in range(m):
                factor = X[r, i]
                if r != i and factor != 0:
                    X[r, :] = X[r, :] - factor * X[i, :]
                    Y[r, :] = Y[r, :] - factor * Y[i, :]

        logger.debug(f"Exact solve: {m}x{m} system, {Y.shape[1]} right-hand side(s)")
        return Y.ravel() if vector_rhs else Y


class FloatBackend:
    """Binary64 arithmetic; one LU factorisation per solve call"""

    exact = False
    name = 'float'

    def __init__(self, tolerance: float = 1e-12):
        self.tolerance = tolerance

    def array(self, values) -> np.ndarray:
        return to_float_array(values)

    def scalar(self, value) -> float:
        return float(value)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.float64)

    def ones(self, n: int) -> np.ndarray:
        return np.ones(n, dtype=np.float64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.float64)

    def is_zero(self, arr, tol: Optional[float] = None) -> bool:
        tol = self.tolerance if tol is None else tol
        arr = np.asarray(arr, dtype=np.float64)
        return arr.size == 0 or float(np.max(np.abs(arr))) <= tol

    def max_abs(self, arr) -> float:
        arr = np.asarray(arr, dtype=np.float64)
        return float(np.max(np.abs(arr))) if arr.size else 0.0

    def solve(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = to_float_array(A)
        B = to_float_array(B)
        _check_square_system(A, B)
        if A.shape[0] == 0:
            return B.copy()

        try:
            lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
        except (ValueError, np.linalg.LinAlgError) as e:
            raise SingularSystem(f"LU factorisation failed: {e}") from e

        diag = np.abs(np.diag(lu))
        scale = max(1.0, float(np.max(np.abs(A))))
        if float(np.min(diag)) <= np.finfo(np.float64).eps * scale * A.shape[0]:
            raise SingularSystem(
                f"Numerically singular {A.shape[0]}x{A.shape[0]} system "
                f"(smallest pivot {float(np.min(diag)):.3e})"
            )

        X = scipy.linalg.lu_solve((lu, piv), B)
        if not np.all(np.isfinite(X)):
            raise SingularSystem("Float solve produced non-finite values")
        return X


def _check_square_system(A: np.ndarray, B: np.ndarray):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"Coefficient matrix must be square, got shape {A.shape}")
    if B.shape[0] != A.shape[0]:
        raise DimensionMismatch(
            f"Right-hand side has {B.shape[0]} rows, system has {A.shape[0]}"
        )


def get_backend(exact: bool, tolerance: float = 1e-12):
    """Factory: backend matching the arithmetic mode"""
    if exact:
        return RationalBackend()
    return FloatBackend(tolerance=tolerance)


def backend_for(arr, tolerance: float = 1e-12):
    """Backend matching the dtype of an existing array"""
    return get_backend(is_exact_array(arr), tolerance=tolerance)


def resolve_exact(n: int, requested: Optional[str] = None,
                  threshold: int = RATIONAL_MAX_VERTICES) -> bool:
    """Pick the arithmetic for a graph with n vertices.

    Args:
        n: vertex count
        requested: 'rational', 'float' or None for the size-based default
        threshold: largest n handled exactly by default
    """
    if requested is None:
        exact = n <= threshold
    elif requested in ('rational', 'exact'):
        exact = True
    elif requested == 'float':
        exact = False
    else:
        raise ValueError(f"Unknown arithmetic mode: {requested!r}")
    logger.debug(f"Arithmetic for n={n}: {'rational' if exact else 'float'}")
    return exact


__all__ = [
    'Scalar',
    'RATIONAL_MAX_VERTICES',
    'to_fraction',
    'is_exact_array',
    'to_float_array',
    'format_scalar',
    'format_array',
    'RationalBackend',
    'FloatBackend',
    'get_backend',
    'backend_for',
    'resolve_exact',
]

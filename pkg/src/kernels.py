"""
Module Kernels: right/left kernel bases of the rw Laplacian and the projection

Right basis: gamma_i is 1 on the exclusive part H_i, 0 off the reach R_i and
equals the probability that a walker started on a common vertex is absorbed
into cabal B_i. Left basis: gamma_bar_i is the stationary distribution of
S restricted to B_i, zero elsewhere. Pi = Gamma Gamma_bar is the asymptotic
projection for both consensus and diffusion.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .core import MatrixForm, RW_KINDS, STOCHASTIC_KINDS, support_digraph
from .errors import (
    DimensionMismatch,
    InvariantViolation,
    SingularSystem,
    ZeroDegree,
)
from .numeric import backend_for, format_array, is_exact_array, to_float_array
from .structure import ReachDecomposition, reach_decomposition

logger = logging.getLogger(__name__)

# Residual tolerance for float-mode kernel checks
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KernelBases:
    """
    Zero-eigenspace bases of an rw Laplacian

    Attributes:
        gamma: n x k, columns gamma_1..gamma_k (right kernel)
        gamma_bar: k x n, rows gamma_bar_1..gamma_bar_k (left kernel)
        projection: Pi = gamma @ gamma_bar
        decomposition: the reach decomposition the bases were built from
    """

    gamma: np.ndarray
    gamma_bar: np.ndarray
    projection: np.ndarray
    decomposition: ReachDecomposition
    vertex_ids: tuple = field(default=())

    @property
    def k(self) -> int:
        return self.gamma.shape[1]

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact_array(self.gamma)

    def to_dict(self) -> dict:
        return {
            'k': self.k,
            'vertices': list(self.vertex_ids),
            'gamma': format_array(self.gamma.T),
            'gamma_bar': format_array(self.gamma_bar),
            'projection': format_array(self.projection),
        }


def _stochastic(form: Union[MatrixForm, np.ndarray]) -> np.ndarray:
    if isinstance(form, MatrixForm):
        return form.stochastic()
    return np.asarray(form)


def right_kernel_basis(form: Union[MatrixForm, np.ndarray], dec: ReachDecomposition,
                       tol: float = RESIDUAL_TOL) -> np.ndarray:
    """
    Basis gamma_1..gamma_k of the right kernel (n x k)

    Args:
        form: rw Laplacian (plain or teleport), stochastic matrix, or the
              combinatorial Laplacian (same right kernel as D^-1 L)
        dec: reach decomposition of the graph the form describes
        tol: float-mode residual bound for L gamma_i = 0

    All k right-hand sides share one elimination of (I - S_CC).
    """
    S = _stochastic(form)
    backend = backend_for(S)
    n, k = S.shape[0], dec.k
    if dec.n != n:
        raise DimensionMismatch(f"Decomposition has {dec.n} vertices, matrix has {n}")

    gamma = backend.zeros((n, k))
    for i, reach in enumerate(dec.reaches):
        for v in reach.exclusive:
            gamma[v, i] = backend.scalar(1)

    common = sorted(dec.common_vertices)
    if common:
        A = backend.eye(len(common)) - S[np.ix_(common, common)]
        rhs = backend.zeros((len(common), k))
        for i, reach in enumerate(dec.reaches):
            rhs[:, i] = S[np.ix_(common, sorted(reach.exclusive))].sum(axis=1)
        X = backend.solve(A, rhs)
        for i, reach in enumerate(dec.reaches):
            for row, v in enumerate(common):
                if v in reach.vertices:
                    gamma[v, i] = X[row, i]

    residual = gamma - S @ gamma
    if not backend.is_zero(residual, tol):
        if backend.exact:
            raise InvariantViolation("Exact right kernel basis fails L gamma = 0")
        raise SingularSystem(f"Right kernel residual {backend.max_abs(residual):.3e} exceeds {tol}")
    logger.debug(f"Right kernel: k={k}, {len(common)} common vertex(es) solved")
    return gamma


def left_kernel_basis(form: Union[MatrixForm, np.ndarray], dec: ReachDecomposition,
                      tol: float = RESIDUAL_TOL) -> np.ndarray:
    """
    Basis gamma_bar_1..gamma_bar_k of the left kernel (k x n)

    Each row is the stationary distribution of S restricted to one cabal,
    found by a direct solve with the normalisation replacing one redundant
    equation. Cabals may be periodic, so no power iteration is used.
    """
    if isinstance(form, MatrixForm) and form.kind not in STOCHASTIC_KINDS + RW_KINDS:
        raise ValueError(f"Left kernel basis needs S or I - S, got {form.kind.value}")
    S = _stochastic(form)
    backend = backend_for(S)
    n = S.shape[0]
    if dec.n != n:
        raise DimensionMismatch(f"Decomposition has {dec.n} vertices, matrix has {n}")

    gamma_bar = backend.zeros((dec.k, n))
    for i, reach in enumerate(dec.reaches):
        cabal = sorted(reach.cabal)
        m = len(cabal)
        M = (backend.eye(m) - S[np.ix_(cabal, cabal)]).T.copy()
        M[m - 1, :] = backend.scalar(1)
        rhs = backend.zeros(m)
        rhs[m - 1] = backend.scalar(1)
        stationary = backend.solve(M, rhs)
        for row, v in enumerate(cabal):
            gamma_bar[i, v] = stationary[row]

    residual = gamma_bar - gamma_bar @ S
    if not backend.is_zero(residual, tol):
        if backend.exact:
            raise InvariantViolation("Exact left kernel basis fails gamma_bar S = gamma_bar")
        raise SingularSystem(f"Left kernel residual {backend.max_abs(residual):.3e} exceeds {tol}")
    return gamma_bar


def left_kernel_combinatorial(gamma_bar: np.ndarray, D: Union[MatrixForm, np.ndarray]) -> np.ndarray:
    """Rows gamma_bar_i D^-1: a left kernel basis of the combinatorial Laplacian D - DS"""
    D = D.data if isinstance(D, MatrixForm) else np.asarray(D)
    gamma_bar = np.asarray(gamma_bar)
    if D.shape != (gamma_bar.shape[1], gamma_bar.shape[1]):
        raise DimensionMismatch(f"D has shape {D.shape}, basis has {gamma_bar.shape[1]} columns")

    out = gamma_bar.copy()
    for v in range(D.shape[0]):
        if any(value != 0 for value in gamma_bar[:, v]):
            if D[v, v] == 0:
                raise ZeroDegree(f"In-degree is zero at support vertex index {v}")
            out[:, v] = gamma_bar[:, v] / D[v, v]
    return out


def projection(gamma: np.ndarray, gamma_bar: np.ndarray) -> np.ndarray:
    """Pi = Gamma Gamma_bar (n x n)"""
    gamma = np.asarray(gamma)
    gamma_bar = np.asarray(gamma_bar)
    if gamma.ndim != 2 or gamma_bar.ndim != 2 or gamma.shape[1] != gamma_bar.shape[0] \
            or gamma.shape[0] != gamma_bar.shape[1]:
        raise DimensionMismatch(
            f"Bases do not match: gamma {gamma.shape}, gamma_bar {gamma_bar.shape}"
        )
    return gamma @ gamma_bar


def kernel_bases(form: MatrixForm, dec: Optional[ReachDecomposition] = None,
                 tol: float = RESIDUAL_TOL) -> KernelBases:
    """
    Both bases and the projection for one matrix form

    Args:
        form: stochastic or rw Laplacian form (plain or teleport)
        dec: decomposition to use; defaults to that of the digraph the form
             describes (its support), so teleport forms get their own reaches
    """
    if dec is None:
        dec = reach_decomposition(support_digraph(form))
    gamma = right_kernel_basis(form, dec, tol)
    gamma_bar = left_kernel_basis(form, dec, tol)
    bases = KernelBases(gamma, gamma_bar, projection(gamma, gamma_bar), dec, form.vertex_ids)
    logger.info(f"Kernel bases ({'rational' if bases.exact else 'float'}): n={bases.n}, k={bases.k}")
    return bases


# ========== SPECTRUM DIAGNOSTIC ==========

@dataclass
class SpectrumReport:
    """Float diagnostic on the zero eigenvalue and the rest of the spectrum"""

    expected_k: int
    eigenvalues: List[complex]
    rank: int
    rank_squared: int
    zero_eigenvalue_count: int
    min_nonzero_real_part: Optional[float]
    violations: List[str] = field(default_factory=list)

    @property
    def geometric_multiplicity(self) -> int:
        return len(self.eigenvalues) - self.rank

    @property
    def algebraic_multiplicity(self) -> int:
        return len(self.eigenvalues) - self.rank_squared

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            'expected_k': self.expected_k,
            'geometric_multiplicity': self.geometric_multiplicity,
            'algebraic_multiplicity': self.algebraic_multiplicity,
            'zero_eigenvalue_count': self.zero_eigenvalue_count,
            'min_nonzero_real_part': self.min_nonzero_real_part,
            'eigenvalues': [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            'violations': list(self.violations),
            'ok': self.ok,
        }


def spectrum_check(form: Union[MatrixForm, np.ndarray], k: int, tol: float = 1e-9) -> SpectrumReport:
    """
    Check that 0 is a semisimple eigenvalue of multiplicity k and every other
    eigenvalue has positive real part (float arithmetic)
    """
    if isinstance(form, MatrixForm):
        laplacian = to_float_array(form.laplacian())
    else:
        laplacian = to_float_array(form)
    n = laplacian.shape[0]
    scale = max(1.0, float(np.max(np.abs(laplacian)))) if n else 1.0

    rank = int(np.linalg.matrix_rank(laplacian, tol=tol * scale)) if n else 0
    rank_squared = int(np.linalg.matrix_rank(laplacian @ laplacian, tol=tol * scale * scale)) if n else 0
    eigenvalues = sorted(np.linalg.eigvals(laplacian).tolist(), key=abs) if n else []

    zero_count = sum(1 for z in eigenvalues if abs(z) <= np.sqrt(tol) * scale)
    others = eigenvalues[k:]
    min_real = min((z.real for z in others), default=None)

    violations = []
    if n - rank != k:
        violations.append(f"geometric multiplicity of 0 is {n - rank}, expected {k}")
    if n - rank_squared != k:
        violations.append(f"algebraic multiplicity of 0 is {n - rank_squared}, expected {k}")
    for z in others:
        if z.real <= -tol:
            violations.append(f"eigenvalue {z:.6g} has negative real part")

    for message in violations:
        logger.warning(f"Spectrum check: {message}")
    return SpectrumReport(k, eigenvalues, rank, rank_squared, zero_count, min_real, violations)


__all__ = [
    'RESIDUAL_TOL',
    'KernelBases',
    'right_kernel_basis',
    'left_kernel_basis',
    'left_kernel_combinatorial',
    'projection',
    'kernel_bases',
    'SpectrumReport',
    'spectrum_check',
]

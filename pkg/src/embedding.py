"""
Module Embedding: properties of the one-step heat kernel S~ = e^{-L}

S~ is row-stochastic and non-negative, its positivity pattern is the
reflexive-transitive closure of the walk digraph, and the rw Laplacian
I - S~ has the same kernels as L.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np

from .core import Digraph, MatrixKind, build_matrix
from .dynamics import heat_kernel
from .kernels import kernel_bases, left_kernel_basis, projection, right_kernel_basis

logger = logging.getLogger(__name__)


def transitive_closure(g: Digraph) -> Digraph:
    """
    Edge i -> j (weight 1) whenever j is reachable from i by a path of length >= 1

    Vertices on a cycle get a self-loop.
    """
    closure = nx.transitive_closure(g.to_networkx(), reflexive=False)
    return Digraph(g.vertex_ids, tuple((u, v, 1) for u, v in closure.edges()))


def _walk_closure(S: np.ndarray) -> np.ndarray:
    """Boolean pattern of the reflexive-transitive closure of the walk digraph i -> j iff S[i][j] > 0"""
    n = S.shape[0]
    walk = nx.DiGraph()
    walk.add_nodes_from(range(n))
    walk.add_edges_from((i, j) for i in range(n) for j in range(n) if S[i, j] > 0)
    closure = nx.transitive_closure(walk, reflexive=True)
    pattern = np.zeros((n, n), dtype=bool)
    for i, j in closure.edges():
        pattern[i, j] = True
    return pattern


@dataclass
class ClosureReport:
    """Row sums, sign and positivity pattern of e^{-L}, plus kernel agreement"""

    is_row_stochastic: bool
    row_sum_residual: float
    is_nonnegative: bool
    min_entry: float
    closure_consistent: bool
    mismatches: List[Tuple[str, str]] = field(default_factory=list)
    kernels_equal: Optional[bool] = None
    projection_distance: Optional[float] = None

    @property
    def passed(self) -> bool:
        return (self.is_row_stochastic and self.is_nonnegative and self.closure_consistent
                and self.kernels_equal is not False)

    def to_dict(self) -> dict:
        return {
            'is_row_stochastic': self.is_row_stochastic,
            'row_sum_residual': self.row_sum_residual,
            'is_nonnegative': self.is_nonnegative,
            'min_entry': self.min_entry,
            'closure_consistent': self.closure_consistent,
            'mismatches': [list(m) for m in self.mismatches],
            'kernels_equal': self.kernels_equal,
            'projection_distance': self.projection_distance,
            'passed': self.passed,
        }


def projection_distance(g: Digraph, dangling_policy='self_loop', heat_tol: float = 1e-13) -> float:
    """
    Infinity-norm distance between Pi built from S and Pi~ built from e^{-L}

    Both use the reach decomposition of g; only S is swapped for S~.
    """
    form = build_matrix(g, MatrixKind.RW_LAPLACIAN, dangling_policy, exact=False)
    bases = kernel_bases(form)
    S_tilde = heat_kernel(form, 1.0, heat_tol)
    dec = bases.decomposition
    projection_tilde = projection(right_kernel_basis(S_tilde, dec), left_kernel_basis(S_tilde, dec))
    distance = float(np.max(np.abs(bases.projection - projection_tilde).sum(axis=1)))
    logger.debug(f"Projection distance between L and I - e^-L: {distance:.3e}")
    return distance


def kernel_equality_check(g: Digraph, tol: float = 1e-8, dangling_policy='self_loop',
                          heat_tol: float = 1e-13) -> bool:
    """True when L and I - e^{-L} give the same projection within tol"""
    return projection_distance(g, dangling_policy, heat_tol) < tol


def closure_check(g: Digraph, eps: float = 1e-12, dangling_policy='self_loop',
                  heat_tol: float = 1e-13, kernel_tol: Optional[float] = 1e-8) -> ClosureReport:
    """
    Check e^{-L} against the closure of the walk digraph

    Entries above eps count as positive. kernel_tol=None skips the kernel
    comparison (it needs a weakly connected graph).
    """
    form = build_matrix(g, MatrixKind.RW_LAPLACIAN, dangling_policy, exact=False)
    S_tilde = heat_kernel(form, 1.0, heat_tol)

    row_sum_residual = float(np.max(np.abs(S_tilde.sum(axis=1) - 1.0)))
    min_entry = float(np.min(S_tilde))
    expected = _walk_closure(form.stochastic())
    observed = S_tilde > eps
    mismatches = [
        (g.label(i), g.label(j))
        for i, j in zip(*np.nonzero(expected != observed))
    ]

    report = ClosureReport(
        is_row_stochastic=row_sum_residual <= eps,
        row_sum_residual=row_sum_residual,
        is_nonnegative=min_entry >= -eps,
        min_entry=min_entry,
        closure_consistent=not mismatches,
        mismatches=mismatches,
    )
    if kernel_tol is not None:
        report.projection_distance = projection_distance(g, dangling_policy, heat_tol)
        report.kernels_equal = report.projection_distance < kernel_tol

    if report.passed:
        logger.info(f"Closure check passed (row residual {row_sum_residual:.2e})")
    else:
        logger.warning(f"Closure check failed: {len(mismatches)} pattern mismatch(es)")
    return report


__all__ = [
    'transitive_closure',
    'ClosureReport',
    'projection_distance',
    'kernel_equality_check',
    'closure_check',
]

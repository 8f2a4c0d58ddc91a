"""
Module Ranking: influence, extended graph and pagerank

Pagerank with teleport weight alpha (damping beta = 1/(1+alpha)) is reached
three ways that must agree:
    resolvent   (alpha/n) 1^T (alpha I + L)^-1
    power       p <- beta p S + (1-beta)/n 1^T from the uniform start
    extension   2 I~(b_v) - 1/n, from the influence on the extended graph
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from .core import DanglingPolicy, Digraph, MatrixForm, MatrixKind, build_matrix
from .errors import BadAlpha, MaxIterExceeded
from .kernels import KernelBases, kernel_bases
from .numeric import backend_for, format_array, format_scalar, get_backend, to_float_array, to_fraction
from .structure import reach_decomposition

logger = logging.getLogger(__name__)


def beta_from_alpha(alpha):
    """beta = 1/(1+alpha); exact for rational alpha"""
    if alpha <= 0:
        raise BadAlpha(f"alpha must be positive, got {alpha}")
    return 1 / (1 + alpha)


def alpha_from_beta(beta):
    """alpha = 1/beta - 1; beta must lie in (0, 1)"""
    if not 0 < beta < 1:
        raise BadAlpha(f"beta must lie in (0, 1), got {beta}")
    return 1 / beta - 1


def _laplacian(form: Union[MatrixForm, np.ndarray]) -> np.ndarray:
    if isinstance(form, MatrixForm):
        return form.laplacian()
    return np.asarray(form)


def influence_vector(bases: KernelBases) -> np.ndarray:
    """(1^T/n) Pi: the pull of each vertex on the consensus value"""
    ones = get_backend(bases.exact).ones(bases.n)
    return ones @ bases.projection / bases.n


# ========== EXTENDED GRAPH ==========

def extend_graph(g: Digraph, alpha, dangling_policy='self_loop') -> Digraph:
    """
    E_alpha[G]: a new leader b_v with edge b_v -> v of weight alpha per vertex

    Vertices are ordered b_1..b_n then 1..n. Original edges carry the entries
    of S (dangling rows patched per policy) so the rw Laplacian of the result
    has blocks 0 (b rows), -alpha/(1+alpha) I and I - S/(1+alpha). Each b_v
    keeps a self-loop of weight 1.
    """
    alpha = to_fraction(alpha)
    if alpha <= 0:
        raise BadAlpha(f"alpha must be positive, got {alpha}")

    leaders = tuple(f"b_{label}" for label in g.vertex_ids)
    clash = set(leaders) & set(g.vertex_ids)
    if clash:
        raise ValueError(f"Labels {sorted(clash)} collide with extension vertex names")

    n = g.n
    S = build_matrix(g, MatrixKind.STOCHASTIC, dangling_policy, exact=True).data
    edges = []
    for v in range(n):
        edges.append((v, v, Fraction(1)))
        edges.append((v, n + v, alpha))
    for v in range(n):
        for u in range(n):
            if S[v, u] != 0:
                edges.append((n + u, n + v, S[v, u]))
    return Digraph(leaders + g.vertex_ids, tuple(edges))


# ========== PAGERANK ROUTES ==========

def resolvent(form: Union[MatrixForm, np.ndarray], alpha) -> np.ndarray:
    """(alpha I + L)^-1 for the rw Laplacian of form"""
    L = _laplacian(form)
    backend = backend_for(L)
    alpha = backend.scalar(alpha)
    if alpha <= 0:
        raise BadAlpha(f"alpha must be positive, got {alpha}")
    n = L.shape[0]
    return backend.solve(alpha * backend.eye(n) + L, backend.eye(n))


def pagerank_resolvent(form: Union[MatrixForm, np.ndarray], alpha) -> np.ndarray:
    """
    Pagerank as the unique measure y with y^T (alpha I + L) = (alpha/n) 1^T

    Args:
        form: rw Laplacian or stochastic form (plain or teleporting)
        alpha: positive teleport weight
    """
    L = _laplacian(form)
    backend = backend_for(L)
    alpha = backend.scalar(alpha)
    if alpha <= 0:
        raise BadAlpha(f"alpha must be positive, got {alpha}")
    n = L.shape[0]
    rhs = backend.ones(n) * alpha / n
    y = backend.solve((alpha * backend.eye(n) + L).T, rhs)
    logger.debug(f"Pagerank by resolvent: n={n}, alpha={alpha}")
    return y


def power_iterates(S: Union[MatrixForm, np.ndarray], beta: float,
                   p0: Optional[np.ndarray] = None) -> Iterator[np.ndarray]:
    """Successive iterates p <- beta p S + (1-beta)/n 1^T (float), starting after p0"""
    if not 0 < beta < 1:
        raise BadAlpha(f"beta must lie in (0, 1), got {beta}")
    S = to_float_array(S.stochastic() if isinstance(S, MatrixForm) else S)
    n = S.shape[0]
    beta = float(beta)
    p = np.full(n, 1.0 / n) if p0 is None else to_float_array(p0)
    teleport = (1.0 - beta) / n
    while True:
        p = beta * (p @ S) + teleport
        yield p


def pagerank_power(S: Union[MatrixForm, np.ndarray], beta: float = 0.85, tol: float = 1e-10,
                   max_iter: int = 1000) -> Tuple[np.ndarray, int]:
    """
    Power iteration from the uniform measure until the l1 change drops below tol

    Returns:
        (pagerank, iterations)
    """
    S_float = to_float_array(S.stochastic() if isinstance(S, MatrixForm) else S)
    previous = np.full(S_float.shape[0], 1.0 / S_float.shape[0])
    for iteration, p in enumerate(power_iterates(S_float, beta, previous), start=1):
        delta = float(np.abs(p - previous).sum())
        if delta < tol:
            logger.info(f"Power iteration converged in {iteration} iteration(s) (beta={float(beta):g})")
            return p, iteration
        if iteration >= max_iter:
            raise MaxIterExceeded(
                f"No convergence to {tol:g} after {max_iter} iterations (last change {delta:.3e})"
            )
        previous = p


def pagerank_via_extension(g: Digraph, alpha, dangling_policy='self_loop', exact: bool = True) -> np.ndarray:
    """Pagerank read off the influence of the leaders b_v on E_alpha[G]: 2 I~(b_v) - 1/n"""
    extended = extend_graph(g, alpha, dangling_policy)
    form = build_matrix(extended, MatrixKind.RW_LAPLACIAN, exact=exact)
    bases = kernel_bases(form, reach_decomposition(extended))
    influence = influence_vector(bases)
    n = g.n
    scale = get_backend(exact).scalar(1) / n
    return np.array([2 * influence[v] - scale for v in range(n)], dtype=object if exact else np.float64)


def pagerank_with_teleport_rows(g: Digraph, alpha, rows: Iterable[int], exact: bool = True) -> np.ndarray:
    """Resolvent pagerank of S with the given rows replaced by the uniform row"""
    backend = get_backend(exact)
    S = build_matrix(g, MatrixKind.STOCHASTIC, DanglingPolicy.SELF_LOOP, exact=exact).data.copy()
    n = g.n
    for v in rows:
        S[v, :] = backend.scalar(1) / n
    return pagerank_resolvent(backend.eye(n) - S, alpha)


# ========== TELEPORT RELATIONS ==========

@dataclass
class TeleportReport:
    """Residuals of the relations between plain and teleporting pagerank"""

    alpha: object
    beta: object
    leaders: List[str]
    pagerank: np.ndarray
    pagerank_teleport: np.ndarray
    pi: object
    pi_t: object
    pi_t_predicted: object
    leader_residual: object
    rest_residual: object
    pi_residual: object
    order_preserved: bool
    tol: float = 0.0

    @property
    def holds(self) -> bool:
        residuals = (self.leader_residual, self.rest_residual, self.pi_residual)
        return self.order_preserved and all(r <= self.tol for r in residuals)

    def to_dict(self) -> dict:
        return {
            'alpha': format_scalar(self.alpha),
            'beta': format_scalar(self.beta),
            'leaders': list(self.leaders),
            'pagerank': format_array(self.pagerank),
            'pagerank_teleport': format_array(self.pagerank_teleport),
            'pi': format_scalar(self.pi),
            'pi_t': format_scalar(self.pi_t),
            'pi_t_predicted': format_scalar(self.pi_t_predicted),
            'leader_residual': format_scalar(self.leader_residual),
            'rest_residual': format_scalar(self.rest_residual),
            'pi_residual': format_scalar(self.pi_residual),
            'order_preserved': self.order_preserved,
            'holds': self.holds,
        }


def _same_order(a: np.ndarray, b: np.ndarray, indices: List[int], tol: float) -> bool:
    def sign(x) -> int:
        return 0 if abs(x) <= tol else (1 if x > 0 else -1)

    return all(
        sign(a[i] - a[j]) == sign(b[i] - b[j])
        for pos, i in enumerate(indices) for j in indices[pos + 1:]
    )


def teleport_relation_check(g: Digraph, alpha, exact: bool = True, tol: float = 1e-10) -> TeleportReport:
    """
    Compare pagerank under the self-loop and uniform dangling policies

    With L the in-degree-0 vertices and R the rest:
        p_t on L = (beta pi_t + 1 - beta) p on L
        p_t on R = (beta/(1-beta) pi_t + 1) p on R
        pi_t = (1-beta) pi / (1 - beta pi)
    Residuals are exact zeros in rational mode.
    """
    backend = get_backend(exact)
    alpha = backend.scalar(alpha)
    beta = beta_from_alpha(alpha)
    leaders = g.sources()
    rest = [v for v in range(g.n) if v not in leaders]

    plain = pagerank_resolvent(build_matrix(g, MatrixKind.RW_LAPLACIAN, DanglingPolicy.SELF_LOOP, exact), alpha)
    teleport = pagerank_resolvent(build_matrix(g, MatrixKind.RW_LAPLACIAN, DanglingPolicy.UNIFORM, exact), alpha)

    zero = backend.scalar(0)
    pi = sum((plain[v] for v in leaders), zero)
    pi_t = sum((teleport[v] for v in leaders), zero)
    pi_t_predicted = (1 - beta) * pi / (1 - beta * pi)

    leader_factor = beta * pi_t + (1 - beta)
    rest_factor = beta / (1 - beta) * pi_t + 1
    leader_residual = max((abs(teleport[v] - leader_factor * plain[v]) for v in leaders), default=zero)
    rest_residual = max((abs(teleport[v] - rest_factor * plain[v]) for v in rest), default=zero)
    pi_residual = abs(pi_t - pi_t_predicted)

    report = TeleportReport(
        alpha, beta, g.labels(leaders), plain, teleport, pi, pi_t, pi_t_predicted,
        leader_residual, rest_residual, pi_residual,
        _same_order(plain, teleport, rest, 0 if exact else tol),
        0.0 if exact else tol,
    )
    logger.info(f"Teleport relations {'hold' if report.holds else 'FAIL'}: pi={pi}, pi_t={pi_t}")
    return report


# ========== REPORT ==========

@dataclass
class RankReport:
    """Influence and pagerank of one graph"""

    influence: np.ndarray
    pagerank: np.ndarray
    alpha: object
    beta: object
    leaders: List[str]
    pi: object
    iterations: int
    pagerank_teleport: Optional[np.ndarray] = None
    pi_t: Optional[object] = None
    vertex_ids: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            'vertices': list(self.vertex_ids),
            'influence': format_array(self.influence),
            'pagerank': format_array(self.pagerank),
            'pagerank_teleport': None if self.pagerank_teleport is None else format_array(self.pagerank_teleport),
            'leaders': list(self.leaders),
            'pi': format_scalar(self.pi),
            'pi_t': None if self.pi_t is None else format_scalar(self.pi_t),
            'alpha': format_scalar(self.alpha),
            'beta': format_scalar(self.beta),
            'iterations': self.iterations,
        }


def rank_report(g: Digraph, beta=None, alpha=None, teleport: str = 'none', exact: bool = True,
                tol: float = 1e-10, max_iter: int = 1000) -> RankReport:
    """
    Influence, resolvent pagerank and power-iteration count

    Exactly one of alpha and beta may be given; beta defaults to 17/20.
    teleport='uniform' adds the teleporting pagerank and pi_t.
    """
    if alpha is not None and beta is not None:
        raise BadAlpha("Give alpha or beta, not both")
    backend = get_backend(exact)
    if alpha is None:
        beta = backend.scalar(Fraction(17, 20) if beta is None else beta)
        alpha = alpha_from_beta(beta)
    else:
        alpha = backend.scalar(alpha)
        beta = beta_from_alpha(alpha)
    if teleport not in ('none', 'uniform'):
        raise ValueError(f"Unknown teleport mode {teleport!r}")

    plain_form = build_matrix(g, MatrixKind.RW_LAPLACIAN, DanglingPolicy.SELF_LOOP, exact)
    influence = influence_vector(kernel_bases(plain_form))
    pagerank = pagerank_resolvent(plain_form, alpha)
    leaders = g.sources()
    zero = backend.scalar(0)

    report = RankReport(
        influence, pagerank, alpha, beta, g.labels(leaders),
        sum((pagerank[v] for v in leaders), zero), 0, vertex_ids=list(g.vertex_ids),
    )
    power_form = plain_form
    if teleport == 'uniform':
        power_form = build_matrix(g, MatrixKind.RW_LAPLACIAN, DanglingPolicy.UNIFORM, exact)
        report.pagerank_teleport = pagerank_resolvent(power_form, alpha)
        report.pi_t = sum((report.pagerank_teleport[v] for v in leaders), zero)
    _, report.iterations = pagerank_power(power_form, float(beta), tol, max_iter)
    return report


__all__ = [
    'beta_from_alpha',
    'alpha_from_beta',
    'influence_vector',
    'extend_graph',
    'resolvent',
    'pagerank_resolvent',
    'power_iterates',
    'pagerank_power',
    'pagerank_via_extension',
    'pagerank_with_teleport_rows',
    'TeleportReport',
    'teleport_relation_check',
    'RankReport',
    'rank_report',
]

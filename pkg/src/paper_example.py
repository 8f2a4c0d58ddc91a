"""
Module Paper Example: golden checks on the seven-vertex fixture graph

Edges 1->2, 1->6, 3->4, 4->5, 5->3, 3->7, 6->7, 7->6 (unit weights). Two
reaches meet in the common part {6, 7}; cabal {1} is a leader and cabal
{3, 4, 5} is a 3-cycle. Every printed vector and matrix of the worked
example is recomputed and compared, exactly where the arithmetic allows.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction as F
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from .core import DanglingPolicy, Digraph, MatrixKind, build_matrix, parse_graph
from .dynamics import (
    absorption_probabilities,
    consensus_limit,
    consensus_step,
    diffusion_limit,
    diffusion_step,
    heat_kernel,
)
from .embedding import closure_check, kernel_equality_check
from .kernels import kernel_bases
from .numeric import to_float_array
from .ranking import (
    extend_graph,
    influence_vector,
    pagerank_power,
    pagerank_resolvent,
    pagerank_via_extension,
    pagerank_with_teleport_rows,
    resolvent,
    teleport_relation_check,
)
from .structure import cabal_period, reach_decomposition

logger = logging.getLogger(__name__)

DEFAULT_FIXTURE = Path(__file__).resolve().parent.parent / 'data' / 'g7.edges'

PAGERANK = [F(x, 294) for x in (77, 21, 50, 44, 46, 28, 28)]
PAGERANK_TELEPORT_ROW1 = [F(x, 511) for x in (77, 42, 100, 88, 92, 56, 56)]
PAGERANK_TELEPORT_PRINTED = [F(x, 273) for x in (56, 21, 50, 44, 46, 28, 28)]
INFLUENCE = [F(3, 7), F(0), F(4, 21), F(4, 21), F(4, 21), F(0), F(0)]
GAMMA = [[1, 1, 0, 0, 0, F(2, 3), F(1, 3)], [0, 0, 1, 1, 1, F(1, 3), F(2, 3)]]
GAMMA_BAR = [[1, 0, 0, 0, 0, 0, 0], [0, 0, F(1, 3), F(1, 3), F(1, 3), 0, 0]]
PROJECTION_63 = [
    [9, 0, 0, 0, 0, 0, 0],
    [9, 0, 0, 0, 0, 0, 0],
    [0, 0, 3, 3, 3, 0, 0],
    [0, 0, 3, 3, 3, 0, 0],
    [0, 0, 3, 3, 3, 0, 0],
    [6, 0, 1, 1, 1, 0, 0],
    [3, 0, 2, 2, 2, 0, 0],
]
RESOLVENT_210 = [
    [210, 0, 0, 0, 0, 0, 0],
    [105, 105, 0, 0, 0, 0, 0],
    [0, 0, 120, 30, 60, 0, 0],
    [0, 0, 60, 120, 30, 0, 0],
    [0, 0, 30, 60, 120, 0, 0],
    [56, 0, 8, 2, 4, 112, 28],
    [14, 0, 32, 8, 16, 28, 112],
]

# Three-vertex stochastic matrix of the appendix and the printed logarithm
APPENDIX_S = [[1, 0, 0], [F(1, 2), F(1, 2), 0], [0, F(3, 5), F(2, 5)]]
APPENDIX_LOG_S = [
    [0.0, 0.0, 0.0],
    [np.log(2), -np.log(2), 0.0],
    [np.log(2 ** 11 / 5 ** 5), np.log(5 ** 6 / 2 ** 12), np.log(2 / 5)],
]


@dataclass
class Check:
    """Outcome of one golden comparison"""

    name: str
    passed: bool
    detail: str = ''

    def to_dict(self) -> dict:
        return {'name': self.name, 'passed': self.passed, 'detail': self.detail}


def appendix_digraph() -> Digraph:
    """Digraph whose self-loop stochastic matrix is the appendix 3x3 S"""
    return Digraph.from_labeled_edges([(1, 2, 1), (2, 2, 1), (2, 3, 3), (3, 3, 2)])


def two_cycle() -> Digraph:
    return Digraph.from_labeled_edges([('a', 'b'), ('b', 'a')])


def load_example(path: Optional[Union[str, Path]] = None) -> Digraph:
    """Read the fixture edge list (FileNotFoundError when missing)"""
    path = Path(path) if path is not None else DEFAULT_FIXTURE
    return parse_graph(path.read_text(encoding='utf-8'))


def _exact(actual, expected) -> Tuple[bool, str]:
    actual = np.asarray(actual, dtype=object)
    expected = np.asarray(expected, dtype=object)
    ok = actual.shape == expected.shape and all(a == e for a, e in zip(actual.ravel(), expected.ravel()))
    return ok, '' if ok else f"got {[str(a) for a in actual.ravel()]}"


def _close(actual, expected, tol: float) -> Tuple[bool, str]:
    error = float(np.max(np.abs(to_float_array(actual) - to_float_array(expected))))
    return error <= tol, f"max error {error:.2e} (tol {tol:g})"


def _run(name: str, check: Callable[[], Tuple[bool, str]]) -> Check:
    try:
        passed, detail = check()
    except Exception as e:
        logger.debug(f"Check {name!r} raised", exc_info=True)
        passed, detail = False, f"{type(e).__name__}: {e}"
    return Check(name, bool(passed), detail)


def verify_example(path: Optional[Union[str, Path]] = None) -> List[Check]:
    """
    Recompute every printed quantity of the worked example

    Returns one Check per item; a failing item never stops the others.
    Raises only when the fixture cannot be read or parsed.
    """
    g = load_example(path)
    lap = build_matrix(g, MatrixKind.RW_LAPLACIAN, DanglingPolicy.SELF_LOOP)
    S = build_matrix(g, MatrixKind.STOCHASTIC, DanglingPolicy.SELF_LOOP)
    dec = reach_decomposition(g)
    bases = kernel_bases(lap, dec)
    idx = {label: g.index(label) for label in g.vertex_ids}
    half = F(1, 2)

    def reaches():
        got = [r.to_dict(g) for r in dec.reaches]
        want = [
            {'vertices': ['1', '2', '6', '7'], 'cabal': ['1'], 'exclusive': ['1', '2'], 'common': ['6', '7']},
            {'vertices': ['3', '4', '5', '6', '7'], 'cabal': ['3', '4', '5'],
             'exclusive': ['3', '4', '5'], 'common': ['6', '7']},
        ]
        return got == want, f"got {got}"

    def matrices():
        ok1, d1 = _exact(S.data[idx['1']], [1, 0, 0, 0, 0, 0, 0])
        ok6, d6 = _exact(S.data[idx['6']], [half, 0, 0, 0, 0, 0, half])
        ok7, d7 = _exact(lap.data[idx['7']], [0, 0, -half, 0, 0, -half, 1])
        return ok1 and ok6 and ok7, ' '.join(filter(None, (d1, d6, d7)))

    def projection_63():
        return _exact(bases.projection / 7, np.array(PROJECTION_63, dtype=object) * F(1, 63))

    def pagerank_routes():
        resolvent_route = pagerank_resolvent(lap, 1)
        extension_route = pagerank_via_extension(g, 1)
        power_route, _ = pagerank_power(S, 0.5, tol=1e-12)
        ok_r, detail = _exact(resolvent_route, PAGERANK)
        ok_e, _ = _exact(extension_route, PAGERANK)
        ok_p, power_detail = _close(power_route, PAGERANK, 1e-11)
        return ok_r and ok_e and ok_p, detail or f"power route {power_detail}"

    def teleport_definition():
        report = teleport_relation_check(g, 1)
        ok, detail = _exact(report.pagerank_teleport, PAGERANK_TELEPORT_ROW1)
        ok = ok and report.holds and report.pi == F(11, 42) and report.pi_t == F(11, 73)
        return ok, detail or f"pi={report.pi}, pi_t={report.pi_t}, relations hold={report.holds}"

    def teleport_printed():
        row1 = pagerank_with_teleport_rows(g, 1, [idx['1']])
        row2 = pagerank_with_teleport_rows(g, 1, [idx['2']])
        matches_row1, _ = _exact(row1, PAGERANK_TELEPORT_PRINTED)
        matches_row2, _ = _exact(row2, PAGERANK_TELEPORT_PRINTED)
        detail = (f"printed vector matches row-2 teleporting: {matches_row2}; "
                  f"row-1 teleporting (in-degree-0 vertex): {matches_row1}")
        return matches_row2 and not matches_row1, detail

    def convergence_rate():
        _, iterations = pagerank_power(S, 0.85, tol=1e-4)
        return iterations <= 60, f"{iterations} iterations"

    def heat_limit():
        H = heat_kernel(lap.to_float(), 100.0, tol=1e-9)
        return _close(H, bases.projection, 1e-8)

    def appendix_log():
        H = heat_kernel(-np.array(APPENDIX_LOG_S), 1.0)
        return _close(H, APPENDIX_S, 1e-12)

    def appendix_exponential():
        form = build_matrix(appendix_digraph(), MatrixKind.RW_LAPLACIAN, DanglingPolicy.SELF_LOOP, exact=False)
        H = heat_kernel(form)
        return _close(H, scipy.linalg.expm(-form.data), 1e-12)

    def extension_blocks():
        extended = extend_graph(g, 1)
        lap_ext = build_matrix(extended, MatrixKind.RW_LAPLACIAN)
        lower_left = lap_ext.data[7:, :7]
        ok_block, detail = _exact(lower_left, -half * np.eye(7, dtype=int).astype(object))
        k = reach_decomposition(extended).k
        return ok_block and k == 7, detail or f"{k} reaches"

    def closure():
        report = closure_check(g)
        cycle = kernel_equality_check(two_cycle())
        return report.passed and cycle, f"G7 closure passed {report.passed}, 2-cycle kernels equal {cycle}"

    checks = [
        ('reach decomposition', reaches),
        ('stochastic matrix and rw Laplacian rows', matrices),
        ('right kernel basis', lambda: _exact(bases.gamma.T, GAMMA)),
        ('left kernel basis', lambda: _exact(bases.gamma_bar, GAMMA_BAR)),
        ('gamma_bar_2 is stationary under diffusion',
         lambda: _exact(diffusion_step(bases.gamma_bar[1], S), GAMMA_BAR[1])),
        ('gamma_1 is fixed by consensus', lambda: _exact(consensus_step(bases.gamma[:, 0], S), GAMMA[0])),
        ('projection column 1', lambda: _exact(bases.projection[:, idx['1']], [1, 1, 0, 0, 0, F(2, 3), F(1, 3)])),
        ('projection scaled by 1/7', projection_63),
        ('influence vector', lambda: _exact(influence_vector(bases), INFLUENCE)),
        ('diffusion limit from vertex 6',
         lambda: _exact(diffusion_limit(np.eye(7, dtype=int)[idx['6']], bases),
                        [F(2, 3), 0, F(1, 9), F(1, 9), F(1, 9), 0, 0])),
        ('consensus limit from vertex 2', lambda: _exact(consensus_limit(np.eye(7, dtype=int)[:, idx['2']], bases), [0] * 7)),
        ('absorption at vertices 6 and 7',
         lambda: _exact([absorption_probabilities(idx['6'], bases), absorption_probabilities(idx['7'], bases)],
                        [[F(2, 3), F(1, 3)], [F(1, 3), F(2, 3)]])),
        ('period of cabal {3,4,5}',
         lambda: (cabal_period(g, dec.reaches[1].cabal) == 3, f"period {cabal_period(g, dec.reaches[1].cabal)}")),
        ('resolvent (I + L)^-1', lambda: _exact(resolvent(lap, 1), np.array(RESOLVENT_210, dtype=object) * F(1, 210))),
        ('pagerank by resolvent, extension and power', pagerank_routes),
        ('teleporting pagerank (in-degree-0 row) and relations', teleport_definition),
        ('printed teleporting pagerank reading', teleport_printed),
        ('power iteration at beta 0.85', convergence_rate),
        ('extended graph blocks', extension_blocks),
        ('heat kernel at t=100 approaches projection', heat_limit),
        ('appendix logarithm exponentiates back to S', appendix_log),
        ('appendix heat kernel against scipy expm', appendix_exponential),
        ('closure pattern and kernel equality', closure),
    ]
    results = [_run(name, check) for name, check in checks]
    failed = sum(not c.passed for c in results)
    logger.info(f"Worked example: {len(results) - failed}/{len(results)} checks passed")
    return results


__all__ = [
    'DEFAULT_FIXTURE',
    'Check',
    'appendix_digraph',
    'two_cycle',
    'load_example',
    'verify_example',
]

"""
Module Core: weighted digraph representation, file ingestion and matrix forms

Orientation convention (used by every other module):
    Q[i][j] = w_ji  when the edge j -> i exists.
Rows of Q index edge *heads*. Information flows along edges (j -> i), the
random walker steps i -> j with probability S[i][j], i.e. against the edges.
"""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import (
    BadWeight,
    DanglingVertex,
    DuplicateEdge,
    InvariantViolation,
    ParseError,
    UnknownVertex,
)
from .numeric import get_backend, is_exact_array, to_float_array, to_fraction

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, Fraction]


class MatrixKind(str, Enum):
    """Matrix forms derived from a digraph"""
    ADJACENCY = 'adjacency'                          # Q
    IN_DEGREE = 'in_degree'                          # D
    STOCHASTIC = 'stochastic'                        # S = D^-1 Q
    STOCHASTIC_TELEPORT = 'stochastic_teleport'      # S_t
    COMBINATORIAL = 'combinatorial'                  # L = D - Q
    RW_LAPLACIAN = 'rw_laplacian'                    # I - S
    RW_LAPLACIAN_TELEPORT = 'rw_laplacian_teleport'  # I - S_t


class DanglingPolicy(str, Enum):
    """How an all-zero row of Q (in-degree 0 vertex) is patched"""
    SELF_LOOP = 'self_loop'
    UNIFORM = 'uniform'


STOCHASTIC_KINDS = (MatrixKind.STOCHASTIC, MatrixKind.STOCHASTIC_TELEPORT)
RW_KINDS = (MatrixKind.RW_LAPLACIAN, MatrixKind.RW_LAPLACIAN_TELEPORT)


def order_labels(labels: Iterable[str]) -> List[str]:
    """Numeric ascending when every label is an integer, else lexicographic"""
    labels = list(dict.fromkeys(labels))
    try:
        return sorted(labels, key=lambda s: (int(s), s))
    except ValueError:
        return sorted(labels)


@dataclass(frozen=True)
class Digraph:
    """
    Vertex-labelled weighted digraph

    Attributes:
        vertex_ids: ordered vertex labels; index i in edges refers to vertex_ids[i]
        edges: (src_index, dst_index, weight) with weight a positive Fraction
    """

    vertex_ids: Tuple[str, ...]
    edges: Tuple[Edge, ...] = ()
    _index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        vertex_ids = tuple(str(v) for v in self.vertex_ids)
        if len(set(vertex_ids)) != len(vertex_ids):
            raise ValueError("Vertex labels must be unique")

        n = len(vertex_ids)
        seen = set()
        edges = []
        for src, dst, weight in self.edges:
            src, dst = int(src), int(dst)
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError(f"Edge ({src}, {dst}) out of range for {n} vertices")
            weight = to_fraction(weight)
            if weight <= 0:
                raise BadWeight(
                    f"Edge {vertex_ids[src]} -> {vertex_ids[dst]} has non-positive weight {weight}"
                )
            if (src, dst) in seen:
                raise DuplicateEdge(f"Duplicate edge {vertex_ids[src]} -> {vertex_ids[dst]}")
            seen.add((src, dst))
            edges.append((src, dst, weight))

        object.__setattr__(self, 'vertex_ids', vertex_ids)
        object.__setattr__(self, 'edges', tuple(sorted(edges, key=lambda e: (e[0], e[1]))))
        object.__setattr__(self, '_index', {v: i for i, v in enumerate(vertex_ids)})

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    @classmethod
    def from_labeled_edges(cls, edges: Iterable[Sequence], vertices: Iterable[str] = ()) -> 'Digraph':
        """Build from (src_label, dst_label[, weight]) tuples with the canonical vertex order"""
        edges = [tuple(e) for e in edges]
        labels = [str(v) for v in vertices]
        for e in edges:
            labels.extend([str(e[0]), str(e[1])])
        ordered = order_labels(labels)
        index = {v: i for i, v in enumerate(ordered)}
        triples = [
            (index[str(e[0])], index[str(e[1])], e[2] if len(e) > 2 else Fraction(1))
            for e in edges
        ]
        return cls(tuple(ordered), tuple(triples))

    def index(self, label) -> int:
        """Index of a vertex label"""
        try:
            return self._index[str(label)]
        except KeyError:
            raise UnknownVertex(f"Unknown vertex {label!r}") from None

    def label(self, index: int) -> str:
        return self.vertex_ids[index]

    def labels(self, indices: Iterable[int]) -> List[str]:
        return [self.vertex_ids[i] for i in sorted(indices)]

    def successors(self, v: int) -> List[int]:
        return [d for s, d, _ in self.edges if s == v]

    def predecessors(self, v: int) -> List[int]:
        return [s for s, d, _ in self.edges if d == v]

    def sources(self) -> List[int]:
        """In-degree-0 vertices: exactly the all-zero rows of Q"""
        has_in = {d for _, d, _ in self.edges}
        return [v for v in range(self.n) if v not in has_in]

    def to_networkx(self) -> nx.DiGraph:
        """networkx view with integer nodes 0..n-1 and a 'weight' attribute"""
        G = nx.DiGraph()
        G.add_nodes_from(range(self.n))
        G.add_weighted_edges_from(self.edges)
        return G

    def subgraph(self, indices: Iterable[int]) -> 'Digraph':
        """Induced subgraph, vertex order preserved"""
        keep = sorted(set(indices))
        remap = {old: new for new, old in enumerate(keep)}
        edges = [(remap[s], remap[d], w) for s, d, w in self.edges if s in remap and d in remap]
        return Digraph(tuple(self.vertex_ids[i] for i in keep), tuple(edges))


# ========== PARSING ==========

_DOT_ID = r'"[^"]*"|[A-Za-z0-9_.\-]+'
_DOT_HEADER = re.compile(r'^\s*(strict\s+)?digraph\s*(' + _DOT_ID + r')?\s*\{', re.IGNORECASE)
_DOT_ATTRS = re.compile(r'\[([^\]]*)\]\s*$')
_DOT_WEIGHT = re.compile(r'weight\s*=\s*"?([^",\s]+)"?')


def _parse_weight(token: str, line_number: int) -> Fraction:
    try:
        weight = to_fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"malformed weight {token!r}", line_number) from None
    if weight <= 0:
        raise BadWeight(f"weight must be positive, got {token}", line_number)
    return weight


def _assemble(edges: List[Tuple[str, str, Fraction, int]], vertices: List[str]) -> Digraph:
    seen = {}
    for src, dst, _, line_number in edges:
        if (src, dst) in seen:
            raise DuplicateEdge(
                f"duplicate edge {src} -> {dst} (first seen on line {seen[(src, dst)]})",
                line_number,
            )
        seen[(src, dst)] = line_number

    labels = list(vertices) + [v for e in edges for v in e[:2]]
    if not labels:
        raise ParseError("graph has no vertices")
    return Digraph.from_labeled_edges([(s, d, w) for s, d, w, _ in edges], vertices)


def _parse_edge_list(text: str) -> Digraph:
    edges = []
    vertices = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split('#', 1)[0].split()
        if not tokens:
            continue
        if len(tokens) == 1:
            vertices.append(tokens[0])
        elif len(tokens) in (2, 3):
            weight = _parse_weight(tokens[2], line_number) if len(tokens) == 3 else Fraction(1)
            edges.append((tokens[0], tokens[1], weight, line_number))
        else:
            raise ParseError(f"expected 'src dst [weight]', got {len(tokens)} fields", line_number)
    return _assemble(edges, vertices)


def _strip_quotes(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] == '"':
        return token[1:-1]
    return token


def _parse_dot(text: str) -> Digraph:
    lines = text.splitlines()
    edges = []
    vertices = []
    opened = closed = False

    for line_number, raw in enumerate(lines, start=1):
        line = re.sub(r'(//|#).*$', '', raw).strip()
        if not line:
            continue
        if not opened:
            match = _DOT_HEADER.match(line)
            if not match:
                raise ParseError("expected 'digraph NAME {'", line_number)
            opened = True
            line = line[match.end():]
        if '}' in line:
            line, rest = line.split('}', 1)
            if rest.strip():
                raise ParseError("unexpected text after closing brace", line_number)
            closed = True

        for statement in filter(None, (s.strip() for s in line.split(';'))):
            weight = Fraction(1)
            attrs = _DOT_ATTRS.search(statement)
            if attrs:
                statement = statement[:attrs.start()].strip()
                wmatch = _DOT_WEIGHT.search(attrs.group(1))
                if wmatch:
                    weight = _parse_weight(wmatch.group(1), line_number)
            if '--' in statement:
                raise ParseError("undirected edge '--' in a digraph", line_number)
            raw_parts = [p.strip() for p in statement.split('->')]
            if any(not re.fullmatch(_DOT_ID, p) for p in raw_parts):
                raise ParseError(f"malformed statement {statement!r}", line_number)
            parts = [_strip_quotes(p) for p in raw_parts]
            if len(parts) == 1:
                vertices.append(parts[0])
            else:
                for src, dst in zip(parts, parts[1:]):
                    edges.append((src, dst, weight, line_number))
        if closed:
            break

    if not opened or not closed:
        raise ParseError("unterminated digraph body", len(lines) or None)
    return _assemble(edges, vertices)


def parse_graph(text: str, format: str = 'edge_list') -> Digraph:
    """
    Parse a digraph from text

    Args:
        text: UTF-8 text; edge lists carry one 'src dst [weight]' per line,
              '#' comments, single-token lines declare isolated vertices
        format: 'edge_list' or 'dot_subset'

    Returns:
        Digraph with numeric-ascending vertex order when every label is an
        integer, lexicographic otherwise
    """
    if not text or not text.strip():
        raise ParseError("empty input")
    if format == 'edge_list':
        graph = _parse_edge_list(text)
    elif format == 'dot_subset':
        graph = _parse_dot(text)
    else:
        raise ValueError(f"Unknown graph format: {format!r}")
    logger.debug(f"Parsed {format}: n={graph.n}, {len(graph.edges)} edges")
    return graph


def serialize_graph(g: Digraph) -> str:
    """Canonical edge-list text; parse_graph(serialize_graph(g)) == g for parsed graphs"""
    for label in g.vertex_ids:
        if not label or any(c.isspace() for c in label) or '#' in label:
            raise ValueError(f"Label {label!r} cannot be written to an edge list")
    touched = {s for s, _, _ in g.edges} | {d for _, d, _ in g.edges}
    lines = [g.vertex_ids[v] for v in range(g.n) if v not in touched]
    lines += [f"{g.vertex_ids[s]} {g.vertex_ids[d]} {w}" for s, d, w in g.edges]
    return '\n'.join(lines) + '\n'


# ========== MATRIX FORMS ==========

@dataclass(frozen=True, eq=False)
class MatrixForm:
    """
    One matrix derived from a digraph

    Attributes:
        kind: which form (Q, D, S, S_t, L, I-S, I-S_t)
        data: n x n array (object/Fraction when exact, float64 otherwise)
        dangling_policy: policy used to patch zero rows of Q (None if unpatched)
        vertex_ids: labels of rows/columns
    """

    kind: MatrixKind
    data: np.ndarray
    dangling_policy: Optional[DanglingPolicy] = None
    vertex_ids: Tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact_array(self.data)

    @property
    def is_teleport(self) -> bool:
        return self.kind in (MatrixKind.STOCHASTIC_TELEPORT, MatrixKind.RW_LAPLACIAN_TELEPORT)

    def to_float(self) -> 'MatrixForm':
        return MatrixForm(self.kind, to_float_array(self.data), self.dangling_policy, self.vertex_ids)

    def stochastic(self) -> np.ndarray:
        """Row-stochastic matrix whose rw Laplacian shares this form's right kernel"""
        backend = get_backend(self.exact)
        if self.kind in STOCHASTIC_KINDS:
            return self.data
        if self.kind in RW_KINDS:
            return backend.eye(self.n) - self.data
        if self.kind == MatrixKind.COMBINATORIAL:
            # Row scaling keeps the right kernel: S' = I - diag(L)^-1 L
            S = backend.zeros((self.n, self.n))
            for i in range(self.n):
                d = self.data[i, i]
                if d != 0:
                    S[i, :] = -self.data[i, :] / d
                    S[i, i] = backend.scalar(0)
                else:
                    S[i, i] = backend.scalar(1)
            return S
        raise ValueError(f"{self.kind.value} matrix has no stochastic counterpart")

    def laplacian(self) -> np.ndarray:
        """rw Laplacian I - S of this form"""
        return get_backend(self.exact).eye(self.n) - self.stochastic()


def _raw_adjacency(g: Digraph, exact: bool) -> np.ndarray:
    backend = get_backend(exact)
    Q = backend.zeros((g.n, g.n))
    for src, dst, weight in g.edges:
        Q[dst, src] = weight if exact else float(weight)
    return Q


def _patch_dangling(Q: np.ndarray, zero_rows: List[int], policy: DanglingPolicy,
                    exact: bool) -> np.ndarray:
    backend = get_backend(exact)
    n = Q.shape[0]
    Q = Q.copy()
    for i in zero_rows:
        if policy == DanglingPolicy.SELF_LOOP:
            Q[i, i] = backend.scalar(1)
        else:
            Q[i, :] = Fraction(1, n) if exact else 1.0 / n
    return Q


def _zero_rows(Q: np.ndarray) -> List[int]:
    return [i for i in range(Q.shape[0]) if not any(v != 0 for v in Q[i, :])]


def build_matrix(g: Digraph, kind, dangling_policy=None, exact: bool = True) -> MatrixForm:
    """
    Build one of the matrix forms of g

    Args:
        g: the digraph
        kind: MatrixKind or its string value
        dangling_policy: 'self_loop' or 'uniform'; required for D and the
            S/rw families whenever Q has an all-zero row
        exact: Fraction arithmetic when True, float64 otherwise

    Returns:
        MatrixForm; the uniform policy turns S/rw kinds into their teleport
        variants and self_loop turns them into the plain ones
    """
    kind = MatrixKind(kind)
    policy = DanglingPolicy(dangling_policy) if dangling_policy is not None else None

    if policy is None and kind in (MatrixKind.STOCHASTIC_TELEPORT, MatrixKind.RW_LAPLACIAN_TELEPORT):
        policy = DanglingPolicy.UNIFORM
    if policy == DanglingPolicy.UNIFORM:
        kind = {MatrixKind.STOCHASTIC: MatrixKind.STOCHASTIC_TELEPORT,
                MatrixKind.RW_LAPLACIAN: MatrixKind.RW_LAPLACIAN_TELEPORT}.get(kind, kind)
    elif policy == DanglingPolicy.SELF_LOOP:
        kind = {MatrixKind.STOCHASTIC_TELEPORT: MatrixKind.STOCHASTIC,
                MatrixKind.RW_LAPLACIAN_TELEPORT: MatrixKind.RW_LAPLACIAN}.get(kind, kind)

    backend = get_backend(exact)
    Q = _raw_adjacency(g, exact)
    zero_rows = _zero_rows(Q)
    if policy is not None:
        Q = _patch_dangling(Q, zero_rows, policy, exact)
    elif zero_rows and kind not in (MatrixKind.ADJACENCY, MatrixKind.COMBINATORIAL):
        labels = ', '.join(g.vertex_ids[i] for i in zero_rows)
        raise DanglingVertex(
            f"{kind.value} needs a dangling policy: in-degree 0 at vertex(es) {labels}"
        )

    degrees = Q.sum(axis=1) if g.n else backend.zeros(0)

    if kind == MatrixKind.ADJACENCY:
        data = Q
    elif kind == MatrixKind.IN_DEGREE:
        data = backend.zeros((g.n, g.n))
        for i in range(g.n):
            data[i, i] = degrees[i]
    elif kind == MatrixKind.COMBINATORIAL:
        data = -Q
        for i in range(g.n):
            data[i, i] = degrees[i] - Q[i, i]
    else:
        S = Q.copy()
        for i in range(g.n):
            S[i, :] = Q[i, :] / degrees[i]
        data = S if kind in STOCHASTIC_KINDS else backend.eye(g.n) - S

    form = MatrixForm(kind, data, policy, g.vertex_ids)
    validate_matrix(form)
    logger.debug(f"Built {kind.value} ({backend.name}, policy={policy.value if policy else None}), "
                 f"{len(zero_rows)} dangling row(s)")
    return form


def validate_matrix(form: MatrixForm, tol: float = 1e-12):
    """Check the defining properties of stochastic and Laplacian forms"""
    data = form.data
    n = form.n
    if data.shape != (n, n):
        raise InvariantViolation(f"{form.kind.value} matrix is not square: {data.shape}")
    exact = form.exact
    slack = 0 if exact else tol

    def close(a, b) -> bool:
        return a == b if exact else abs(float(a) - float(b)) <= tol

    if form.kind in STOCHASTIC_KINDS:
        for i in range(n):
            if any(v < -slack for v in data[i, :]):
                raise InvariantViolation(f"Negative entry in row {i} of {form.kind.value}")
            if not close(data[i, :].sum(), 1):
                raise InvariantViolation(f"Row {i} of {form.kind.value} does not sum to 1")
    elif form.kind in RW_KINDS + (MatrixKind.COMBINATORIAL,):
        for i in range(n):
            if not close(data[i, :].sum(), 0):
                raise InvariantViolation(f"Row {i} of {form.kind.value} does not sum to 0")
            if data[i, i] < -slack:
                raise InvariantViolation(f"Negative diagonal at row {i} of {form.kind.value}")
            if any(data[i, j] > slack for j in range(n) if j != i):
                raise InvariantViolation(f"Positive off-diagonal in row {i} of {form.kind.value}")


def support_digraph(form: MatrixForm, threshold: float = 0.0) -> Digraph:
    """Digraph with edge j -> i of weight S[i][j] for every positive entry of S"""
    S = form.stochastic()
    n = S.shape[0]
    labels = form.vertex_ids or tuple(str(i + 1) for i in range(n))
    edges = []
    for i in range(n):
        for j in range(n):
            if S[i, j] > threshold:
                weight = S[i, j] if form.exact else to_fraction(float(S[i, j]))
                edges.append((j, i, weight))
    return Digraph(tuple(labels), tuple(edges))


def weak_components(g: Digraph) -> List[Digraph]:
    """Induced subgraphs of the weakly connected components, ordered by first vertex"""
    components = nx.weakly_connected_components(g.to_networkx())
    return [g.subgraph(c) for c in sorted(components, key=min)]


__all__ = [
    'Digraph',
    'Edge',
    'MatrixKind',
    'DanglingPolicy',
    'MatrixForm',
    'STOCHASTIC_KINDS',
    'RW_KINDS',
    'order_labels',
    'parse_graph',
    'serialize_graph',
    'build_matrix',
    'validate_matrix',
    'support_digraph',
    'weak_components',
]

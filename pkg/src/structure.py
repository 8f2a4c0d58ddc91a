"""
Module Structure: strong components, condensation and reach decomposition

A reach is a maximal reachable set R(v) (reachability along edge direction).
Its cabal B is the set of roots (vertices that reach the whole reach); the
exclusive part H holds the vertices of R in no other reach, the common part
is C = R \\ H. Cabals are exactly the in-degree-0 nodes of the condensation.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Dict, FrozenSet, Iterable, List, Tuple

import networkx as nx

from .core import Digraph
from .errors import NotStronglyConnected, WeaklyDisconnected

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Reach:
    """One reach with its cabal, exclusive and common parts (vertex indices)"""

    vertices: FrozenSet[int]
    cabal: FrozenSet[int]
    exclusive: FrozenSet[int]
    common: FrozenSet[int]

    def to_dict(self, g: Digraph) -> Dict[str, List[str]]:
        return {
            'vertices': g.labels(self.vertices),
            'cabal': g.labels(self.cabal),
            'exclusive': g.labels(self.exclusive),
            'common': g.labels(self.common),
        }


@dataclass(frozen=True)
class ReachDecomposition:
    """
    Reaches of a weakly connected digraph

    Attributes:
        reaches: sorted by (smallest vertex index, smallest cabal index)
        scc_of: strong component id per vertex; ids follow smallest member index
        condensation: Digraph over strong components, labelled by component id
    """

    reaches: Tuple[Reach, ...]
    scc_of: Tuple[int, ...]
    condensation: Digraph

    @property
    def k(self) -> int:
        return len(self.reaches)

    @property
    def n(self) -> int:
        return len(self.scc_of)

    @property
    def cabal_vertices(self) -> FrozenSet[int]:
        return frozenset().union(*(r.cabal for r in self.reaches))

    @property
    def exclusive_vertices(self) -> FrozenSet[int]:
        return frozenset().union(*(r.exclusive for r in self.reaches))

    @property
    def common_vertices(self) -> FrozenSet[int]:
        """C = V minus the union of exclusive parts"""
        return frozenset(range(self.n)) - self.exclusive_vertices

    def to_dict(self, g: Digraph) -> dict:
        return {
            'k': self.k,
            'reaches': [r.to_dict(g) for r in self.reaches],
        }


def strong_components(g: Digraph) -> Tuple[Tuple[int, ...], Digraph]:
    """
    Strongly connected components and condensation digraph

    Returns:
        (scc_of, condensation): scc_of[v] is the component id of v, ids
        numbered by smallest member; condensation has an edge a -> b iff some
        edge of g crosses from component a to component b (weight = total
        crossing weight)
    """
    G = g.to_networkx()
    components = sorted((sorted(c) for c in nx.strongly_connected_components(G)), key=lambda c: c[0])
    scc_of = [0] * g.n
    for cid, members in enumerate(components):
        for v in members:
            scc_of[v] = cid

    crossing = {}
    for src, dst, weight in g.edges:
        a, b = scc_of[src], scc_of[dst]
        if a != b:
            crossing[(a, b)] = crossing.get((a, b), 0) + weight

    condensation = Digraph(
        tuple(str(cid) for cid in range(len(components))),
        tuple((a, b, w) for (a, b), w in crossing.items()),
    )
    logger.debug(f"{len(components)} strong component(s) over {g.n} vertices")
    return tuple(scc_of), condensation


def reach_decomposition(g: Digraph) -> ReachDecomposition:
    """
    Decompose a weakly connected digraph into reaches

    Each in-degree-0 component of the condensation is a cabal; its reach is
    the set reachable from it. Raises WeaklyDisconnected otherwise.
    """
    G = g.to_networkx()
    if g.n == 0 or not nx.is_weakly_connected(G):
        count = nx.number_weakly_connected_components(G) if g.n else 0
        raise WeaklyDisconnected(
            f"Graph has {count} weakly connected components; decompose each separately"
        )

    scc_of, condensation = strong_components(g)
    has_in = {d for _, d, _ in condensation.edges}
    cabal_ids = [c for c in range(condensation.n) if c not in has_in]

    spans = []
    for cid in cabal_ids:
        cabal = frozenset(v for v in range(g.n) if scc_of[v] == cid)
        root = min(cabal)
        vertices = frozenset(nx.descendants(G, root)) | {root}
        spans.append((cabal, vertices))

    reaches = []
    for i, (cabal, vertices) in enumerate(spans):
        others = frozenset().union(*(r for j, (_, r) in enumerate(spans) if j != i))
        exclusive = vertices - others
        reaches.append(Reach(vertices, cabal, exclusive, vertices - exclusive))
    reaches.sort(key=lambda r: (min(r.vertices), min(r.cabal)))

    logger.info(f"Reach decomposition: n={g.n}, k={len(reaches)} reach(es)")
    return ReachDecomposition(tuple(reaches), scc_of, condensation)


def cabal_period(g: Digraph, cabal: Iterable[int]) -> int:
    """
    Period (gcd of directed cycle lengths) of a strongly connected vertex set

    Computed from BFS levels: for each internal edge u -> v the quantity
    level(u) + 1 - level(v) is a multiple of the period, and the gcd over all
    edges equals it. A single vertex without a self-loop is a dangling cabal;
    its patched self-loop gives period 1.
    """
    members = sorted(set(cabal))
    if not members:
        raise NotStronglyConnected("Empty vertex set")
    H = g.to_networkx().subgraph(members)
    if not nx.is_strongly_connected(H):
        raise NotStronglyConnected(
            f"Vertices {g.labels(members)} do not induce a strongly connected subgraph"
        )

    levels = nx.single_source_shortest_path_length(H, members[0])
    period = reduce(gcd, (abs(levels[u] + 1 - levels[v]) for u, v in H.edges()), 0)
    return period or 1


__all__ = [
    'Reach',
    'ReachDecomposition',
    'strong_components',
    'reach_decomposition',
    'cabal_period',
]

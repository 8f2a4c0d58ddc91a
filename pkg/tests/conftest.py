"""
Pytest configuration and fixtures for the digraph kernel test suite.
"""

from fractions import Fraction

import numpy as np
import pytest

from src.core import Digraph, parse_graph
from src.paper_example import DEFAULT_FIXTURE

G7_EDGES = """\
1 2
1 6
3 4
4 5
5 3
3 7
6 7
7 6
"""

RANDOM_SEED = 20240611
RANDOM_INSTANCES = 200


def random_weakly_connected(rng: np.random.Generator, n: int, unit_weights: bool = False) -> Digraph:
    """Random spanning tree with random orientations plus extra edges (self-loops allowed)."""
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(0, v))
        src, dst = (u, v) if rng.random() < 0.5 else (v, u)
        edges[(src, dst)] = 1
    for _ in range(int(rng.integers(0, 2 * n))):
        src, dst = int(rng.integers(0, n)), int(rng.integers(0, n))
        edges.setdefault((src, dst), 1)
    if not unit_weights:
        edges = {pair: int(rng.integers(1, 4)) for pair in edges}
    return Digraph.from_labeled_edges(
        [(src + 1, dst + 1, Fraction(w)) for (src, dst), w in sorted(edges.items())],
        vertices=[str(v + 1) for v in range(n)],
    )


def random_graphs(count: int = RANDOM_INSTANCES, seed: int = RANDOM_SEED, unit_weights: bool = False):
    rng = np.random.default_rng(seed)
    return [random_weakly_connected(rng, int(rng.integers(2, 9)), unit_weights) for _ in range(count)]


@pytest.fixture(scope='session')
def g7():
    """The seven-vertex worked example."""
    return parse_graph(G7_EDGES)


@pytest.fixture
def g7_file(tmp_path):
    """G7 written to a temporary edge-list file."""
    path = tmp_path / 'g7.edges'
    path.write_text(G7_EDGES, encoding='utf-8')
    return path


@pytest.fixture(scope='session')
def fixture_path():
    """Path of the shipped worked-example edge list."""
    return DEFAULT_FIXTURE


@pytest.fixture
def two_cycle():
    return Digraph.from_labeled_edges([('a', 'b'), ('b', 'a')])


@pytest.fixture
def path_abc():
    return Digraph.from_labeled_edges([('a', 'b'), ('b', 'c')])


@pytest.fixture
def star():
    """Two roots feeding one vertex: a -> c <- b."""
    return Digraph.from_labeled_edges([('a', 'c'), ('b', 'c')])


@pytest.fixture
def weighted_cycle():
    """2-cycle with a self-loop on a: S_a = (1/2, 1/2), S_b = (1, 0)."""
    return Digraph.from_labeled_edges([('a', 'b'), ('b', 'a'), ('a', 'a')])


@pytest.fixture
def single_vertex():
    return parse_graph('x\n')


@pytest.fixture(scope='session')
def random_suite():
    """Seeded random weakly connected digraphs, n in 2..8, weights 1..3."""
    return random_graphs()


@pytest.fixture(scope='session')
def random_unit_suite():
    """Seeded random weakly connected digraphs with unit weights."""
    return random_graphs(seed=RANDOM_SEED + 1, unit_weights=True)


def hub_edges(n: int) -> str:
    """Vertex 0 linked both ways to each of 1..n-1."""
    return ''.join(f'0 {v}\n{v} 0\n' for v in range(1, n))


@pytest.fixture(scope='session')
def cycle_300():
    """Directed cycle on 300 vertices."""
    return parse_graph(''.join(f'{v} {(v + 1) % 300}\n' for v in range(300)))


@pytest.fixture(scope='session')
def hub_300():
    """Bidirectional star on 300 vertices: strongly connected, walk diameter 2."""
    return parse_graph(hub_edges(300))

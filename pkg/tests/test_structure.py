"""
Unit tests for src/structure.py - strong components and reaches
"""

import networkx as nx
import pytest

from src.core import Digraph, parse_graph
from src.errors import NotStronglyConnected, WeaklyDisconnected
from src.structure import cabal_period, reach_decomposition, strong_components


class TestStrongComponents:
    """SCCs and condensation"""

    def test_g7_components(self, g7):
        """G7 has SCCs {1}, {2}, {3,4,5}, {6,7}"""
        scc_of, condensation = strong_components(g7)
        assert scc_of == (0, 1, 2, 2, 2, 3, 3)
        assert condensation.n == 4

    def test_g7_condensation_edges(self, g7):
        """Crossing edges collapse onto component pairs"""
        _, condensation = strong_components(g7)
        assert {(s, d) for s, d, _ in condensation.edges} == {(0, 1), (0, 3), (2, 3)}

    def test_condensation_is_acyclic(self, random_suite):
        """No component reaches itself through another"""
        for g in random_suite:
            _, condensation = strong_components(g)
            assert nx.is_directed_acyclic_graph(condensation.to_networkx())


class TestReachDecomposition:
    """Reaches, cabals, exclusive and common parts"""

    def test_g7_reaches(self, g7):
        """Two reaches sharing the common part {6, 7}"""
        dec = reach_decomposition(g7)
        assert dec.k == 2
        first, second = (r.to_dict(g7) for r in dec.reaches)
        assert first == {'vertices': ['1', '2', '6', '7'], 'cabal': ['1'],
                         'exclusive': ['1', '2'], 'common': ['6', '7']}
        assert second == {'vertices': ['3', '4', '5', '6', '7'], 'cabal': ['3', '4', '5'],
                          'exclusive': ['3', '4', '5'], 'common': ['6', '7']}

    def test_g7_vertex_sets(self, g7):
        """Cabal, exclusive and common vertex sets"""
        dec = reach_decomposition(g7)
        assert g7.labels(dec.cabal_vertices) == ['1', '3', '4', '5']
        assert g7.labels(dec.exclusive_vertices) == ['1', '2', '3', '4', '5']
        assert g7.labels(dec.common_vertices) == ['6', '7']

    def test_path_single_reach(self, path_abc):
        """a -> b -> c is one reach led by a"""
        dec = reach_decomposition(path_abc)
        assert dec.k == 1
        assert dec.reaches[0].to_dict(path_abc)['cabal'] == ['a']
        assert not dec.common_vertices

    def test_star_two_reaches(self, star):
        """a -> c <- b gives two reaches sharing c"""
        dec = reach_decomposition(star)
        assert dec.k == 2
        assert [r.to_dict(star)['cabal'] for r in dec.reaches] == [['a'], ['b']]
        assert star.labels(dec.common_vertices) == ['c']

    def test_strongly_connected_single_reach(self, two_cycle):
        """A strongly connected graph is one reach whose cabal is V"""
        dec = reach_decomposition(two_cycle)
        assert dec.k == 1
        assert dec.reaches[0].cabal == frozenset({0, 1})

    def test_single_vertex(self, single_vertex):
        """n=1 is one reach"""
        dec = reach_decomposition(single_vertex)
        assert dec.k == 1
        assert dec.reaches[0].vertices == frozenset({0})

    def test_disconnected_rejected(self):
        """Two islands raise WeaklyDisconnected"""
        with pytest.raises(WeaklyDisconnected):
            reach_decomposition(parse_graph('a b\nc d\n'))

    def test_reach_union_covers_graph(self, random_suite):
        """Reaches cover V and cabals are disjoint"""
        for g in random_suite:
            dec = reach_decomposition(g)
            covered = frozenset().union(*(r.vertices for r in dec.reaches))
            assert covered == frozenset(range(g.n))
            cabals = [r.cabal for r in dec.reaches]
            assert sum(len(c) for c in cabals) == len(frozenset().union(*cabals))

    def test_to_dict(self, g7):
        """Serialised decomposition carries k and labelled reaches"""
        payload = reach_decomposition(g7).to_dict(g7)
        assert payload['k'] == 2
        assert payload['reaches'][1]['cabal'] == ['3', '4', '5']


class TestCabalPeriod:
    """Period of a strongly connected vertex set"""

    def test_three_cycle(self, g7):
        """Cabal {3, 4, 5} has period 3"""
        assert cabal_period(g7, [2, 3, 4]) == 3

    def test_two_cycle(self, two_cycle):
        assert cabal_period(two_cycle, [0, 1]) == 2

    def test_self_loop_makes_aperiodic(self, weighted_cycle):
        """A self-loop gives period 1"""
        assert cabal_period(weighted_cycle, [0, 1]) == 1

    def test_dangling_singleton(self, g7):
        """A lone source counts as aperiodic"""
        assert cabal_period(g7, [0]) == 1

    def test_mixed_cycle_lengths(self):
        """Cycles of length 2 and 3 through one vertex give period 1"""
        g = Digraph.from_labeled_edges([('a', 'b'), ('b', 'a'), ('b', 'c'), ('c', 'a')])
        assert cabal_period(g, [0, 1, 2]) == 1

    def test_not_strongly_connected(self, path_abc):
        """A path is not a cabal"""
        with pytest.raises(NotStronglyConnected):
            cabal_period(path_abc, [0, 1, 2])

    def test_empty(self, g7):
        with pytest.raises(NotStronglyConnected):
            cabal_period(g7, [])

"""
Property tests over seeded random weakly connected digraphs (n in 2..8)
"""

from fractions import Fraction

import numpy as np

from src.core import MatrixKind, build_matrix
from src.dynamics import cesaro_average, diffusion_limit
from src.embedding import closure_check
from src.kernels import kernel_bases
from src.ranking import (
    influence_vector,
    pagerank_power,
    pagerank_resolvent,
    pagerank_via_extension,
    teleport_relation_check,
)
from src.structure import reach_decomposition


def _all_zero(arr):
    return all(v == 0 for v in np.asarray(arr).ravel())


def _exact_rank(matrix):
    """Rank by Gaussian elimination over Fractions"""
    rows = [[Fraction(v) for v in row] for row in np.asarray(matrix)]
    rank = 0
    for col in range(len(rows[0]) if rows else 0):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(rank + 1, len(rows)):
            factor = rows[r][col] / rows[rank][col]
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _brute_force_reach(g, v):
    """Vertices reachable from v along edge direction, v included"""
    seen = {v}
    frontier = [v]
    while frontier:
        u = frontier.pop()
        for w in g.successors(u):
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return frozenset(seen)


class TestKernelProperties:
    """Exact identities of the kernel bases"""

    def test_biorthogonality_and_partition(self, random_suite):
        """gamma_bar_i gamma_j = delta_ij and sum_i gamma_i = 1"""
        for g in random_suite:
            bases = kernel_bases(build_matrix(g, MatrixKind.RW_LAPLACIAN, 'self_loop'))
            product = bases.gamma_bar @ bases.gamma
            assert all(product[i, j] == (1 if i == j else 0) for i in range(bases.k) for j in range(bases.k))
            assert all(row.sum() == 1 for row in bases.gamma)
            assert all(row.sum() == 1 for row in bases.gamma_bar)

    def test_projection_identities(self, random_suite):
        """L Pi = Pi L = 0 and Pi^2 = Pi"""
        for g in random_suite:
            form = build_matrix(g, MatrixKind.RW_LAPLACIAN, 'self_loop')
            P = kernel_bases(form).projection
            assert _all_zero(form.data @ P)
            assert _all_zero(P @ form.data)
            assert _all_zero(P @ P - P)

    def test_right_basis_spans_nullspace(self, random_suite):
        """The columns of Gamma lie in ker L, are independent, and number n - rank L"""
        for g in random_suite:
            form = build_matrix(g, MatrixKind.RW_LAPLACIAN, 'self_loop')
            gamma = kernel_bases(form).gamma
            assert _all_zero(form.data @ gamma)
            assert _exact_rank(gamma) == gamma.shape[1]
            assert g.n - _exact_rank(form.data) == gamma.shape[1]

    def test_absorption_strictly_inside_on_common_part(self, random_suite):
        """0 < gamma_i(v) < 1 for v in C_i; gamma_i = 1 on H_i and 0 off R_i"""
        for g in random_suite:
            bases = kernel_bases(build_matrix(g, MatrixKind.RW_LAPLACIAN, 'self_loop'))
            for i, reach in enumerate(bases.decomposition.reaches):
                for v in range(g.n):
                    value = bases.gamma[v, i]
                    if v in reach.common:
                        assert 0 < value < 1
                    elif v in reach.exclusive:
                        assert value == 1
                    elif v not in reach.vertices:
                        assert value == 0

    def test_teleport_projection(self, random_suite):
        """The identities also hold for the teleporting Laplacian"""
        for g in random_suite[:50]:
            form = build_matrix(g, MatrixKind.RW_LAPLACIAN, 'uniform')
            P = kernel_bases(form).projection
            assert _all_zero(form.data @ P)
            assert _all_zero(P @ form.data)


class TestReachProperties:
    """Decomposition against a brute-force reachability oracle"""

    def test_matches_oracle(self, random_suite):
        """Every reach is the reachable set of each cabal vertex; cabals are exactly the roots"""
        for g in random_suite:
            dec = reach_decomposition(g)
            reachable = {v: _brute_force_reach(g, v) for v in range(g.n)}
            for reach in dec.reaches:
                for b in reach.cabal:
                    assert reachable[b] == reach.vertices
            cabal_members = dec.cabal_vertices
            for v in range(g.n):
                # in a cabal iff no other vertex reaches strictly more
                maximal = not any(reachable[v] < reachable[u] for u in range(g.n))
                assert (v in cabal_members) == maximal

    def test_exclusive_and_common(self, random_suite):
        """H_i lies in no other reach; C is everything else"""
        for g in random_suite:
            dec = reach_decomposition(g)
            for i, reach in enumerate(dec.reaches):
                others = [r.vertices for j, r in enumerate(dec.reaches) if j != i]
                for v in reach.exclusive:
                    assert not any(v in o for o in others)
            assert dec.exclusive_vertices | dec.common_vertices == frozenset(range(g.n))


class TestDynamicsProperties:
    """Averaged walks approach the projection at rate 1/l"""

    def test_cesaro_agreement(self, random_suite):
        """l * ||average_l - p0 Pi||_1 is the same at l = 840 and 8400"""
        # 840 is a multiple of every cabal period up to 8
        for g in random_suite[:40]:
            S = build_matrix(g, MatrixKind.STOCHASTIC, 'self_loop', exact=False)
            p0 = np.full(g.n, 1.0 / g.n)
            limit = diffusion_limit(p0, kernel_bases(S, reach_decomposition(g)))
            scaled = [steps * np.abs(cesaro_average(p0, S, steps) - limit).sum() for steps in (840, 8400)]
            assert abs(scaled[0] - scaled[1]) < 1e-6
            assert scaled[1] / 8400 < 5e-3


class TestRankingProperties:
    """The three pagerank routes agree"""

    def test_routes_agree(self, random_suite):
        for g in random_suite[:40]:
            lap = build_matrix(g, MatrixKind.RW_LAPLACIAN, 'self_loop')
            by_resolvent = pagerank_resolvent(lap, 1)
            assert by_resolvent.sum() == 1
            assert list(pagerank_via_extension(g, 1)) == list(by_resolvent)
            by_power, _ = pagerank_power(lap, 0.5, tol=1e-13)
            assert np.allclose(by_power, by_resolvent.astype(np.float64), atol=1e-11)

    def test_pagerank_positive(self, random_suite):
        for g in random_suite:
            lap = build_matrix(g, MatrixKind.RW_LAPLACIAN, 'self_loop')
            assert all(value > 0 for value in pagerank_resolvent(lap, 1))

    def test_influence_marks_cabals(self, random_suite):
        """influence(v) > 0 exactly on cabal vertices; it sums to 1"""
        for g in random_suite:
            bases = kernel_bases(build_matrix(g, MatrixKind.RW_LAPLACIAN, 'self_loop'))
            influence = influence_vector(bases)
            assert influence.sum() == 1
            cabals = bases.decomposition.cabal_vertices
            for v in range(g.n):
                assert (influence[v] > 0) == (v in cabals)
                assert influence[v] >= 0

    def test_teleport_relations(self, random_suite):
        """Both policies satisfy the leader/rest relations and keep the order on the rest"""
        for g in random_suite[:60]:
            report = teleport_relation_check(g, 1)
            assert report.order_preserved
            assert report.holds


class TestClosureProperties:
    """e^{-L} over unit-weight random graphs"""

    def test_pattern_and_kernels(self, random_unit_suite):
        for g in random_unit_suite[:60]:
            report = closure_check(g)
            assert report.is_row_stochastic
            assert report.is_nonnegative
            assert report.closure_consistent, report.mismatches
            assert report.kernels_equal

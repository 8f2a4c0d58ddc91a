"""
Unit tests for src/dynamics.py - consensus/diffusion steps, limits, heat kernel and walks
"""

import logging
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg

from src.core import MatrixKind, build_matrix
from src.dynamics import (
    absorption_probabilities,
    all_cabals_primitive,
    cesaro_average,
    consensus_limit,
    consensus_step,
    diffusion_limit,
    diffusion_step,
    estimate_absorption,
    evolve_continuous,
    evolve_discrete,
    heat_kernel,
    plain_power_limit,
    sample_walk,
    validate_measure,
)
from src.errors import (
    ArithmeticModeError,
    DimensionMismatch,
    InvariantViolation,
    PeriodicCabal,
    ToleranceUnreachable,
)
from src.kernels import kernel_bases
from src.paper_example import APPENDIX_LOG_S, APPENDIX_S, appendix_digraph
from src.structure import reach_decomposition

NINTH = Fraction(1, 9)


@pytest.fixture
def g7_lap(g7):
    return build_matrix(g7, MatrixKind.RW_LAPLACIAN, 'self_loop')


@pytest.fixture
def g7_S(g7):
    return build_matrix(g7, MatrixKind.STOCHASTIC, 'self_loop')


@pytest.fixture
def g7_bases(g7_lap):
    return kernel_bases(g7_lap)


def _unit(n, i):
    return np.eye(n, dtype=int)[i]


class TestMeasures:
    """Probability vector validation"""

    def test_exact_measure(self):
        p = np.array([Fraction(1, 2), Fraction(1, 2)], dtype=object)
        assert validate_measure(p) is p

    def test_exact_sum_off(self):
        """Exact sums must be exactly 1"""
        with pytest.raises(InvariantViolation):
            validate_measure(np.array([Fraction(1, 2), Fraction(1, 3)], dtype=object))

    def test_negative_entry(self):
        with pytest.raises(InvariantViolation):
            validate_measure(np.array([1.5, -0.5]))

    def test_float_tolerance(self):
        """Float sums within tolerance pass"""
        validate_measure(np.array([0.1, 0.2, 0.7]))


class TestSteps:
    """One step of each process"""

    def test_diffusion_step_conserves_mass(self, g7_S):
        """Uniform measure stays a measure after pS"""
        p = diffusion_step([Fraction(1, 7)] * 7, g7_S)
        assert p.sum() == 1
        assert p[0] == Fraction(5, 14)

    def test_diffusion_step_values(self, g7_S):
        """Mass at vertex 6 splits between vertices 1 and 7"""
        p = diffusion_step(_unit(7, 5), g7_S)
        assert list(p) == [Fraction(1, 2), 0, 0, 0, 0, 0, Fraction(1, 2)]

    def test_consensus_step_fixes_constants(self, g7_S):
        """S1 = 1"""
        assert all(v == 1 for v in consensus_step([1] * 7, g7_S))

    def test_consensus_step_averages(self, g7_S):
        """Vertex 6 averages the values of 1 and 7"""
        x = consensus_step([Fraction(v) for v in range(1, 8)], g7_S)
        assert x[5] == 4

    def test_left_kernel_row_is_stationary(self, g7_S, g7_bases):
        """gamma_bar_2 S = gamma_bar_2"""
        gamma_bar_2 = g7_bases.gamma_bar[1]
        assert list(diffusion_step(gamma_bar_2, g7_S)) == [0, 0, NINTH * 3, NINTH * 3, NINTH * 3, 0, 0]
        assert list(diffusion_step(gamma_bar_2, g7_S)) == list(gamma_bar_2)

    def test_right_kernel_column_is_fixed(self, g7_S, g7_bases):
        """S gamma_1 = gamma_1"""
        gamma_1 = g7_bases.gamma[:, 0]
        assert list(consensus_step(gamma_1, g7_S)) == [1, 1, 0, 0, 0, Fraction(2, 3), Fraction(1, 3)]

    def test_dimension_mismatch(self, g7_S):
        with pytest.raises(DimensionMismatch):
            diffusion_step([1, 0, 0], g7_S)


class TestLimits:
    """Analytic limits through the projection"""

    def test_diffusion_limit_from_vertex_6(self, g7_bases):
        """e_6 Pi = (2/3) gamma_bar_1 + (1/3) gamma_bar_2"""
        limit = diffusion_limit(_unit(7, 5), g7_bases)
        assert list(limit) == [Fraction(2, 3), 0, NINTH, NINTH, NINTH, 0, 0]

    def test_consensus_limit_from_vertex_1(self, g7_bases):
        """Pi e_1 is column 1 of Pi"""
        limit = consensus_limit(_unit(7, 0), g7_bases)
        assert list(limit) == [1, 1, 0, 0, 0, Fraction(2, 3), Fraction(1, 3)]

    def test_consensus_limit_from_vertex_2(self, g7_bases):
        """Vertex 2 is in no cabal, so its opinion is forgotten"""
        assert all(v == 0 for v in consensus_limit(_unit(7, 1), g7_bases))

    def test_duality(self, g7_bases):
        """(p0 Pi) x0 = p0 (Pi x0)"""
        p0 = [Fraction(1, 7)] * 7
        x0 = [Fraction(v, 3) for v in range(7)]
        assert diffusion_limit(p0, g7_bases) @ np.array(x0, dtype=object) == \
            np.array(p0, dtype=object) @ consensus_limit(x0, g7_bases)

    def test_absorption(self, g7_bases):
        """gamma(6) = (2/3, 1/3) and gamma(7) = (1/3, 2/3)"""
        assert list(absorption_probabilities(5, g7_bases)) == [Fraction(2, 3), Fraction(1, 3)]
        assert list(absorption_probabilities(6, g7_bases)) == [Fraction(1, 3), Fraction(2, 3)]

    def test_absorption_out_of_range(self, g7_bases):
        with pytest.raises(IndexError):
            absorption_probabilities(7, g7_bases)


class TestCesaro:
    """Averaged powers converge even with periodic cabals"""

    def test_single_step_is_identity(self, g7_S):
        assert list(cesaro_average(_unit(7, 2), g7_S, 1)) == [0, 0, 1, 0, 0, 0, 0]

    def test_periodic_cabal_average(self, g7_S):
        """Three steps around the 3-cycle average to 1/3 each"""
        average = cesaro_average(_unit(7, 2), g7_S, 3)
        assert list(average) == [0, 0, Fraction(1, 3), Fraction(1, 3), Fraction(1, 3), 0, 0]

    def test_converges_to_projection(self, g7, g7_bases):
        """l1 distance to p0 Pi is below 5e-3 at 1000 steps"""
        S = build_matrix(g7, MatrixKind.STOCHASTIC, 'self_loop', exact=False)
        p0 = np.full(7, 1 / 7)
        average = cesaro_average(p0, S, 1000)
        limit = diffusion_limit([Fraction(1, 7)] * 7, g7_bases).astype(np.float64)
        assert np.abs(average - limit).sum() < 5e-3

    def test_zero_steps_rejected(self, g7_S):
        with pytest.raises(ValueError):
            cesaro_average(_unit(7, 0), g7_S, 0)


class TestPlainPowerLimit:
    """p0 S^m only when every cabal is aperiodic"""

    def test_periodic_cabal_raises(self, g7, g7_S):
        """G7 has a 3-cycle cabal"""
        dec = reach_decomposition(g7)
        assert not all_cabals_primitive(g7, dec)
        with pytest.raises(PeriodicCabal):
            plain_power_limit(_unit(7, 0), g7_S, dec, g7)

    def test_primitive_cabal_converges(self, weighted_cycle):
        """Self-loop makes the cycle primitive; S^200 reaches (2/3, 1/3)"""
        S = build_matrix(weighted_cycle, MatrixKind.STOCHASTIC, exact=False)
        dec = reach_decomposition(weighted_cycle)
        limit = plain_power_limit([1.0, 0.0], S, dec, weighted_cycle)
        assert np.allclose(limit, [2 / 3, 1 / 3], atol=1e-8)


class TestHeatKernel:
    """Scaled and squared Taylor evaluation of e^{-Lt}"""

    def test_matches_scipy_expm(self, g7_lap):
        """Agrees with scipy's Pade evaluation at t = 1"""
        L = g7_lap.to_float()
        assert np.allclose(heat_kernel(L, 1.0), scipy.linalg.expm(-L.data), atol=1e-12)

    def test_time_zero_is_identity(self, g7_lap):
        assert np.array_equal(heat_kernel(g7_lap.to_float(), 0.0), np.eye(7))

    def test_semigroup(self, g7_lap):
        """H(s) H(t) = H(s + t)"""
        L = g7_lap.to_float()
        product = heat_kernel(L, 0.7) @ heat_kernel(L, 1.8)
        assert np.allclose(product, heat_kernel(L, 2.5), atol=1e-11)

    def test_rows_stay_stochastic(self, g7_lap):
        H = heat_kernel(g7_lap.to_float(), 3.0)
        assert np.allclose(H.sum(axis=1), 1.0, atol=1e-12)
        assert H.min() > -1e-12

    def test_large_time_approaches_projection(self, g7_lap, g7_bases):
        """e^{-100 L} is within 1e-8 of Pi"""
        H = heat_kernel(g7_lap.to_float(), 100.0, tol=1e-9)
        assert np.max(np.abs(H - g7_bases.projection.astype(np.float64))) < 1e-8

    def test_appendix_logarithm(self):
        """exp of the printed log S gives back S"""
        H = heat_kernel(-np.array(APPENDIX_LOG_S), 1.0)
        assert np.allclose(H, np.array(APPENDIX_S, dtype=float), atol=1e-12)

    def test_appendix_log_matches_scipy(self):
        """scipy's logm reproduces the printed logarithm"""
        S = build_matrix(appendix_digraph(), MatrixKind.STOCHASTIC, 'self_loop', exact=False).data
        assert np.allclose(S, np.array(APPENDIX_S, dtype=float))
        assert np.allclose(scipy.linalg.logm(S).real, np.array(APPENDIX_LOG_S), atol=1e-10)

    def test_exact_input_rejected(self, g7_lap):
        with pytest.raises(ArithmeticModeError):
            heat_kernel(g7_lap)

    def test_tolerance_below_resolution_is_raised_to_floor(self, g7_lap, caplog):
        """A tol under the roundoff floor is clamped with a warning"""
        L = g7_lap.to_float()
        with caplog.at_level(logging.WARNING, logger='src.dynamics'):
            H = heat_kernel(L, 1.0, tol=1e-20)
        assert 'below float resolution' in caplog.text
        assert np.allclose(H, scipy.linalg.expm(-L.data), atol=1e-12)

    def test_large_time_default_tolerance(self, g7_lap, g7_bases):
        """t = 100 needs 8 squarings; the default tol still evaluates"""
        H = heat_kernel(g7_lap.to_float(), 100.0)
        assert np.max(np.abs(H - g7_bases.projection.astype(np.float64))) < 1e-8

    def test_cycle_of_300(self, cycle_300):
        """n = 300 at t = 1 matches expm and stays stochastic"""
        L = build_matrix(cycle_300, MatrixKind.RW_LAPLACIAN, exact=False)
        H = heat_kernel(L, 1.0)
        assert np.allclose(H, scipy.linalg.expm(-L.data), atol=1e-12)
        assert np.max(np.abs(H.sum(axis=1) - 1.0)) < 1e-12
        assert H.min() >= 0

    def test_term_cap(self, g7_lap):
        """Too few allowed terms raises ToleranceUnreachable"""
        with pytest.raises(ToleranceUnreachable):
            heat_kernel(g7_lap.to_float(), 1.0, max_terms=1)

    def test_negative_time(self, g7_lap):
        with pytest.raises(ValueError):
            heat_kernel(g7_lap.to_float(), -1.0)


class TestWalks:
    """Seeded Monte Carlo walks"""

    def test_seed_reproduces_path(self, g7_S):
        assert sample_walk(g7_S, 5, seed=7, max_steps=50) == sample_walk(g7_S, 5, seed=7, max_steps=50)

    def test_path_follows_support(self, g7_S):
        """Every move has positive probability"""
        path = sample_walk(g7_S, 6, seed=1, max_steps=100)
        assert len(path) == 101
        assert all(g7_S.data[u, v] > 0 for u, v in zip(path, path[1:]))

    def test_start_out_of_range(self, g7_S):
        with pytest.raises(IndexError):
            sample_walk(g7_S, 9)

    def test_absorption_estimate_from_vertex_6(self, g7, g7_S, g7_bases):
        """10^4 walks land within 3 standard errors of (2/3, 1/3)"""
        estimate = estimate_absorption(g7_S, 5, reach_decomposition(g7), walks=10000, seed=0)
        assert estimate.unabsorbed == 0
        assert sum(estimate.counts) == 10000
        assert estimate.within(absorption_probabilities(5, g7_bases))

    def test_estimate_is_seeded(self, g7, g7_S):
        dec = reach_decomposition(g7)
        first = estimate_absorption(g7_S, 6, dec, walks=200, seed=3)
        second = estimate_absorption(g7_S, 6, dec, walks=200, seed=3)
        assert first.counts == second.counts

    def test_start_in_cabal(self, g7, g7_S):
        """A walker starting in a cabal is absorbed at once"""
        estimate = estimate_absorption(g7_S, 3, reach_decomposition(g7), walks=50)
        assert estimate.counts == [0, 50]

    def test_estimate_needs_a_walk(self, g7, g7_S):
        with pytest.raises(ValueError):
            estimate_absorption(g7_S, 6, reach_decomposition(g7), walks=0)

    def test_estimate_to_dict(self, g7, g7_S):
        record = estimate_absorption(g7_S, 3, reach_decomposition(g7), walks=10).to_dict()
        assert record['counts'] == [0, 10]
        assert record['frequencies'] == [0.0, 1.0]
        assert record['standard_errors'] == [0.0, 0.0]


class TestTrajectories:
    """Recorded evolutions and their CSV form"""

    def test_discrete_diffusion(self, g7_S):
        """Steps 0..3 recorded, each an exact measure"""
        trajectory = evolve_discrete([Fraction(1, 7)] * 7, g7_S, 3)
        assert trajectory.times == [0, 1, 2, 3]
        assert all(state.sum() == 1 for state in trajectory.states)

    def test_discrete_consensus_from_vertex_1(self, g7_S):
        """Opinion of vertex 1 reaches vertex 2 after one step"""
        trajectory = evolve_discrete(_unit(7, 0), g7_S, 1, process='consensus')
        assert trajectory.states[1][1] == 1

    def test_diffusion_needs_measure(self, g7_S):
        with pytest.raises(InvariantViolation):
            evolve_discrete([1, 1, 0, 0, 0, 0, 0], g7_S, 2)

    def test_unknown_process(self, g7_S):
        with pytest.raises(ValueError):
            evolve_discrete(_unit(7, 0), g7_S, 2, process='gossip')

    def test_csv(self, g7_S):
        """Header is step then vertex labels; exact values print as p/q"""
        csv = evolve_discrete(_unit(7, 5), g7_S, 1).to_csv()
        lines = csv.strip().splitlines()
        assert lines[0] == 'step,1,2,3,4,5,6,7'
        assert lines[2] == '1,1/2,0,0,0,0,0,1/2'

    def test_continuous(self, g7_lap):
        """t = 0 keeps p0 and consensus keeps constants"""
        L = g7_lap.to_float()
        diffusion = evolve_continuous(np.full(7, 1 / 7), L, [0.0, 1.0])
        assert np.allclose(diffusion.states[0], 1 / 7)
        assert np.isclose(diffusion.states[1].sum(), 1.0)
        consensus = evolve_continuous(np.ones(7), L, [2.0], process='consensus')
        assert np.allclose(consensus.states[0], 1.0)

    def test_continuous_frame(self, g7_lap):
        frame = evolve_continuous(np.full(7, 1 / 7), g7_lap.to_float(), [0.0, 0.5]).to_frame()
        assert list(frame.columns) == ['time', '1', '2', '3', '4', '5', '6', '7']
        assert list(frame['time']) == [0.0, 0.5]

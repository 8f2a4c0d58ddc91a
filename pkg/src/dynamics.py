"""
Module Dynamics: consensus and diffusion evolution, limits and walks

Diffusion moves row measures p <- pS, consensus moves column states x <- Sx.
Asymptotics go through the projection Pi of the kernel bases: diffusion ends
at p0 Pi (as a Cesaro limit when cabals are periodic), consensus at Pi x0.
Continuous time uses the heat kernel e^{-Lt}.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .core import Digraph, MatrixForm
from .errors import (
    ArithmeticModeError,
    DimensionMismatch,
    InvariantViolation,
    PeriodicCabal,
    ToleranceUnreachable,
)
from .kernels import KernelBases
from .numeric import backend_for, format_scalar, is_exact_array, to_float_array
from .structure import ReachDecomposition, cabal_period

logger = logging.getLogger(__name__)

PROCESSES = ('diffusion', 'consensus')

# Largest Taylor degree the heat kernel will use before giving up
HEAT_MAX_TERMS = 60


def _stochastic(S: Union[MatrixForm, np.ndarray]) -> np.ndarray:
    return S.stochastic() if isinstance(S, MatrixForm) else np.asarray(S)


def _vector_like(v, S: np.ndarray) -> np.ndarray:
    """Cast a vector into the arithmetic of S and check its length"""
    v = backend_for(S).array(v)
    if v.ndim != 1 or v.shape[0] != S.shape[0]:
        raise DimensionMismatch(f"Vector of shape {v.shape} does not fit a {S.shape[0]}x{S.shape[0]} matrix")
    return v


def validate_measure(p, tol: float = 1e-12) -> np.ndarray:
    """Return p if it is a probability vector (exactly in rational mode)"""
    p = np.asarray(p)
    exact = is_exact_array(p)
    slack = 0 if exact else tol
    if any(value < -slack for value in p):
        raise InvariantViolation("Measure has a negative entry")
    total = p.sum()
    off = total != 1 if exact else abs(float(total) - 1.0) > tol * max(1, p.size)
    if off:
        raise InvariantViolation(f"Measure sums to {total}, not 1")
    return p


# ========== SINGLE STEPS ==========

def diffusion_step(p, S) -> np.ndarray:
    """p S (one step of the random walk)"""
    S = _stochastic(S)
    return _vector_like(p, S) @ S


def consensus_step(x, S) -> np.ndarray:
    """S x (one round of averaging over in-neighbours)"""
    S = _stochastic(S)
    return S @ _vector_like(x, S)


def cesaro_average(p0, S, steps: int) -> np.ndarray:
    """(1/steps) * sum of p0 S^i for i < steps"""
    if steps < 1:
        raise ValueError(f"Cesaro average needs at least one step, got {steps}")
    S = _stochastic(S)
    p = _vector_like(p0, S)
    total = p.copy()
    for _ in range(steps - 1):
        p = p @ S
        total = total + p
    return total / steps


# ========== LIMITS ==========

def diffusion_limit(p0, bases: KernelBases) -> np.ndarray:
    """p0 Pi: sum over reaches of (p0 gamma_m) gamma_bar_m"""
    return _vector_like(p0, bases.projection) @ bases.projection


def consensus_limit(x0, bases: KernelBases) -> np.ndarray:
    """Pi x0: sum over reaches of (gamma_bar_m x0) gamma_m"""
    return bases.projection @ _vector_like(x0, bases.projection)


def absorption_probabilities(v: int, bases: KernelBases) -> np.ndarray:
    """Probability that a walker started at v ends in each cabal (gamma_1(v)..gamma_k(v))"""
    if not 0 <= v < bases.n:
        raise IndexError(f"Vertex index {v} out of range for {bases.n} vertices")
    return bases.gamma[v, :].copy()


def all_cabals_primitive(g: Digraph, dec: ReachDecomposition) -> bool:
    """True when every cabal has period 1, i.e. every S_BB is primitive"""
    periods = [cabal_period(g, reach.cabal) for reach in dec.reaches]
    for reach, period in zip(dec.reaches, periods):
        if period != 1:
            logger.warning(f"Cabal {g.labels(reach.cabal)} has period {period}; no plain power limit")
    return all(period == 1 for period in periods)


def plain_power_limit(p0, S, dec: ReachDecomposition, g: Digraph, steps: int = 200) -> np.ndarray:
    """
    p0 S^steps, allowed only when all cabals are primitive

    Args:
        g: the digraph S describes (its support, with patched dangling rows)
    """
    if not all_cabals_primitive(g, dec):
        raise PeriodicCabal("Some cabal is periodic; use cesaro_average or diffusion_limit")
    S = _stochastic(S)
    p = _vector_like(p0, S)
    for _ in range(steps):
        p = p @ S
    return p


# ========== HEAT KERNEL ==========

def heat_kernel(L, t: float = 1.0, tol: float = 1e-13, max_terms: int = HEAT_MAX_TERMS) -> np.ndarray:
    """
    e^{-Lt} by a shifted, scaled and squared Taylor series

    Args:
        L: rw Laplacian (MatrixForm or float array); any square float matrix
           is accepted, e.g. a negated matrix logarithm
        t: time, t >= 0
        tol: bound on the infinity-norm error from series truncation
        max_terms: Taylor degree cap

    With A = -tL and c the largest diagonal entry of -A, B = A + cI is
    non-negative for Laplacians and e^A = (e^{-c/2^s} e^{B/2^s})^(2^s). The
    truncation remainder of e^{B/2^s} is bounded by the tail of the
    exponential series at ||B||/2^s <= 1/2.

    A tol below the roundoff floor 2^s * n * eps of the squaring phase is
    raised to that floor with a warning.

    Raises:
        ArithmeticModeError: exact input
        ToleranceUnreachable: more than max_terms terms needed
    """
    if isinstance(L, MatrixForm):
        if L.exact:
            raise ArithmeticModeError("Heat kernel is evaluated in float mode; call to_float() first")
        L = L.laplacian()
    elif is_exact_array(L):
        raise ArithmeticModeError("Heat kernel is evaluated in float mode; convert with to_float_array")
    L = np.asarray(L, dtype=np.float64)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise DimensionMismatch(f"Heat kernel needs a square matrix, got shape {L.shape}")
    if t < 0:
        raise ValueError(f"Time must be non-negative, got {t}")

    n = L.shape[0]
    if n == 0 or t == 0:
        return np.eye(n)

    A = -t * L
    c = max(0.0, float(np.max(-np.diag(A))))
    B = A + c * np.eye(n)
    norm = float(np.max(np.abs(B).sum(axis=1)))

    s = 0 if norm <= 0.5 else int(math.ceil(math.log2(norm / 0.5)))
    floor = (2 ** s) * n * np.finfo(np.float64).eps
    if tol < floor:
        logger.warning(f"Heat kernel tol={tol:g} is below float resolution after {s} squaring(s) "
                       f"(n={n}, t={t:g}); using {floor:.3g}")
        tol = floor
    b = norm / 2 ** s

    # log of the truncation bound propagated through 2^s squarings
    growth = s * math.log(2) + (norm - c)
    terms = None
    for N in range(max_terms + 1):
        if b == 0:
            terms = N
            break
        tail = (N + 1) * math.log(b) - math.lgamma(N + 2) - math.log1p(-b / (N + 2))
        if growth + tail <= math.log(tol / 2):
            terms = N
            break
    if terms is None:
        raise ToleranceUnreachable(f"Taylor series needs more than {max_terms} terms for tol={tol:g}")

    X = B / 2 ** s
    term = np.eye(n)
    E = np.eye(n)
    for k in range(1, terms + 1):
        term = term @ X / k
        E = E + term
    E *= math.exp(-c / 2 ** s)
    for _ in range(s):
        E = E @ E

    logger.debug(f"Heat kernel: n={n}, t={t:g}, {s} squaring(s), degree {terms}")
    return E


# ========== MONTE CARLO WALKS ==========

def _cumulative_rows(S: np.ndarray) -> np.ndarray:
    cumulative = np.cumsum(to_float_array(S), axis=1)
    cumulative[:, -1] = 1.0
    return cumulative


def _walk(cumulative: np.ndarray, start: int, rng: np.random.Generator, max_steps: int,
          stop: frozenset = frozenset()) -> List[int]:
    path = [start]
    v = start
    for _ in range(max_steps):
        if v in stop:
            break
        v = int(np.searchsorted(cumulative[v], rng.random(), side='right'))
        v = min(v, cumulative.shape[0] - 1)
        path.append(v)
    return path


def sample_walk(S, start: int, seed: Optional[int] = None, max_steps: int = 1000) -> List[int]:
    """
    One random walk driven by the rows of S (against edge direction)

    Returns the visited vertex indices, start included, max_steps + 1 long.
    The generator is numpy's PCG64, so a seed reproduces the walk on any platform.
    """
    S = _stochastic(S)
    if not 0 <= start < S.shape[0]:
        raise IndexError(f"Start index {start} out of range for {S.shape[0]} vertices")
    return _walk(_cumulative_rows(S), start, np.random.default_rng(seed), max_steps)


@dataclass
class AbsorptionEstimate:
    """Empirical absorption frequencies per reach for walks from one vertex"""

    start: int
    walks: int
    counts: List[int]
    unabsorbed: int = 0

    @property
    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.float64) / self.walks

    @property
    def standard_errors(self) -> np.ndarray:
        f = self.frequencies
        return np.sqrt(f * (1.0 - f) / self.walks)

    def within(self, expected: Sequence[float], sigmas: float = 3.0) -> bool:
        """Every frequency within `sigmas` binomial standard errors of its expectation"""
        expected = np.asarray([float(e) for e in expected])
        se = np.sqrt(expected * (1.0 - expected) / self.walks)
        return bool(np.all(np.abs(self.frequencies - expected) <= sigmas * se + 1e-15))

    def to_dict(self) -> dict:
        return {
            'start': self.start,
            'walks': self.walks,
            'counts': list(self.counts),
            'unabsorbed': self.unabsorbed,
            'frequencies': self.frequencies.tolist(),
            'standard_errors': self.standard_errors.tolist(),
        }


def estimate_absorption(S, start: int, dec: ReachDecomposition, walks: int = 10000,
                        seed: int = 0, max_steps: int = 10000) -> AbsorptionEstimate:
    """
    Monte Carlo estimate of the absorption probabilities gamma_r(start)

    Each walk gets its own generator spawned from SeedSequence(seed), so the
    counts do not depend on the order in which walks are run; they are
    reduced in walk order.
    """
    if walks < 1:
        raise ValueError(f"Need at least one walk, got {walks}")
    S = _stochastic(S)
    if not 0 <= start < S.shape[0]:
        raise IndexError(f"Start index {start} out of range for {S.shape[0]} vertices")
    cumulative = _cumulative_rows(S)
    owner = {v: i for i, reach in enumerate(dec.reaches) for v in reach.cabal}
    stop = frozenset(owner)

    outcomes = []
    for child in np.random.SeedSequence(seed).spawn(walks):
        path = _walk(cumulative, start, np.random.default_rng(child), max_steps, stop)
        outcomes.append(owner.get(path[-1]))

    counts = [0] * dec.k
    unabsorbed = 0
    for outcome in outcomes:
        if outcome is None:
            unabsorbed += 1
        else:
            counts[outcome] += 1
    if unabsorbed:
        logger.warning(f"{unabsorbed} of {walks} walk(s) hit the {max_steps}-step cap before absorption")
    logger.info(f"Absorption estimate from vertex index {start}: {counts} over {walks} walks")
    return AbsorptionEstimate(start, walks, counts, unabsorbed)


# ========== TRAJECTORIES ==========

@dataclass
class Trajectory:
    """Sampled states of one process; step numbers (discrete) or times (continuous)"""

    process: str
    mode: str
    vertex_ids: Sequence[str]
    times: List[float] = field(default_factory=list)
    states: List[np.ndarray] = field(default_factory=list)

    def append(self, time, state: np.ndarray):
        self.times.append(time)
        self.states.append(state)

    def to_frame(self) -> pd.DataFrame:
        """One row per sample: step (or time) then one column per vertex label"""
        index_name = 'step' if self.mode == 'discrete' else 'time'
        rows = [
            [time] + [format_scalar(value) for value in state]
            for time, state in zip(self.times, self.states)
        ]
        return pd.DataFrame(rows, columns=[index_name] + list(self.vertex_ids))

    def to_csv(self, path=None) -> Optional[str]:
        return self.to_frame().to_csv(path, index=False)


def _check_process(process: str):
    if process not in PROCESSES:
        raise ValueError(f"Unknown process {process!r}; expected one of {PROCESSES}")


def evolve_discrete(v0, S, steps: int, process: str = 'diffusion',
                    vertex_ids: Optional[Sequence[str]] = None) -> Trajectory:
    """Iterate p <- pS (diffusion) or x <- Sx (consensus), keeping every step"""
    _check_process(process)
    if vertex_ids is None:
        vertex_ids = S.vertex_ids if isinstance(S, MatrixForm) else [str(i + 1) for i in range(len(v0))]
    S = _stochastic(S)
    state = _vector_like(v0, S)
    if process == 'diffusion':
        validate_measure(state)

    trajectory = Trajectory(process, 'discrete', list(vertex_ids))
    trajectory.append(0, state)
    for step in range(1, steps + 1):
        state = state @ S if process == 'diffusion' else S @ state
        trajectory.append(step, state)
    return trajectory


def evolve_continuous(v0, L, times: Iterable[float], process: str = 'diffusion',
                      tol: float = 1e-10, vertex_ids: Optional[Sequence[str]] = None) -> Trajectory:
    """p0 e^{-Lt} (diffusion) or e^{-Lt} x0 (consensus) at each sampled time"""
    _check_process(process)
    if vertex_ids is None:
        vertex_ids = L.vertex_ids if isinstance(L, MatrixForm) else [str(i + 1) for i in range(len(v0))]
    state = to_float_array(v0)
    if process == 'diffusion':
        validate_measure(state)

    trajectory = Trajectory(process, 'continuous', list(vertex_ids))
    for t in times:
        H = heat_kernel(L, t, tol)
        if H.shape[0] != state.shape[0]:
            raise DimensionMismatch(f"Initial vector has {state.shape[0]} entries, matrix is {H.shape[0]}x{H.shape[0]}")
        trajectory.append(float(t), state @ H if process == 'diffusion' else H @ state)
    return trajectory


__all__ = [
    'PROCESSES',
    'HEAT_MAX_TERMS',
    'validate_measure',
    'diffusion_step',
    'consensus_step',
    'cesaro_average',
    'diffusion_limit',
    'consensus_limit',
    'absorption_probabilities',
    'all_cabals_primitive',
    'plain_power_limit',
    'heat_kernel',
    'sample_walk',
    'AbsorptionEstimate',
    'estimate_absorption',
    'Trajectory',
    'evolve_discrete',
    'evolve_continuous',
]

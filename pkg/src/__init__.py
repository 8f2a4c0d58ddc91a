"""
__init__.py for the digraph kernel modules
"""

from .errors import (
    DigraphKernelError,
    ParseError,
    DuplicateEdge,
    BadWeight,
    DanglingVertex,
    WeaklyDisconnected,
    NotStronglyConnected,
    SingularSystem,
    ZeroDegree,
    DimensionMismatch,
    ToleranceUnreachable,
    BadAlpha,
    MaxIterExceeded,
    PeriodicCabal,
    UnknownVertex,
    InvariantViolation,
    ArithmeticModeError,
)
from .numeric import get_backend, resolve_exact, to_fraction
from .core import (
    Digraph,
    MatrixForm,
    MatrixKind,
    DanglingPolicy,
    parse_graph,
    serialize_graph,
    build_matrix,
    support_digraph,
    weak_components,
)
from .structure import Reach, ReachDecomposition, strong_components, reach_decomposition, cabal_period
from .kernels import (
    KernelBases,
    SpectrumReport,
    right_kernel_basis,
    left_kernel_basis,
    left_kernel_combinatorial,
    projection,
    kernel_bases,
    spectrum_check,
)
from .dynamics import (
    Trajectory,
    AbsorptionEstimate,
    diffusion_step,
    consensus_step,
    cesaro_average,
    diffusion_limit,
    consensus_limit,
    absorption_probabilities,
    heat_kernel,
    sample_walk,
    estimate_absorption,
    evolve_discrete,
    evolve_continuous,
    plain_power_limit,
    all_cabals_primitive,
)
from .ranking import (
    RankReport,
    TeleportReport,
    influence_vector,
    extend_graph,
    resolvent,
    pagerank_resolvent,
    power_iterates,
    pagerank_power,
    pagerank_via_extension,
    pagerank_with_teleport_rows,
    teleport_relation_check,
    rank_report,
)
from .embedding import ClosureReport, transitive_closure, closure_check, kernel_equality_check, projection_distance

__all__ = [
    'DigraphKernelError', 'ParseError', 'DuplicateEdge', 'BadWeight', 'DanglingVertex',
    'WeaklyDisconnected', 'NotStronglyConnected', 'SingularSystem', 'ZeroDegree',
    'DimensionMismatch', 'ToleranceUnreachable', 'BadAlpha', 'MaxIterExceeded',
    'PeriodicCabal', 'UnknownVertex', 'InvariantViolation', 'ArithmeticModeError',
    'get_backend', 'resolve_exact', 'to_fraction',
    'Digraph', 'MatrixForm', 'MatrixKind', 'DanglingPolicy',
    'parse_graph', 'serialize_graph', 'build_matrix', 'support_digraph', 'weak_components',
    'Reach', 'ReachDecomposition', 'strong_components', 'reach_decomposition', 'cabal_period',
    'KernelBases', 'SpectrumReport', 'right_kernel_basis', 'left_kernel_basis',
    'left_kernel_combinatorial', 'projection', 'kernel_bases', 'spectrum_check',
    'Trajectory', 'AbsorptionEstimate', 'diffusion_step', 'consensus_step', 'cesaro_average',
    'diffusion_limit', 'consensus_limit', 'absorption_probabilities', 'heat_kernel',
    'sample_walk', 'estimate_absorption', 'evolve_discrete', 'evolve_continuous',
    'plain_power_limit', 'all_cabals_primitive',
    'RankReport', 'TeleportReport', 'influence_vector', 'extend_graph', 'resolvent',
    'pagerank_resolvent', 'power_iterates', 'pagerank_power', 'pagerank_via_extension',
    'pagerank_with_teleport_rows', 'teleport_relation_check', 'rank_report',
    'ClosureReport', 'transitive_closure', 'closure_check', 'kernel_equality_check',
    'projection_distance',
]

__version__ = '1.0.0'
__author__ = 'Digraph Kernels Team'

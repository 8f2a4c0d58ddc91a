#!/usr/bin/env python3
"""
Digraph kernel toolkit - command-line entry point
Subcommands: analyze, kernels, simulate, rank, check-appendix, verify-paper-example

Exit codes: 0 success, 1 failed check, 2 usage error, 3 input error.
"""

import sys
import json
import logging
import logging.config
import argparse
from pathlib import Path
from typing import List, Optional

import numpy as np

# Add project root to path
PROJECT_ROOT = Path(__file__).parent
sys.path.insert(0, str(PROJECT_ROOT))

# Import config
sys.path.insert(0, str(PROJECT_ROOT / "config"))
import config

from src.console_logger import format_check, setup_colored_logger
from src.core import DanglingPolicy, MatrixKind, build_matrix, parse_graph, weak_components
from src.dynamics import (
    absorption_probabilities,
    consensus_limit,
    diffusion_limit,
    estimate_absorption,
    evolve_continuous,
    evolve_discrete,
)
from src.embedding import closure_check
from src.errors import (
    ArithmeticModeError,
    BadAlpha,
    DanglingVertex,
    DigraphKernelError,
    InvariantViolation,
    ParseError,
    UnknownVertex,
    WeaklyDisconnected,
)
from src.kernels import kernel_bases, left_kernel_combinatorial, spectrum_check
from src.numeric import format_array, get_backend, resolve_exact
from src.paper_example import verify_example
from src.ranking import rank_report
from src.structure import cabal_period, reach_decomposition, strong_components

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3

INPUT_ERRORS = (
    OSError, UnicodeDecodeError, ParseError, WeaklyDisconnected, UnknownVertex, DanglingVertex, InvariantViolation,
)
USAGE_ERRORS = (ArithmeticModeError, BadAlpha, ValueError)


class UsageError(Exception):
    """Flag combination the parser cannot reject on its own"""


def setup_logging(level: Optional[str] = None):
    """Apply LOGGING_CONFIG, then colour the console handler"""
    logging.config.dictConfig(config.LOGGING_CONFIG)
    try:
        setup_colored_logger()
    except Exception:
        # Fallback: continue without colored console
        pass
    if level:
        for handler in logging.getLogger().handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)


# ========== HELPERS ==========

def _load_graph(args):
    path = Path(args.input)
    graph = parse_graph(path.read_text(encoding='utf-8'), args.graph_format)
    logger.info(f"Loaded {path.name}: n={graph.n}, {len(graph.edges)} edge(s)")
    return graph


def _requested_mode(args) -> Optional[str]:
    return args.numeric or config.NUMERIC_CONFIG['mode']


def _exact_for(args, n: int) -> bool:
    exact = resolve_exact(n, _requested_mode(args), config.NUMERIC_CONFIG['rational_max_vertices'])
    logger.info(f"Arithmetic: {'rational' if exact else 'float'}")
    return exact


def _require_float(args, what: str):
    if _requested_mode(args) == 'rational':
        raise ArithmeticModeError(f"{what} runs in float mode only; drop --numeric rational / DGK_MODE")


def _components(g, per_component: bool):
    return weak_components(g) if per_component else [g]


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=config.OUTPUT_CONFIG['json_indent'])
    if getattr(args, 'output', None):
        Path(args.output).write_text(text if text.endswith('\n') else text + '\n', encoding='utf-8')
        logger.info(f"Wrote {args.output}")
    else:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')


def _wrap(results: List[dict], per_component: bool):
    return {'components': results} if per_component else results[0]


# ========== COMMANDS ==========

def cmd_analyze(args) -> int:
    g = _load_graph(args)
    results = []
    for part in _components(g, args.per_component):
        dec = reach_decomposition(part)
        scc_of, _ = strong_components(part)
        components = {}
        for v, cid in enumerate(scc_of):
            components.setdefault(cid, []).append(v)
        result = {'n': part.n, 'vertices': list(part.vertex_ids)}
        result.update(dec.to_dict(part))
        result['strong_components'] = [part.labels(members) for _, members in sorted(components.items())]
        result['cabal_periods'] = [cabal_period(part, r.cabal) for r in dec.reaches]
        results.append(result)
    _emit(args, _wrap(results, args.per_component))
    return EXIT_OK


def cmd_kernels(args) -> int:
    if args.spectrum:
        _require_float(args, "Spectrum check")
    g = _load_graph(args)
    results = []
    for part in _components(g, args.per_component):
        exact = False if args.spectrum else _exact_for(args, part.n)
        form = build_matrix(part, MatrixKind.RW_LAPLACIAN, args.dangling, exact=exact)
        bases = kernel_bases(form, tol=config.NUMERIC_CONFIG['residual_tol'])
        D = build_matrix(part, MatrixKind.IN_DEGREE, args.dangling, exact=exact)
        result = bases.to_dict()
        result['gamma_bar_combinatorial'] = format_array(left_kernel_combinatorial(bases.gamma_bar, D))
        if args.spectrum:
            result['spectrum'] = spectrum_check(form, bases.k, config.NUMERIC_CONFIG['spectrum_tol']).to_dict()
        results.append(result)
    _emit(args, _wrap(results, args.per_component))
    if args.spectrum and not all(r['spectrum']['ok'] for r in results):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _initial_vector(init: Optional[str], process: str, g, exact: bool) -> np.ndarray:
    backend = get_backend(exact)
    if init is None:
        if process == 'consensus':
            raise UsageError("consensus needs an explicit --init (FILE or delta:LABEL)")
        init = 'uniform'
    if init == 'uniform':
        return backend.ones(g.n) / g.n
    vector = backend.zeros(g.n)
    if init.startswith('delta:'):
        vector[g.index(init[len('delta:'):])] = backend.scalar(1)
        return vector

    tokens = Path(init).read_text(encoding='utf-8').split()
    if len(tokens) % 2:
        raise ParseError(f"initial vector file {init} needs 'label value' pairs")
    for label, value in zip(tokens[::2], tokens[1::2]):
        try:
            vector[g.index(label)] = backend.scalar(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad value {value!r} for vertex {label} in {init}") from None
    return vector


def cmd_simulate(args) -> int:
    if args.mode == 'continuous':
        _require_float(args, "Continuous simulation")
    g = _load_graph(args)
    exact = False if args.mode == 'continuous' else _exact_for(args, g.n)
    form = build_matrix(g, MatrixKind.RW_LAPLACIAN, args.dangling, exact=exact)
    x0 = _initial_vector(args.init, args.process, g, exact)

    if args.mode == 'discrete':
        steps = args.steps if args.steps is not None else config.SIMULATION_CONFIG['steps']
        trajectory = evolve_discrete(x0, form, steps, args.process)
    else:
        final = args.time if args.time is not None else config.SIMULATION_CONFIG['time']
        times = np.linspace(0.0, final, max(2, args.samples))
        trajectory = evolve_continuous(x0, form, times, args.process, config.SIMULATION_CONFIG['heat_tol'])

    bases = kernel_bases(form, tol=config.NUMERIC_CONFIG['residual_tol'])
    limit = diffusion_limit(x0, bases) if args.process == 'diffusion' else consensus_limit(x0, bases)
    logger.info(f"Asymptotic {args.process} limit: {format_array(limit)}")

    absorption = None
    if args.absorb_from is not None:
        start = g.index(args.absorb_from)
        estimate = estimate_absorption(
            form.stochastic(), start, bases.decomposition, args.walks, args.seed,
            config.SIMULATION_CONFIG['max_walk_steps'],
        )
        absorption = {'vertex': args.absorb_from}
        absorption.update(estimate.to_dict())
        absorption['expected'] = format_array(absorption_probabilities(start, bases))

    if args.output_format == 'csv':
        _emit(args, trajectory.to_csv())
    else:
        payload = {
            'process': args.process,
            'mode': args.mode,
            'vertices': list(g.vertex_ids),
            'times': list(trajectory.times),
            'states': [format_array(state) for state in trajectory.states],
            'limit': format_array(limit),
        }
        if absorption is not None:
            payload['absorption'] = absorption
        _emit(args, payload)
    return EXIT_OK


def cmd_rank(args) -> int:
    g = _load_graph(args)
    exact = _exact_for(args, g.n)
    beta = args.beta
    if beta is None and args.alpha is None:
        beta = config.RANK_CONFIG['beta']
    results = []
    for part in _components(g, args.per_component):
        report = rank_report(
            part, beta=beta, alpha=args.alpha, teleport=args.teleport, exact=exact,
            tol=args.tol, max_iter=args.max_iter,
        )
        results.append(report.to_dict())
    _emit(args, _wrap(results, args.per_component))
    return EXIT_OK


def cmd_check_appendix(args) -> int:
    _require_float(args, "Appendix check")
    g = _load_graph(args)
    results = []
    for part in _components(g, args.per_component):
        report = closure_check(
            part, args.eps, args.dangling, config.NUMERIC_CONFIG['heat_tol'], args.kernel_tol,
        )
        results.append(report.to_dict())
    _emit(args, _wrap(results, args.per_component))
    return EXIT_OK if all(r['passed'] for r in results) else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    checks = verify_example(args.fixture)
    if args.json:
        _emit(args, {'checks': [c.to_dict() for c in checks], 'passed': all(c.passed for c in checks)})
    else:
        _emit(args, '\n'.join(format_check(c.name, c.passed, c.detail) for c in checks))
    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.error(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


# ========== PARSER ==========

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--numeric', choices=['rational', 'float'], default=None,
                        help='Arithmetic (default: rational up to '
                             f"{config.NUMERIC_CONFIG['rational_max_vertices']} vertices, or DGK_MODE)")
    common.add_argument('--output', '-o', default=None, help='Write the result to FILE instead of stdout')
    common.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], default=None,
                        help='Console log level (default: INFO)')

    graph_input = argparse.ArgumentParser(add_help=False)
    graph_input.add_argument('input', help='Graph file')
    graph_input.add_argument('--graph-format', choices=['edge_list', 'dot_subset'], default='edge_list',
                             help='Input format (default: edge_list)')
    graph_input.add_argument('--dangling', choices=[p.value for p in DanglingPolicy], default='self_loop',
                             help='Patch for in-degree-0 rows (default: self_loop)')

    components = argparse.ArgumentParser(add_help=False)
    components.add_argument('--per-component', action='store_true',
                            help='Process each weakly connected component separately')

    parser = argparse.ArgumentParser(description='Reaches, Laplacian kernels, consensus limits and pagerank of digraphs')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', parents=[common, graph_input, components], help='Reach decomposition')
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser('kernels', parents=[common, graph_input, components], help='Kernel bases and projection')
    p.add_argument('--spectrum', action='store_true', help='Add the float spectrum diagnostic')
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser('simulate', parents=[common, graph_input], help='Consensus or diffusion trajectory')
    p.add_argument('--process', choices=['diffusion', 'consensus'], default='diffusion')
    p.add_argument('--mode', choices=['discrete', 'continuous'], default='discrete')
    p.add_argument('--steps', type=int, default=None, help='Discrete steps')
    p.add_argument('--time', type=float, default=None, help='Final time (continuous)')
    p.add_argument('--samples', type=int, default=config.SIMULATION_CONFIG['samples'],
                   help='Sampled times in [0, time] (continuous)')
    p.add_argument('--init', default=None, help="'uniform', 'delta:LABEL' or a file of 'label value' pairs")
    p.add_argument('--output-format', choices=['json', 'csv'], default=config.OUTPUT_CONFIG['format'])
    p.add_argument('--absorb-from', default=None, metavar='LABEL',
                   help='Also estimate absorption probabilities from LABEL by random walks')
    p.add_argument('--walks', type=int, default=config.SIMULATION_CONFIG['walks'])
    p.add_argument('--seed', type=int, default=config.SIMULATION_CONFIG['seed'])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('rank', parents=[common, graph_input, components], help='Influence and pagerank')
    damping = p.add_mutually_exclusive_group()
    damping.add_argument('--beta', default=None, help=f"Damping in (0, 1) (default: {config.RANK_CONFIG['beta']})")
    damping.add_argument('--alpha', default=None, help='Teleport weight > 0; beta = 1/(1+alpha)')
    p.add_argument('--teleport', choices=['none', 'uniform'], default=config.RANK_CONFIG['teleport'])
    p.add_argument('--tol', type=float, default=config.RANK_CONFIG['tol'], help='Power iteration l1 tolerance')
    p.add_argument('--max-iter', type=int, default=config.RANK_CONFIG['max_iter'])
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser('check-appendix', parents=[common, graph_input, components],
                       help='Properties of e^-L (float)')
    p.add_argument('--eps', type=float, default=config.APPENDIX_CONFIG['eps'])
    p.add_argument('--kernel-tol', type=float, default=config.APPENDIX_CONFIG['kernel_tol'])
    p.set_defaults(func=cmd_check_appendix)

    p = sub.add_parser('verify-paper-example', parents=[common], help='Golden checks on the worked example')
    p.add_argument('fixture', nargs='?', default=str(config.DATA_DIR / 'g7.edges'))
    p.add_argument('--json', action='store_true', help='JSON instead of PASS/FAIL lines')
    p.set_defaults(func=cmd_verify)

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one subcommand and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    setup_logging(args.log_level)
    try:
        return args.func(args)
    except INPUT_ERRORS as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT
    except (UsageError,) + USAGE_ERRORS as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except DigraphKernelError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_CHECK_FAILED


def main():
    """Main function"""
    sys.exit(run())


if __name__ == "__main__":
    main()

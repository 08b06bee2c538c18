"""
Command-line dispatch for the signed consensus analysis toolkit.
Parses arguments, runs one analysis and maps failures to exit codes.
"""
import argparse
import logging
import sys
from contextlib import contextmanager

import numpy as np

from cli.graph_io import parse_graph_file, write_trajectory_csv
from cli.reports import STRUCTURED, TEXT, render
from config import AnalysisConfig, AppConfig
from network.balance import detect_balance, verify_equivalences
from network.control_tests import (
    leader_follower_verdict,
    output_controllability,
    stabilizability,
    state_controllability,
)
from network.errors import (
    DimensionMismatchError,
    DisconnectedGraphError,
    GraphParseError,
    GraphValidationError,
    NumericalError,
    SizeCapExceededError,
    SoundnessViolationError,
)
from network.graph_core import influenced_system, is_connected
from network.partitions import (
    Partition,
    coarsest_equitable_refinement,
    is_equitable,
    quotient,
    quotient_spectrum_contained,
)
from network.simulate import bipartite_limit, simulate_free
from network.symmetry import find_automorphisms
from services.analysis_service import AnalysisService, sweep_summary
from utils.logger import set_console_level, setup_logger

logger = setup_logger(__name__, 'logs/cli.log')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_SOUNDNESS = 4


class CommandUsageError(Exception):
    pass


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that raises on usage errors instead of exiting"""

    def error(self, message):
        raise CommandUsageError(f"{self.prog}: {message}")


def node_list(value):
    nodes = [item.strip() for item in value.split(',') if item.strip()]
    if not nodes:
        raise argparse.ArgumentTypeError(f"empty node list: {value!r}")
    return nodes


def float_list(value):
    try:
        return [float(item) for item in value.split(',')]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid number list {value!r}") from e


def cells_spec(value):
    """'1,3;2;4' -> [['1', '3'], ['2'], ['4']]"""
    cells = [node_list(cell) for cell in value.split(';') if cell.strip()]
    if not cells:
        raise argparse.ArgumentTypeError(f"empty partition: {value!r}")
    return cells


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=[TEXT, STRUCTURED], default=TEXT,
                        help='Output format (default: text)')
    common.add_argument('--tol-rank', type=float, help='Relative rank tolerance')
    common.add_argument('--tol-eig', type=float, help='Zero-eigenvalue tolerance')
    common.add_argument('--max-n', type=int, help='Refuse graphs with more nodes')
    common.add_argument('--quiet', action='store_true', help='Only log warnings and errors')

    parser = CommandParser(prog=AppConfig.NAME,
                           description='Controllability analysis of signed consensus networks.')
    parser.add_argument('--version', action='version', version=f'{AppConfig.NAME} {AppConfig.VERSION}')
    sub = parser.add_subparsers(dest='command', parser_class=CommandParser)
    sub.required = True

    p = sub.add_parser('balance', parents=[common], help='Structural balance and gauge')
    p.add_argument('file')

    p = sub.add_parser('automorphisms', parents=[common], help='Weighted adjacency automorphisms')
    p.add_argument('file')
    p.add_argument('--fix', type=node_list, default=[], help='Nodes fixed pointwise, e.g. 4 or 1,2')

    p = sub.add_parser('partition', parents=[common], help='Coarsest equitable refinement')
    p.add_argument('file')
    p.add_argument('--seed', type=cells_spec, help="Initial cells, e.g. '1,3;2;4'")

    p = sub.add_parser('controllability', parents=[common], help='Leader-follower verdict')
    p.add_argument('file')
    p.add_argument('--leaders', type=node_list, required=True)

    p = sub.add_parser('influenced', parents=[common], help='Influenced-system verdicts')
    p.add_argument('file')
    p.add_argument('--inputs', type=node_list, required=True)
    p.add_argument('--outputs', type=node_list, required=True)

    p = sub.add_parser('simulate', parents=[common], help='Free consensus flow to CSV')
    p.add_argument('file')
    p.add_argument('--x0', type=float_list, required=True)
    p.add_argument('--tmax', type=float)
    p.add_argument('--dt', type=float)
    p.add_argument('--out', required=True)

    p = sub.add_parser('report', parents=[common], help='Full analysis report')
    p.add_argument('file')
    p.add_argument('--leaders', type=node_list)
    p.add_argument('--inputs', type=node_list)
    p.add_argument('--outputs', type=node_list)

    p = sub.add_parser('sweep', parents=[common], help='Every edge sign pattern of the topology')
    p.add_argument('file')
    p.add_argument('--leaders', type=node_list, required=True)
    return parser


@contextmanager
def tolerance_overrides(args):
    """Apply --tol-rank / --tol-eig for the duration of one command"""
    saved = (AnalysisConfig.RANK_TOL, AnalysisConfig.EIG_TOL)
    if args.tol_rank is not None:
        AnalysisConfig.RANK_TOL = args.tol_rank
    if args.tol_eig is not None:
        AnalysisConfig.EIG_TOL = args.tol_eig
    try:
        yield
    finally:
        AnalysisConfig.RANK_TOL, AnalysisConfig.EIG_TOL = saved


def load_graph(args):
    g = parse_graph_file(args.file)
    if args.max_n is not None and g.n > args.max_n:
        raise SizeCapExceededError(f"Graph has {g.n} nodes, above --max-n {args.max_n}")
    return g


def _verdict_word(controllable):
    return 'controllable' if controllable else 'uncontrollable'


def cmd_balance(args):
    g = load_graph(args)
    result = detect_balance(g)
    equivalences = verify_equivalences(g)
    if not equivalences.consistent:
        raise SoundnessViolationError(f"Balance characterizations disagree: {equivalences.flags}")
    return {
        'verdict': 'balanced' if result.balanced else 'unbalanced',
        **result.to_dict(),
        'equivalences': equivalences.to_dict(),
    }


def cmd_automorphisms(args):
    g = load_graph(args)
    automorphisms = find_automorphisms(g, fixed=args.fix)
    return {
        'fixed': args.fix,
        'count': len(automorphisms),
        'automorphisms': [a.to_dict() for a in automorphisms],
    }


def cmd_partition(args):
    g = load_graph(args)
    seed = Partition.from_cells(args.seed, g.nodes) if args.seed else Partition.single_cell(g.nodes)
    pi = coarsest_equitable_refinement(g, seed)
    return {
        'seed': seed.to_dict(),
        'partition': pi.to_dict(),
        'equitable': is_equitable(g, pi),
        'nontrivial': bool(pi.nontrivial_cells),
        'quotient': quotient(g, pi).tolist(),
        'quotient_spectrum_contained': quotient_spectrum_contained(g, pi),
    }


def cmd_controllability(args):
    g = load_graph(args)
    verdict = leader_follower_verdict(g, args.leaders)
    return {
        'verdict': _verdict_word(verdict.controllable),
        'reason': verdict.structural_reason,
        **verdict.to_dict(),
    }


def cmd_influenced(args):
    g = load_graph(args)
    system = influenced_system(g, args.inputs, args.outputs)
    state = state_controllability(system)
    output = output_controllability(system)
    stab = stabilizability(-system.laplacian(exact=True), system.input_matrix(exact=True))
    return {
        'verdict': _verdict_word(state.controllable),
        'output_verdict': _verdict_word(output.controllable),
        'stabilizable': stab.stabilizable,
        'state': state.to_dict(),
        'output': output.to_dict(),
        'stabilizability': stab.to_dict(),
    }


def cmd_simulate(args):
    g = load_graph(args)
    trajectory = simulate_free(g, args.x0, t_max=args.tmax, dt=args.dt)
    write_trajectory_csv(trajectory, args.out)
    result = {
        'out': args.out,
        'samples': len(trajectory.times),
        't_max': float(trajectory.times[-1]),
        'dt': trajectory.metadata['dt'],
        'final_state': trajectory.final_state.tolist(),
    }
    if is_connected(g):
        limit = bipartite_limit(g, args.x0)
        result['bipartite_limit'] = limit.tolist()
        result['distance_to_limit'] = float(np.linalg.norm(trajectory.final_state - limit))
    return result


def cmd_report(args):
    g = load_graph(args)
    if args.outputs and not args.inputs:
        raise CommandUsageError("report: --outputs needs --inputs")
    return AnalysisService().build_report(g, args.leaders, args.inputs, args.outputs)


def cmd_sweep(args):
    g = load_graph(args)
    frame = AnalysisService().sign_pattern_sweep(g, args.leaders)
    return {
        'summary': sweep_summary(frame),
        'patterns': frame.to_dict(orient='records'),
    }


COMMANDS = {
    'balance': cmd_balance,
    'automorphisms': cmd_automorphisms,
    'partition': cmd_partition,
    'controllability': cmd_controllability,
    'influenced': cmd_influenced,
    'simulate': cmd_simulate,
    'report': cmd_report,
    'sweep': cmd_sweep,
}


def exit_code_for(error):
    if isinstance(error, SoundnessViolationError):
        return EXIT_SOUNDNESS
    if isinstance(error, (NumericalError, SizeCapExceededError)):
        return EXIT_NUMERICAL
    if isinstance(error, (GraphParseError, GraphValidationError, DimensionMismatchError,
                          DisconnectedGraphError, ValueError)):
        return EXIT_INVALID
    return None


def run_command(argv, stdout=None, stderr=None):
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name
        stdout: Stream for command output (default: sys.stdout)
        stderr: Stream for error messages (default: sys.stderr)

    Returns:
        int: exit code (0 ok, 1 usage, 2 parse/validation, 3 numerical or cap, 4 soundness)
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CommandUsageError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help / --version
        return int(e.code or 0)

    if args.quiet:
        set_console_level(logging.WARNING)

    try:
        with tolerance_overrides(args):
            logger.info(f"Running {args.command} on {args.file}")
            result = COMMANDS[args.command](args)
            output = render(result, args.format)
    except CommandUsageError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_USAGE
    except Exception as e:
        code = exit_code_for(e)
        if code is None:
            raise
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        print(f"error: {e}", file=stderr)
        return code

    stdout.write(output)
    return EXIT_OK


def main():
    sys.exit(run_command(sys.argv[1:]))

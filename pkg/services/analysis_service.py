"""
Analysis orchestration service.
Coordinates balance, symmetry, partition and controllability analyses into
one report, and sweeps edge sign patterns over a fixed topology.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from config import AnalysisConfig, AppConfig, SimulationConfig, SymmetryConfig
from network.balance import detect_balance, verify_equivalences
from network.control_tests import (
    common_eigenvalue_check,
    kalman_rank,
    leader_follower_verdict,
    output_controllability,
    stabilizability,
    state_controllability,
)
from network.errors import GraphValidationError, SizeCapExceededError, SoundnessViolationError
from network.generators import relabel_signs, sign_patterns
from network.graph_core import (
    graph_fingerprint,
    influenced_system,
    is_connected,
    laplacian_spectrum,
    leader_follower_split,
    weight_summary,
)
from network.partitions import (
    Partition,
    coarsest_equitable_refinement,
    quotient,
    quotient_spectrum_contained,
)
from network.symmetry import (
    commutant_conditions,
    find_automorphisms,
    input_symmetry,
    signed_input_symmetry,
)
from services.models import AnalysisReport
from utils.logger import setup_logger

logger = setup_logger(__name__, 'logs/analysis_service.log')

# Listed automorphisms per report; the count is always complete
MAX_LISTED_AUTOMORPHISMS = 20


def _pattern_label(pattern):
    return ''.join('+' if s > 0 else '-' for s in pattern)


class AnalysisService:
    """Service for orchestrating analyses of one signed graph"""

    def __init__(self):
        pass

    def graph_section(self, g):
        summary = weight_summary(g)
        summary['fingerprint'] = graph_fingerprint(g)
        summary['connected'] = is_connected(g)
        summary['laplacian_spectrum'] = laplacian_spectrum(g).tolist()
        return summary

    def balance_section(self, g):
        """Traversal verdict with the four independent characterizations it is checked against"""
        result = detect_balance(g).to_dict()
        equivalences = verify_equivalences(g)
        if not equivalences.consistent:
            raise SoundnessViolationError(f"Balance characterizations disagree: {equivalences.flags}")
        result['equivalences'] = equivalences.to_dict()
        result['negative_cycles'] = [[str(node) for node in cycle] for cycle in equivalences.negative_cycles]
        return result

    def symmetry_section(self, g, leaders=None):
        automorphisms = find_automorphisms(g)
        section = {
            'automorphism_count': len(automorphisms),
            'automorphisms': [a.to_dict() for a in automorphisms[:MAX_LISTED_AUTOMORPHISMS]],
        }
        if leaders:
            sys = leader_follower_split(g, leaders)
            J = input_symmetry(sys)
            J_signed = signed_input_symmetry(sys)
            section['input_symmetry'] = J.to_dict() if J else None
            section['signed_input_symmetry'] = J_signed.to_dict() if J_signed else None
        return section

    def partition_section(self, g):
        """Coarsest equitable partition of the underlying unsigned graph and its quotient"""
        pi = coarsest_equitable_refinement(g, Partition.single_cell(g.nodes))
        return {
            'coarsest_equitable': pi.to_dict(),
            'nontrivial': bool(pi.nontrivial_cells),
            'quotient': quotient(g, pi).tolist(),
            'quotient_spectrum_contained': quotient_spectrum_contained(g, pi),
        }

    def leader_section(self, g, leaders):
        verdict = leader_follower_verdict(g, leaders)
        result = verdict.to_dict()
        sys = leader_follower_split(g, leaders)
        result['shared_eigenvalues'] = common_eigenvalue_check(g.laplacian(), sys.floating_array())
        return result

    def influenced_section(self, g, inputs, outputs=None):
        sys = influenced_system(g, inputs, outputs)
        state = state_controllability(sys)
        output = output_controllability(sys)
        stab = stabilizability(-sys.laplacian(exact=True), sys.input_matrix(exact=True))
        return {
            'inputs': [str(node) for node in sys.input_nodes],
            'outputs': [str(node) for node in sys.output_nodes],
            'state': state.to_dict(),
            'output': output.to_dict(),
            'stabilizability': stab.to_dict(),
        }

    def provenance(self):
        return {
            'tool': AppConfig.NAME,
            'version': AppConfig.VERSION,
            'tolerances': AnalysisConfig.as_dict(),
            'caps': {
                'max_automorphism_nodes': SymmetryConfig.MAX_AUTOMORPHISM_NODES,
                'max_automorphisms': SymmetryConfig.MAX_AUTOMORPHISMS,
                'max_commutant_nodes': SymmetryConfig.MAX_COMMUTANT_NODES,
            },
            'integrator': {
                'max_step': SimulationConfig.MAX_STEP,
                'local_error_tol': SimulationConfig.LOCAL_ERROR_TOL,
            },
        }

    def build_report(self, g, leaders=None, inputs=None, outputs=None, max_workers=4):
        """
        Run every applicable analysis and assemble the report.

        Sections run concurrently and are joined in a fixed order. A section
        failing with a numerical, size-cap or connectivity error is recorded
        under `skipped`; validation and soundness errors propagate.

        Args:
            g: SignedGraph
            leaders: Optional leader set for the leader-follower verdicts
            inputs: Optional input set for the influenced-system verdicts
            outputs: Optional output set (default: every node)
            max_workers: Thread pool size

        Returns:
            AnalysisReport
        """
        logger.info(f"Building report: {g.n} nodes, {g.m} edges")
        tasks = [
            ('graph', self.graph_section, (g,)),
            ('balance', self.balance_section, (g,)),
            ('symmetry', self.symmetry_section, (g, leaders)),
            ('partition', self.partition_section, (g,)),
        ]
        if leaders:
            tasks.append(('leader_follower', self.leader_section, (g, leaders)))
        if inputs:
            tasks.append(('influenced', self.influenced_section, (g, inputs, outputs)))

        report = AnalysisReport(provenance=self.provenance())
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = [(name, executor.submit(fn, *args)) for name, fn, args in tasks]
            for step, (name, future) in enumerate(futures, start=1):
                logger.info(f"Step {step}/{len(futures)}: {name}")
                try:
                    result = future.result()
                except (GraphValidationError, SoundnessViolationError):
                    raise
                except Exception as e:
                    logger.warning(f"Section {name} skipped: {e}")
                    report.skipped[name] = f"{type(e).__name__}: {e}"
                    continue
                if name in ('leader_follower', 'influenced'):
                    report.control[name] = result
                else:
                    setattr(report, name, result)

        logger.info(f"Report complete ({len(report.skipped)} sections skipped)")
        return report

    def sign_pattern_sweep(self, g, inputs):
        """
        Evaluate every edge sign pattern of g's topology.

        Args:
            g: SignedGraph (its signs are ignored)
            inputs: Input node set

        Returns:
            pandas.DataFrame: one row per pattern with balance, Kalman rank,
            condition-(a) feasibility and single-leader symmetry applicability
        """
        if g.m > AnalysisConfig.MAX_SWEEP_EDGES:
            raise SizeCapExceededError(
                f"Sign pattern sweep capped at {AnalysisConfig.MAX_SWEEP_EDGES} edges (graph has {g.m})"
            )
        logger.info(f"Sign pattern sweep: {2 ** g.m} patterns, inputs {list(inputs)}")
        rows = []
        for pattern in sign_patterns(g):
            h = relabel_signs(g, pattern)
            sys = influenced_system(h, inputs)
            rank = kalman_rank(h.laplacian(exact=True), sys.input_matrix(exact=True))
            balanced = detect_balance(h).balanced
            condition_a = commutant_conditions(h.laplacian(), sys.input_matrix()).conditions['a']

            lf = leader_follower_split(h, inputs) if len(sys.input_nodes) < h.n else None
            symmetric = lf is not None and input_symmetry(lf) is not None
            signed_symmetric = lf is not None and signed_input_symmetry(lf) is not None
            rows.append({
                'pattern': _pattern_label(pattern),
                'negative_edges': sum(1 for s in pattern if s < 0),
                'balanced': balanced,
                'kalman_rank': rank,
                'controllable': rank == h.n,
                'condition_a': condition_a,
                'input_symmetric': symmetric,
                'signed_input_symmetric': signed_symmetric,
                'theorem1_applies': balanced and symmetric and len(sys.input_nodes) == 1,
            })

        frame = pd.DataFrame(rows)
        frame['agreement'] = frame['condition_a'] == ~frame['controllable']
        disagreements = int((~frame['agreement']).sum())
        if disagreements:
            logger.error(f"Condition (a) disagrees with Kalman rank on {disagreements} patterns")
        logger.info(f"Sweep complete: {int(frame['controllable'].sum())}/{len(frame)} patterns controllable")
        return frame


def _rank_summary(frame):
    """Controllable fraction per balance class"""
    return frame.groupby('balanced')['controllable'].agg(['count', 'sum', 'mean'])


# Convenience functions
def build_report(g, leaders=None, inputs=None, outputs=None):
    """Build a full analysis report"""
    service = AnalysisService()
    return service.build_report(g, leaders, inputs, outputs)


def sign_pattern_sweep(g, inputs):
    """Sweep every sign pattern of g's topology"""
    service = AnalysisService()
    return service.sign_pattern_sweep(g, inputs)


def sweep_summary(frame):
    return {
        'patterns': int(len(frame)),
        'controllable': int(frame['controllable'].sum()),
        'balanced': int(frame['balanced'].sum()),
        'disagreements': int((~frame['agreement']).sum()),
        'by_balance': {
            str(bool(key)): {'count': int(row['count']), 'controllable': int(row['sum'])}
            for key, row in _rank_summary(frame).iterrows()
        },
        'mean_rank': float(np.mean(frame['kalman_rank'])) if len(frame) else None,
    }

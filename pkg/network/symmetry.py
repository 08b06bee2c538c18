"""
Automorphisms, input symmetries and commutant certificates.
Backtracking automorphism search, signed automorphisms J' = G'JG' and
linear-subspace feasibility of commutant conditions over X L_s = L_s X.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from config import AnalysisConfig, SymmetryConfig
from network.balance import Gauge, detect_balance
from network.errors import (
    DimensionMismatchError,
    InputSetError,
    NumericalError,
    SizeCapExceededError,
)
from network.graph_core import leader_follower_split, underlying_unsigned
from network.linalg import (
    eigen_tolerance,
    normalize_sign,
    symmetric_eigh,
    to_float,
)
from network.partitions import Partition, coarsest_equitable_refinement
from utils.logger import setup_logger

logger = setup_logger(__name__, 'logs/symmetry.log')


@dataclass(frozen=True)
class PermutationAutomorphism:
    """
    Node permutation psi; mapping[i] is the index of psi(nodes[i]).

    matrix() has [Psi]_ij = 1 iff psi(i) = j.
    """
    mapping: tuple
    nodes: tuple

    def matrix(self, exact=False):
        n = len(self.mapping)
        if exact:
            Psi = sympy.zeros(n, n)
            for i, j in enumerate(self.mapping):
                Psi[i, j] = 1
            return Psi
        Psi = np.zeros((n, n))
        Psi[np.arange(n), list(self.mapping)] = 1.0
        return Psi

    @property
    def is_identity(self):
        return all(i == j for i, j in enumerate(self.mapping))

    def image(self, node):
        return self.nodes[self.mapping[self.nodes.index(node)]]

    def cycles(self):
        """Nontrivial cycles as node-label tuples"""
        seen = set()
        cycles = []
        for start in range(len(self.mapping)):
            if start in seen or self.mapping[start] == start:
                continue
            cycle = []
            k = start
            while k not in seen:
                seen.add(k)
                cycle.append(self.nodes[k])
                k = self.mapping[k]
            cycles.append(tuple(cycle))
        return cycles

    def to_dict(self):
        return {
            'images': {str(node): str(self.nodes[j]) for node, j in zip(self.nodes, self.mapping)},
            'cycles': [[str(node) for node in cycle] for cycle in self.cycles()],
        }


@dataclass(frozen=True, eq=False)
class SignedAutomorphism:
    """J' = G'JG' with G' the gauge restricted to J's nodes"""
    matrix: sympy.Matrix
    source: PermutationAutomorphism
    gauge: Gauge

    def array(self):
        return to_float(self.matrix)

    def verify(self, sys):
        """
        Residuals of the leader-follower identities for J'.

        Args:
            sys: Signed LeaderFollowerSystem on the same floating nodes

        Returns:
            dict: commutation, input_fixed (exact) and eigenvector (relative) residuals
        """
        if tuple(sys.floating_nodes) != tuple(self.source.nodes):
            raise DimensionMismatchError("Signed automorphism and system use different floating nodes")
        A = sys.floating_matrix
        B = sys.input_matrix
        Jp = self.matrix
        commutation = Jp * A - A * Jp
        input_fixed = Jp.T * B - B

        values, vectors = symmetric_eigh(to_float(A))
        Jf = to_float(Jp)
        Af = to_float(A)
        eigen = 0.0
        for k, lam in enumerate(values):
            v = vectors[:, k]
            w = Jf @ v
            eigen = max(eigen, float(np.linalg.norm(Af @ w - lam * w) / np.linalg.norm(v)))
        return {
            'commutation': float(max((abs(x) for x in commutation), default=0)),
            'input_fixed': float(max((abs(x) for x in input_fixed), default=0)),
            'eigenvector': eigen,
        }


@dataclass(frozen=True, eq=False)
class LinearConstraint:
    """Homogeneous constraint left @ X @ right = 0"""
    left: np.ndarray
    right: np.ndarray
    name: str = ''

    def operator(self):
        # vec(L X R) = (R^T kron L) vec(X), column-major vec
        return np.kron(np.asarray(self.right, dtype=float).T, np.asarray(self.left, dtype=float))

    def residual(self, X):
        R = np.asarray(self.left, dtype=float) @ X @ np.asarray(self.right, dtype=float)
        return float(np.max(np.abs(R))) if R.size else 0.0


@dataclass(eq=False)
class CommutantCertificate:
    """Basis of {X : X L_s = L_s X} intersected with the imposed constraints"""
    basis: list
    dimension: int
    conditions: dict = field(default_factory=dict)
    nontrivial_witness: np.ndarray = None
    ambiguous: bool = False
    smallest_kept_singular_value: float = None
    max_residual: float = 0.0
    witness_class: str = None
    assumptions: list = field(default_factory=list)
    dimensions: dict = field(default_factory=dict)

    @property
    def feasible(self):
        return self.nontrivial_witness is not None

    def to_dict(self):
        return {
            'dimension': self.dimension,
            'feasible': self.feasible,
            'conditions': dict(self.conditions),
            'dimensions': dict(self.dimensions),
            'ambiguous': self.ambiguous,
            'max_residual': self.max_residual,
            'witness_class': self.witness_class,
            'witness': self.nontrivial_witness.tolist() if self.nontrivial_witness is not None else None,
            'assumptions': list(self.assumptions),
        }


def _fraction(x):
    x = sympy.nsimplify(x, rational=True)
    return Fraction(int(x.p), int(x.q))


def _permutation_search(M, colours):
    """
    Lexicographic backtracking over image sequences.

    Yields every permutation psi with M[psi(i)][psi(k)] == M[i][k] and
    colours[psi(i)] == colours[i], in lexicographic order of images.
    """
    n = len(colours)
    rows = [[_fraction(M[i, k]) for k in range(n)] for i in range(n)]

    def invariant(i):
        off = [x for k, x in enumerate(rows[i]) if k != i and x != 0]
        return (colours[i], rows[i][i], len(off), tuple(sorted(abs(x) for x in off)), tuple(sorted(off)))

    keys = [invariant(i) for i in range(n)]
    candidates = [[j for j in range(n) if keys[j] == keys[i]] for i in range(n)]
    image = [None] * n
    used = [False] * n

    def extend(i):
        if i == n:
            yield tuple(image)
            return
        for j in candidates[i]:
            if used[j]:
                continue
            if any(rows[j][image[k]] != rows[i][k] for k in range(i)):
                continue
            image[i] = j
            used[j] = True
            yield from extend(i + 1)
            used[j] = False
        image[i] = None

    yield from extend(0)


def _refinement_colours(g, fixed):
    """Cell index of each node in the coarsest equitable refinement separating `fixed`"""
    free = tuple(node for node in g.nodes if node not in fixed)
    seed = Partition(cells=tuple((node,) for node in g.ordered(fixed)) + ((free,) if free else ()))
    cells = coarsest_equitable_refinement(g, seed).cell_index()
    return [cells[node] for node in g.nodes]


def iter_automorphisms(g, fixed=()):
    """Lazily enumerate automorphisms of g's weighted adjacency fixing `fixed` pointwise"""
    if g.n > SymmetryConfig.MAX_AUTOMORPHISM_NODES:
        raise SizeCapExceededError(
            f"Automorphism search capped at {SymmetryConfig.MAX_AUTOMORPHISM_NODES} nodes (graph has {g.n})"
        )
    fixed = list(dict.fromkeys(fixed))
    unknown = [node for node in fixed if node not in g.index]
    if unknown:
        raise InputSetError(f"Unknown fixed nodes: {', '.join(map(str, unknown))}")
    colours = _refinement_colours(g, fixed)
    for mapping in _permutation_search(g.adjacency(exact=True), colours):
        yield PermutationAutomorphism(mapping=mapping, nodes=g.nodes)


def find_automorphisms(g, fixed=()):
    """
    All automorphisms of the weighted adjacency matrix fixing `fixed` pointwise.

    Args:
        g: SignedGraph
        fixed: Nodes that must map to themselves

    Returns:
        list of PermutationAutomorphism, identity first, lexicographic order
    """
    result = []
    for automorphism in iter_automorphisms(g, fixed):
        result.append(automorphism)
        if len(result) > SymmetryConfig.MAX_AUTOMORPHISMS:
            raise SizeCapExceededError(
                f"More than {SymmetryConfig.MAX_AUTOMORPHISMS} automorphisms; enumeration stopped"
            )
    logger.info(f"Found {len(result)} automorphisms fixing {len(set(fixed))} nodes")
    return result


def _system_symmetry(sys):
    n = sys.size
    if n > SymmetryConfig.MAX_AUTOMORPHISM_NODES:
        raise SizeCapExceededError(
            f"Input symmetry search capped at {SymmetryConfig.MAX_AUTOMORPHISM_NODES} floating nodes"
        )
    B = sys.input_matrix
    colours = [tuple(_fraction(B[i, k]) for k in range(B.cols)) for i in range(n)]
    for mapping in _permutation_search(sys.floating_matrix, colours):
        if any(i != j for i, j in enumerate(mapping)):
            return PermutationAutomorphism(mapping=mapping, nodes=tuple(sys.floating_nodes))
    return None


def input_symmetry(sys):
    """
    Nontrivial floating permutation J with J A^f = A^f J and J B^f = B^f.

    Evaluated on the underlying unsigned graph of sys.

    Returns:
        PermutationAutomorphism with lexicographically smallest images, or None
    """
    unsigned = leader_follower_split(underlying_unsigned(sys.graph), sys.input_nodes)
    return _system_symmetry(unsigned)


def signed_input_symmetry(sys):
    """Input symmetry of the signed blocks A_s^f, B_s^f themselves"""
    return _system_symmetry(sys)


def signed_automorphism(J, gauge):
    """
    Build J' = G'JG' from an unsigned symmetry and a gauge.

    Args:
        J: PermutationAutomorphism over floating nodes
        gauge: Gauge over a node set containing J's nodes (labelled), or
               exactly J's size (positional)

    Returns:
        SignedAutomorphism
    """
    if gauge.nodes is None:
        if len(gauge) != len(J.mapping):
            raise DimensionMismatchError(
                f"Gauge length {len(gauge)} does not match permutation size {len(J.mapping)}"
            )
        restricted = Gauge(sigma=gauge.sigma, nodes=J.nodes)
    else:
        missing = [node for node in J.nodes if node not in gauge.nodes]
        if missing:
            raise DimensionMismatchError(f"Gauge has no sign for nodes {missing}")
        restricted = gauge.restrict(J.nodes)
    G = restricted.matrix(exact=True)
    return SignedAutomorphism(matrix=G * J.matrix(exact=True) * G, source=J, gauge=restricted)


def gauge_identities(sys, J, gauge):
    """
    Residuals of the gauge identities for J_s = G_t J G_t.

    Args:
        sys: InfluencedSystem
        J: PermutationAutomorphism over all nodes
        gauge: Gauge of the balanced graph

    Returns:
        dict: residual (or None when the hypothesis fails) per identity
    """
    g = sys.graph
    G = np.diag(np.array(gauge.aligned(g), dtype=float))
    Jm = J.matrix()
    Js = G @ Jm @ G
    L_s = sys.laplacian()
    L = G @ L_s @ G
    B = sys.input_matrix()
    C = sys.output_matrix()
    B_s = G @ B
    C_s = C @ G

    def residual(M):
        return float(np.max(np.abs(M))) if M.size else 0.0

    identities = {'commutes': None, 'input_fixed': None, 'output_intertwined': None}
    if residual(Jm @ L - L @ Jm) <= AnalysisConfig.RESIDUAL_TOL:
        identities['commutes'] = residual(Js @ L_s - L_s @ Js)
    if residual(Jm @ B - B) <= AnalysisConfig.RESIDUAL_TOL:
        identities['input_fixed'] = residual(Js @ B_s - B_s)
    outputs = [g.index[node] for node in sys.output_nodes]
    if all(J.mapping[i] in outputs for i in outputs):
        Z = C @ Jm @ C.T
        identities['output_intertwined'] = residual(Z @ C_s - C_s @ Js)
    return identities


def commutant_feasibility(L_s, constraints, nonzero=None):
    """
    Solve {X : X L_s = L_s X, left X right = 0 for each constraint}.

    Args:
        L_s: Square symmetric matrix
        constraints: list of LinearConstraint
        nonzero: Optional LinearConstraint whose image left X right must be
                 nonzero for the witness

    Returns:
        CommutantCertificate
    """
    L = to_float(L_s)
    n = L.shape[0]
    if L.shape != (n, n):
        raise DimensionMismatchError(f"Commutant operator needs a square matrix, got {L.shape}")
    if n > SymmetryConfig.MAX_COMMUTANT_NODES:
        raise SizeCapExceededError(
            f"Commutant solve capped at {SymmetryConfig.MAX_COMMUTANT_NODES} nodes (n = {n})"
        )
    if n == 0:
        return CommutantCertificate(basis=[], dimension=0)

    I = np.eye(n)
    blocks = [np.kron(L.T, I) - np.kron(I, L)]
    blocks += [c.operator() for c in constraints]
    scaled = []
    for block in blocks:
        if block.size == 0:
            continue
        norm = np.linalg.norm(block, 2)
        scaled.append(block / norm if norm > 0 else block)
    stacked = np.vstack(scaled)

    try:
        _, s, vh = np.linalg.svd(stacked, full_matrices=True)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Commutant SVD failed: {e}") from e
    s_full = np.zeros(n * n)
    s_full[:len(s)] = s
    sigma_max = float(s_full[0]) if s_full.size else 0.0
    tol = n * AnalysisConfig.RANK_TOL * sigma_max
    rank = int(np.sum(s_full > tol))
    ambiguous = bool(np.any((s_full > tol) & (s_full <= tol * AnalysisConfig.AMBIGUITY_FACTOR)))
    if ambiguous:
        logger.warning(
            f"Commutant rank ambiguous: singular values within {AnalysisConfig.AMBIGUITY_FACTOR:g}x of cutoff {tol:.3e}"
        )

    basis = [vh[k].reshape((n, n), order='F') for k in range(rank, n * n)]
    max_residual = 0.0
    for X in basis:
        max_residual = max(max_residual, float(np.max(np.abs(X @ L - L @ X))))
        for c in constraints:
            max_residual = max(max_residual, c.residual(X))
    if max_residual > AnalysisConfig.RESIDUAL_TOL * max(1.0, sigma_max):
        raise NumericalError(f"Commutant basis residual {max_residual:.3e} exceeds tolerance")

    witness = None
    if basis:
        if nonzero is None:
            witness = basis[0]
        else:
            images = [nonzero.residual(X) for X in basis]
            best = int(np.argmax(images))
            if images[best] > AnalysisConfig.RESIDUAL_TOL:
                witness = basis[best]
    if witness is not None:
        witness = _normalize_matrix_sign(witness)

    return CommutantCertificate(
        basis=basis,
        dimension=len(basis),
        nontrivial_witness=witness,
        ambiguous=ambiguous,
        smallest_kept_singular_value=float(s_full[rank - 1]) if rank > 0 else None,
        max_residual=max_residual,
    )


def _normalize_matrix_sign(X):
    flat = normalize_sign(X.flatten(order='F'), tol=1e-12)
    return flat.reshape(X.shape, order='F')


def _signed_permutation_witness(sys, gauge):
    """First nontrivial input-fixing automorphism J of the unsigned graph with J_s - I satisfying XB_s = 0"""
    g = sys.graph
    if g.n > SymmetryConfig.MAX_AUTOMORPHISM_NODES:
        return None
    G = np.diag(np.array(gauge.aligned(g), dtype=float))
    L_s = sys.laplacian()
    B_s = G @ sys.input_matrix()
    for J in iter_automorphisms(underlying_unsigned(g), fixed=sys.input_nodes):
        if J.is_identity:
            continue
        X = G @ J.matrix() @ G - np.eye(g.n)
        if np.max(np.abs(X @ L_s - L_s @ X)) <= AnalysisConfig.RESIDUAL_TOL and \
                np.max(np.abs(X @ B_s)) <= AnalysisConfig.RESIDUAL_TOL:
            return J
    return None


def commutant_conditions(L_s, B_s, C_s=None, C_rest=None):
    """
    Feasibility of the commutant conditions for a matrix triple.

    (a) X L_s = L_s X, X B_s = 0
    (b) additionally C_s X C_rest^T = 0 with C_s X C_s^T nonzero
    (c) additionally X v_i = 0 for every eigenvector with lambda_i(L_s) > tol

    Args:
        L_s: Symmetric matrix
        B_s: Input matrix
        C_s: Output selection (optional; (b) skipped when absent)
        C_rest: Selection of the remaining rows (may be empty)

    Returns:
        CommutantCertificate for (a) with flags a, a_b, a_c, a_b_c in `conditions`
    """
    L = to_float(L_s)
    n = L.shape[0]
    I = np.eye(n)
    B = to_float(B_s).reshape(n, -1)

    values, vectors = symmetric_eigh(L)
    positive = vectors[:, values > eigen_tolerance(values)]

    cond_a = [LinearConstraint(I, B, 'X B_s = 0')]
    cond_c = [LinearConstraint(I, positive, 'X v_i = 0, lambda_i > 0')] if positive.shape[1] else []

    cert_a = commutant_feasibility(L, cond_a)
    cert_ac = commutant_feasibility(L, cond_a + cond_c)
    certs = {'a': cert_a, 'a_c': cert_ac}

    if C_s is not None:
        C = to_float(C_s).reshape(-1, n)
        rest = to_float(C_rest).reshape(-1, n) if C_rest is not None else np.zeros((0, n))
        cond_b = [LinearConstraint(C, rest.T, 'C_s(O) X C_s(V-O)^T = 0')] if rest.shape[0] else []
        nontrivial_z = LinearConstraint(C, C.T, 'C_s(O) X C_s(O)^T != 0')
        certs['a_b'] = commutant_feasibility(L, cond_a + cond_b, nonzero=nontrivial_z)
        certs['a_b_c'] = commutant_feasibility(L, cond_a + cond_b + cond_c, nonzero=nontrivial_z)

    cert_a.conditions = {key: cert.feasible for key, cert in certs.items()}
    cert_a.dimensions = {key: cert.dimension for key, cert in certs.items()}
    cert_a.ambiguous = any(cert.ambiguous for cert in certs.values())
    return cert_a


def check_theorem4_conditions(sys, gauge=None):
    """
    Evaluate the commutant conditions on an influenced system.

    B_s = G_t B(I), C_s = C(O) G_t; see commutant_conditions for (a), (b), (c).

    Args:
        sys: InfluencedSystem
        gauge: Gauge of the balanced graph; None selects the detected gauge,
               or the identity gauge for unbalanced graphs

    Returns:
        CommutantCertificate with flags a, a_b, a_c, a_b_c and the witness class
    """
    g = sys.graph
    assumptions = [
        'output set R taken as O',
        '(a)&(c) read as state unstabilizability of (-L_s, B)',
    ]
    if gauge is None:
        balance = detect_balance(g)
        if balance.balanced:
            gauge = balance.gauge
        else:
            gauge = Gauge.identity(g.nodes)
            assumptions.append('graph unbalanced: identity gauge used')

    G = np.diag(np.array(gauge.aligned(g), dtype=float))
    cert = commutant_conditions(
        sys.laplacian(),
        G @ sys.input_matrix(),
        sys.output_matrix() @ G,
        sys.complement_output_matrix() @ G,
    )
    if cert.feasible:
        J = _signed_permutation_witness(sys, gauge)
        cert.witness_class = 'signed-permutation' if J is not None else 'commutant-element'
        if J is not None:
            assumptions.append(f"signed permutation witness cycles {J.cycles()}")
    cert.assumptions = assumptions
    logger.info(f"Commutant conditions: {cert.conditions} (dimensions {cert.dimensions})")
    return cert

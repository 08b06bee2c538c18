"""
Equitable partitions, quotients and signed characteristic matrices.
Colour refinement on the underlying unsigned graph, the orthonormal split
T = [P_bar' | Q_bar'] and block diagonalizations built on it.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from config import AnalysisConfig
from network.errors import DimensionMismatchError, GraphValidationError, NumericalError
from network.linalg import (
    eigen_tolerance,
    orthonormal_complement,
    spectra_match,
    symmetric_eigh,
    to_float,
)
from utils.logger import setup_logger

logger = setup_logger(__name__, 'logs/partitions.log')


@dataclass(frozen=True)
class Partition:
    """Ordered disjoint cells of node labels"""
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, 'cells', tuple(tuple(cell) for cell in self.cells))

    @classmethod
    def from_cells(cls, cells, nodes):
        """Partition of `nodes` from explicit cells, validated"""
        return cls(cells=cells).validate(nodes)

    @classmethod
    def discrete(cls, nodes):
        return cls(cells=tuple((node,) for node in nodes))

    @classmethod
    def single_cell(cls, nodes):
        return cls(cells=(tuple(nodes),))

    @property
    def nontrivial_cells(self):
        return tuple(cell for cell in self.cells if len(cell) >= 2)

    @property
    def nodes(self):
        return tuple(node for cell in self.cells for node in cell)

    def __len__(self):
        return len(self.cells)

    def cell_index(self):
        return {node: k for k, cell in enumerate(self.cells) for node in cell}

    def validate(self, nodes):
        """Raise unless the cells are nonempty, disjoint and cover `nodes` exactly"""
        seen = set()
        for cell in self.cells:
            if not cell:
                raise GraphValidationError("Partition contains an empty cell")
            for node in cell:
                if node in seen:
                    raise GraphValidationError(f"Node {node!r} appears in more than one cell")
                seen.add(node)
        if seen != set(nodes):
            missing = [str(node) for node in nodes if node not in seen]
            extra = [str(node) for node in seen if node not in set(nodes)]
            raise GraphValidationError(f"Partition does not cover the node set (missing {missing}, unknown {extra})")
        return self

    def refines(self, other):
        """True if every cell of self lies inside one cell of other"""
        owner = other.cell_index()
        return all(len({owner.get(node) for node in cell}) == 1 for cell in self.cells)

    def canonical(self, g):
        """Cells sorted internally and by first node in g's order"""
        cells = [tuple(g.ordered(cell)) for cell in self.cells]
        return Partition(cells=tuple(sorted(cells, key=lambda c: g.index[c[0]])))

    def same_cells(self, other):
        return {frozenset(c) for c in self.cells} == {frozenset(c) for c in other.cells}

    def to_dict(self):
        return [[str(node) for node in cell] for cell in self.cells]


@dataclass(frozen=True, eq=False)
class CharacteristicPair:
    """
    P (0/1 membership), P' = G_t P, and the orthonormal split T = [P_bar' | Q_bar'].

    Row order follows `nodes`; `shared` counts leading Q_bar' columns carried
    over from a parent pair when the pair was restricted to floating rows.
    """
    nodes: tuple
    P: np.ndarray
    P_signed: np.ndarray
    P_bar: np.ndarray
    Q_bar: np.ndarray
    shared: int = None

    @property
    def T(self):
        return np.hstack([self.P_bar, self.Q_bar])

    def orthonormality_residuals(self):
        r = self.P_bar.shape[1]
        q = self.Q_bar.shape[1]

        def worst(M):
            return float(np.max(np.abs(M))) if M.size else 0.0

        return {
            'P_bar': worst(self.P_bar.T @ self.P_bar - np.eye(r)),
            'Q_bar': worst(self.Q_bar.T @ self.Q_bar - np.eye(q)),
            'cross': worst(self.P_bar.T @ self.Q_bar),
            'completeness': abs(len(self.nodes) - r - q),
        }

    def is_orthonormal(self, tol=None):
        if tol is None:
            tol = AnalysisConfig.ORTHONORMAL_TOL
        return all(value <= tol for value in self.orthonormality_residuals().values())


@dataclass(frozen=True)
class BlockDiagonalization:
    M_P: np.ndarray
    M_Q: np.ndarray
    residual: float
    spectrum_matches: bool

    def __iter__(self):
        return iter((self.M_P, self.M_Q, self.residual))


def _unsigned_weights(g):
    W = [[Fraction(0)] * g.n for _ in range(g.n)]
    for u, v, w in g.edges:
        i, j = g.index[u], g.index[v]
        value = Fraction(int(abs(w).p), int(abs(w).q))
        W[i][j] = value
        W[j][i] = value
    return W


def _cell_profile(g, W, node, cells):
    i = g.index[node]
    return tuple(sum((W[i][g.index[x]] for x in cell), Fraction(0)) for cell in cells)


def coarsest_equitable_refinement(g, initial):
    """
    Coarsest equitable partition refining `initial` on the underlying unsigned graph.

    Each round splits every cell by the vector of per-cell weight sums;
    subcells are ordered by their lowest node index.

    Args:
        g: SignedGraph
        initial: Partition of g's nodes

    Returns:
        Partition
    """
    initial.validate(g.nodes)
    W = _unsigned_weights(g)
    cells = [tuple(g.ordered(cell)) for cell in initial.cells]
    rounds = 0
    while True:
        rounds += 1
        refined = []
        for cell in cells:
            groups = {}
            for node in cell:
                groups.setdefault(_cell_profile(g, W, node, cells), []).append(node)
            refined.extend(sorted((tuple(group) for group in groups.values()),
                                  key=lambda c: g.index[c[0]]))
        if len(refined) == len(cells):
            break
        cells = refined
    logger.debug(f"Equitable refinement stable after {rounds} rounds: {len(cells)} cells")
    return Partition(cells=tuple(cells))


def is_equitable(g, pi):
    W = _unsigned_weights(g)
    for cell in pi.cells:
        profiles = {_cell_profile(g, W, node, pi.cells) for node in cell}
        if len(profiles) > 1:
            return False
    return True


def quotient(g, pi, exact=False):
    """
    Quotient matrix b_ij = weight from one node of C_i into C_j.

    Args:
        g: SignedGraph
        pi: Equitable Partition (on the underlying unsigned graph)
        exact: Return a sympy matrix

    Returns:
        r x r matrix
    """
    pi.validate(g.nodes)
    if not is_equitable(g, pi):
        raise GraphValidationError("Quotient requires an equitable partition")
    W = _unsigned_weights(g)
    r = len(pi.cells)
    Q = sympy.zeros(r, r)
    for i, cell in enumerate(pi.cells):
        profile = _cell_profile(g, W, cell[0], pi.cells)
        for j in range(r):
            Q[i, j] = sympy.Rational(profile[j].numerator, profile[j].denominator)
    return Q if exact else to_float(Q)


def quotient_spectrum_contained(g, pi, tol=None):
    """spec(A(G/pi)) contained in spec(A(G)) for the underlying unsigned graph"""
    if tol is None:
        tol = AnalysisConfig.EIG_TOL
    Q = quotient(g, pi)
    sub = np.sort(np.real(np.linalg.eigvals(Q)))
    full = np.linalg.eigvalsh(np.abs(g.adjacency()))
    scale = max(1.0, float(np.max(np.abs(full)))) if full.size else 1.0
    return all(np.min(np.abs(full - lam)) <= tol * scale for lam in sub)


def characteristic_matrix(pi, nodes):
    pi.validate(nodes)
    owner = pi.cell_index()
    P = np.zeros((len(nodes), len(pi.cells)))
    for i, node in enumerate(nodes):
        P[i, owner[node]] = 1.0
    return P


def signed_characteristic(pi, gauge, nodes=None):
    """
    Signed characteristic matrix P' = G_t P and its orthonormal split.

    Args:
        pi: Partition
        gauge: Gauge (labelled, or positional with `nodes` supplied)
        nodes: Row order (default: gauge.nodes)

    Returns:
        CharacteristicPair
    """
    if nodes is None:
        nodes = gauge.nodes
    if nodes is None:
        raise DimensionMismatchError("Node order required for an unlabelled gauge")
    nodes = tuple(nodes)
    if len(nodes) != len(gauge):
        raise DimensionMismatchError(f"Gauge length {len(gauge)} != {len(nodes)} nodes")
    if set(pi.nodes) != set(nodes):
        raise DimensionMismatchError("Partition and gauge cover different node sets")
    sigma = np.array(gauge.sigma if gauge.nodes is None else [gauge.sign_of(node) for node in nodes],
                     dtype=float)

    P = characteristic_matrix(pi, nodes)
    P_signed = sigma[:, None] * P
    P_bar = P_signed / np.sqrt(P.sum(axis=0))[None, :]
    Q_bar = orthonormal_complement(P_bar)
    return CharacteristicPair(nodes=nodes, P=P, P_signed=P_signed, P_bar=P_bar, Q_bar=Q_bar)


def invariance_residual(A_s, pair):
    A = to_float(A_s)
    if A.shape[0] != len(pair.nodes):
        raise DimensionMismatchError(f"Matrix size {A.shape[0]} != pair rows {len(pair.nodes)}")
    projector = np.eye(A.shape[0]) - pair.P_bar @ pair.P_bar.T
    R = projector @ A @ pair.P_signed
    return float(np.max(np.abs(R))) if R.size else 0.0


def check_P_invariance(A_s, pair):
    """True iff the column space of P' is A_s-invariant (residual within tolerance)"""
    return invariance_residual(A_s, pair) <= AnalysisConfig.RESIDUAL_TOL


def block_diagonalize(M, pair):
    """
    Split a symmetric matrix along T = [P_bar' | Q_bar'].

    Args:
        M: Symmetric matrix over pair.nodes
        pair: Orthonormal CharacteristicPair

    Returns:
        BlockDiagonalization (unpacks to M_P, M_Q, residual)
    """
    M = to_float(M)
    if M.shape != (len(pair.nodes), len(pair.nodes)):
        raise DimensionMismatchError(f"Matrix shape {M.shape} does not match {len(pair.nodes)} pair rows")
    if not pair.is_orthonormal():
        raise NumericalError(f"Characteristic pair is not orthonormal: {pair.orthonormality_residuals()}")

    M_P = pair.P_bar.T @ M @ pair.P_bar
    M_Q = pair.Q_bar.T @ M @ pair.Q_bar
    off = pair.P_bar.T @ M @ pair.Q_bar
    residual = float(np.max(np.abs(off))) if off.size else 0.0

    full = symmetric_eigh(M)[0]
    parts = np.concatenate([symmetric_eigh(M_P)[0], symmetric_eigh(M_Q)[0]])
    scale = max(1.0, float(np.max(np.abs(full)))) if full.size else 1.0
    matches = spectra_match(full, parts, AnalysisConfig.RESIDUAL_TOL * scale)
    logger.debug(f"Block diagonalization: blocks {M_P.shape[0]}+{M_Q.shape[0]}, residual {residual:.3e}")
    return BlockDiagonalization(M_P=M_P, M_Q=M_Q, residual=residual, spectrum_matches=matches)


def restrict_pair(pair, floating_nodes, pi_f, gauge):
    """
    Floating-row pair for a leader-follower block.

    P_bar_f' comes from pi_f; Q_bar_f' starts with the floating rows of the
    parent Q_bar' and is completed orthonormally when pi_f leaves room.

    Args:
        pair: CharacteristicPair over every node
        floating_nodes: Floating node order
        pi_f: Partition of the floating nodes
        gauge: Gauge of the full graph

    Returns:
        CharacteristicPair with `shared` = parent Q_bar' column count
    """
    floating_nodes = tuple(floating_nodes)
    rows = [pair.nodes.index(node) for node in floating_nodes]
    base = signed_characteristic(pi_f, gauge.restrict(floating_nodes), floating_nodes)
    shared = pair.Q_bar[rows, :]
    extra = orthonormal_complement(np.hstack([base.P_bar, shared]))
    return CharacteristicPair(
        nodes=floating_nodes,
        P=base.P,
        P_signed=base.P_signed,
        P_bar=base.P_bar,
        Q_bar=np.hstack([shared, extra]),
        shared=shared.shape[1],
    )


def verify_interlacing(A, B):
    """
    Cauchy interlacing lambda_{n-m+i}(A) <= lambda_i(B) <= lambda_i(A), non-increasing order.

    Args:
        A: Symmetric n x n matrix
        B: Symmetric m x m matrix with m <= n

    Returns:
        bool
    """
    a = symmetric_eigh(A)[0][::-1]
    b = symmetric_eigh(B)[0][::-1]
    n, m = len(a), len(b)
    if m > n:
        raise DimensionMismatchError(f"Interlacing needs m <= n (m = {m}, n = {n})")
    tol = eigen_tolerance(np.concatenate([a, b]))
    for i in range(m):
        if not (a[n - m + i] - tol <= b[i] <= a[i] + tol):
            return False
    return True

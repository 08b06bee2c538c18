"""
Structural balance detection and gauge transformations.
Traversal 2-colouring, negative-cycle witnesses and the five balance equivalences.
"""
from collections import deque
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
import sympy

from network.errors import DimensionMismatchError, GraphValidationError
from network.graph_core import SignedGraph, connected_components, induced_subgraph
from network.linalg import eigen_tolerance, symmetric_eigh
from utils.logger import setup_logger

logger = setup_logger(__name__, 'logs/network.log')


@dataclass(frozen=True)
class Gauge:
    """
    Diagonal +/-1 sign vector G_t = diag(sigma).

    nodes, when present, labels each entry; otherwise entries are positional.
    """
    sigma: tuple
    nodes: tuple = None

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        if any(s not in (1, -1) for s in sigma):
            raise GraphValidationError(f"Gauge entries must be +1 or -1: {self.sigma}")
        object.__setattr__(self, 'sigma', sigma)
        if self.nodes is not None:
            nodes = tuple(self.nodes)
            if len(nodes) != len(sigma):
                raise DimensionMismatchError(
                    f"Gauge has {len(sigma)} signs for {len(nodes)} nodes"
                )
            object.__setattr__(self, 'nodes', nodes)

    @classmethod
    def identity(cls, nodes):
        nodes = tuple(nodes)
        return cls(sigma=(1,) * len(nodes), nodes=nodes)

    def __len__(self):
        return len(self.sigma)

    def sign_of(self, node):
        if self.nodes is None:
            raise DimensionMismatchError("Gauge carries no node labels")
        return self.sigma[self.nodes.index(node)]

    def negated(self):
        return Gauge(sigma=tuple(-s for s in self.sigma), nodes=self.nodes)

    def normalized(self, node):
        """Gauge (or its negation) with sigma[node] = +1"""
        return self if self.sign_of(node) == 1 else self.negated()

    def restrict(self, nodes):
        """Sub-gauge on `nodes`, in the given order"""
        return Gauge(sigma=tuple(self.sign_of(node) for node in nodes), nodes=tuple(nodes))

    def aligned(self, g):
        """Sign tuple in g's node order"""
        if len(self.sigma) != g.n:
            raise DimensionMismatchError(f"Gauge length {len(self.sigma)} != node count {g.n}")
        if self.nodes is None:
            return self.sigma
        if set(self.nodes) != set(g.nodes):
            raise DimensionMismatchError("Gauge nodes do not match graph nodes")
        return tuple(self.sign_of(node) for node in g.nodes)

    def matrix(self, exact=False):
        if exact:
            return sympy.diag(*self.sigma) if self.sigma else sympy.zeros(0, 0)
        return np.diag(np.array(self.sigma, dtype=float))

    def to_dict(self):
        if self.nodes is None:
            return {'sigma': list(self.sigma)}
        return {'sigma': list(self.sigma), 'nodes': [str(node) for node in self.nodes]}


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    gauge: Gauge = None
    witness_cycle: tuple = None
    bipartition: tuple = None

    def to_dict(self):
        return {
            'balanced': self.balanced,
            'gauge': self.gauge.to_dict() if self.gauge else None,
            'witness_cycle': [str(node) for node in self.witness_cycle] if self.witness_cycle else None,
            'bipartition': [[str(node) for node in side] for side in self.bipartition] if self.bipartition else None,
        }


@dataclass(frozen=True)
class EquivalenceReport:
    """Independent evaluations of the five balance characterizations"""
    traversal: bool
    gauge_exists: bool
    cycles_positive: bool
    zero_eigenvalue: bool
    bipartition_valid: bool
    lambda_min: float
    lambda_max: float
    negative_cycles: list = field(default_factory=list)

    @property
    def flags(self):
        return {
            'traversal': self.traversal,
            'gauge_exists': self.gauge_exists,
            'cycles_positive': self.cycles_positive,
            'zero_eigenvalue': self.zero_eigenvalue,
            'bipartition_valid': self.bipartition_valid,
        }

    @property
    def consistent(self):
        return len(set(self.flags.values())) == 1

    def to_dict(self):
        return {
            **self.flags,
            'consistent': self.consistent,
            'lambda_min': self.lambda_min,
            'lambda_max': self.lambda_max,
        }


def _sign(w):
    return 1 if w > 0 else -1


def _traversal_signs(g):
    """
    BFS sign propagation per component, roots fixed to +1.

    Returns:
        tuple: (sigma dict, conflicting edges)
    """
    sigma = {}
    conflicts = []
    for root in g.nodes:
        if root in sigma:
            continue
        sigma[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                expected = _sign(g.weight(u, v)) * sigma[u]
                if v not in sigma:
                    sigma[v] = expected
                    queue.append(v)
                elif sigma[v] != expected:
                    conflicts.append((u, v))
    return sigma, conflicts


def _canonical_cycle(g, cycle):
    """Rotate to start at the lowest-index node; orient toward the lower-index neighbour"""
    cycle = list(cycle)
    start = min(range(len(cycle)), key=lambda k: g.index[cycle[k]])
    cycle = cycle[start:] + cycle[:start]
    if len(cycle) > 2 and g.index[cycle[-1]] < g.index[cycle[1]]:
        cycle = [cycle[0]] + cycle[:0:-1]
    return tuple(cycle)


def shortest_negative_cycle(g):
    """
    Shortest cycle with negative sign product, via BFS on the signed double cover.

    Returns:
        tuple of nodes, or None when every cycle is positive
    """
    cover = nx.Graph()
    for node in g.nodes:
        cover.add_node((node, 0))
        cover.add_node((node, 1))
    for u, v, w in g.edges:
        flip = 1 if w < 0 else 0
        for parity in (0, 1):
            cover.add_edge((u, parity), (v, parity ^ flip))

    best = None
    for node in g.nodes:
        try:
            path = nx.shortest_path(cover, (node, 0), (node, 1))
        except nx.NetworkXNoPath:
            continue
        if best is None or len(path) < len(best):
            best = path
    if best is None:
        return None
    return _canonical_cycle(g, [label for label, _ in best[:-1]])


def cycle_sign(g, cycle):
    sign = 1
    for k, u in enumerate(cycle):
        v = cycle[(k + 1) % len(cycle)]
        sign *= _sign(g.weight(u, v))
    return sign


def fundamental_cycles(g):
    """
    Fundamental cycle basis of the underlying graph with each cycle's sign.

    Returns:
        list: (cycle node tuple, +1 or -1)
    """
    cycles = []
    for cycle in nx.cycle_basis(g.to_networkx()):
        cycle = _canonical_cycle(g, cycle)
        cycles.append((cycle, cycle_sign(g, cycle)))
    return sorted(cycles, key=lambda item: (len(item[0]), g.indices(item[0])))


def detect_balance(g):
    """
    Decide structural balance by sign-consistent 2-colouring.

    Args:
        g: SignedGraph (disconnected graphs are handled per component)

    Returns:
        BalanceResult with gauge and bipartition, or a negative witness cycle
    """
    sigma, conflicts = _traversal_signs(g)
    if conflicts:
        witness = shortest_negative_cycle(g)
        logger.info(f"Graph unbalanced: {len(conflicts)} conflicting edges, witness cycle {witness}")
        return BalanceResult(balanced=False, witness_cycle=witness)

    gauge = Gauge(sigma=tuple(sigma[node] for node in g.nodes), nodes=g.nodes)
    plus = tuple(node for node in g.nodes if sigma[node] == 1)
    minus = tuple(node for node in g.nodes if sigma[node] == -1)
    logger.info(f"Graph balanced: bipartition sizes {len(plus)} | {len(minus)}")
    return BalanceResult(balanced=True, gauge=gauge, bipartition=(plus, minus))


def apply_gauge(g, gauge):
    """
    Gauge transformation: (u, v, w) -> (u, v, sigma_u sigma_v w).

    Args:
        g: SignedGraph
        gauge: Gauge matching g's node count

    Returns:
        SignedGraph
    """
    sigma = dict(zip(g.nodes, gauge.aligned(g)))
    return SignedGraph(
        nodes=g.nodes,
        edges=tuple((u, v, sigma[u] * sigma[v] * w) for u, v, w in g.edges),
    )


def positive_component_gauge(g):
    """
    Gauge built by contracting positive edges and 2-colouring the negative-edge quotient.

    Returns:
        Gauge, or None when a negative edge lies inside a positive component
        or the quotient is not bipartite
    """
    positive = nx.Graph()
    positive.add_nodes_from(g.nodes)
    positive.add_edges_from((u, v) for u, v, w in g.edges if w > 0)

    super_node = {}
    for idx, component in enumerate(sorted(nx.connected_components(positive),
                                           key=lambda c: min(g.index[x] for x in c))):
        for node in component:
            super_node[node] = idx

    reduced = nx.Graph()
    reduced.add_nodes_from(set(super_node.values()))
    for u, v, w in g.edges:
        if w < 0:
            if super_node[u] == super_node[v]:
                return None
            reduced.add_edge(super_node[u], super_node[v])
    if not nx.is_bipartite(reduced):
        return None

    colour = {}
    for component in nx.connected_components(reduced):
        colouring = nx.bipartite.color(reduced.subgraph(component))
        flip = colouring[min(component)]
        for key, side in colouring.items():
            colour[key] = side ^ flip
    sigma = tuple(1 if colour[super_node[node]] == 0 else -1 for node in g.nodes)
    return Gauge(sigma=sigma, nodes=g.nodes)


def _spectral_checks(g):
    """Per-component zero-eigenvalue and eigenvector bipartition tests"""
    zero_ok = True
    bipartition_ok = True
    lam_min = float('inf')
    lam_max = 0.0
    for component in connected_components(g):
        sub = induced_subgraph(g, component)
        values, vectors = symmetric_eigh(sub.laplacian())
        lam_min = min(lam_min, float(values[0]))
        lam_max = max(lam_max, float(values[-1]))
        if abs(values[0]) > eigen_tolerance(values):
            zero_ok = False
        signs = np.sign(np.round(vectors[:, 0], 12))
        if np.any(signs == 0):
            bipartition_ok = False
            continue
        for u, v, w in sub.edges:
            if float(w) * signs[sub.index[u]] * signs[sub.index[v]] <= 0:
                bipartition_ok = False
                break
    if lam_min == float('inf'):
        lam_min = 0.0
    return zero_ok, bipartition_ok, lam_min, lam_max


def verify_equivalences(g):
    """
    Evaluate the five balance characterizations independently.

    Args:
        g: SignedGraph

    Returns:
        EquivalenceReport; `consistent` is False if any two disagree
    """
    traversal = detect_balance(g).balanced

    gauge = positive_component_gauge(g)
    gauge_exists = gauge is not None and all(w > 0 for _, _, w in apply_gauge(g, gauge).edges)

    cycles = fundamental_cycles(g)
    negative = [cycle for cycle, sign in cycles if sign < 0]

    zero_ok, bipartition_ok, lam_min, lam_max = _spectral_checks(g)

    report = EquivalenceReport(
        traversal=traversal,
        gauge_exists=gauge_exists,
        cycles_positive=not negative,
        zero_eigenvalue=zero_ok,
        bipartition_valid=bipartition_ok,
        lambda_min=lam_min,
        lambda_max=lam_max,
        negative_cycles=negative,
    )
    if not report.consistent:
        logger.warning(f"Balance characterizations disagree: {report.flags}")
    return report

"""
Signed graph construction and matrix representations.
Builds validated signed graphs, their signed Laplacians and the
leader-follower / influenced system blocks derived from them.
"""
import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import networkx as nx
import numpy as np
import sympy

from network.errors import (
    DuplicateEdgeError,
    DuplicateNodeError,
    GraphValidationError,
    InputSetError,
    SelfLoopError,
    UnknownEndpointError,
    ZeroWeightError,
)
from network.linalg import to_float
from utils.logger import setup_logger

logger = setup_logger(__name__, 'logs/network.log')


def to_rational(weight):
    """
    Convert a user-supplied weight to an exact sympy number.

    Args:
        weight: int, float, str ('-1', '0.5', '3/2'), Fraction or sympy number

    Returns:
        sympy.Rational
    """
    if isinstance(weight, bool):
        raise GraphValidationError(f"Boolean edge weight not allowed: {weight}")
    if isinstance(weight, sympy.Basic):
        value = sympy.nsimplify(weight, rational=True)
    elif isinstance(weight, int):
        value = sympy.Integer(weight)
    elif isinstance(weight, Fraction):
        value = sympy.Rational(weight.numerator, weight.denominator)
    elif isinstance(weight, float):
        if not math.isfinite(weight):
            raise GraphValidationError(f"Non-finite edge weight: {weight}")
        value = sympy.Rational(repr(weight))
    elif isinstance(weight, str):
        try:
            value = sympy.Rational(weight.strip())
        except (TypeError, ValueError) as e:
            raise GraphValidationError(f"Invalid edge weight: {weight!r}") from e
    else:
        raise GraphValidationError(f"Unsupported edge weight type: {type(weight).__name__}")
    if not value.is_Rational:
        raise GraphValidationError(f"Edge weight is not a finite rational: {weight!r}")
    return value


@dataclass(frozen=True)
class SignedGraph:
    """
    Undirected signed weighted graph.

    Node order is the declaration order and fixes the row/column order of
    every derived matrix. Edge weights are exact rationals.
    """
    nodes: tuple
    edges: tuple

    @cached_property
    def index(self):
        return {node: i for i, node in enumerate(self.nodes)}

    @property
    def n(self):
        return len(self.nodes)

    @property
    def m(self):
        return len(self.edges)

    @cached_property
    def _adjacency_exact(self):
        A = sympy.zeros(self.n, self.n)
        for u, v, w in self.edges:
            i, j = self.index[u], self.index[v]
            A[i, j] = w
            A[j, i] = w
        return A

    def adjacency(self, exact=False):
        """Signed adjacency matrix A_s"""
        if exact:
            return self._adjacency_exact.copy()
        return to_float(self._adjacency_exact)

    def degree(self, exact=False):
        """Diagonal degree matrix D_s with absolute-weight row sums"""
        D = sympy.zeros(self.n, self.n)
        for u, v, w in self.edges:
            D[self.index[u], self.index[u]] += abs(w)
            D[self.index[v], self.index[v]] += abs(w)
        return D if exact else to_float(D)

    @cached_property
    def _laplacian_exact(self):
        return self.degree(exact=True) - self._adjacency_exact

    def laplacian(self, exact=False):
        """Signed Laplacian L_s = D_s - A_s"""
        if exact:
            return self._laplacian_exact.copy()
        return to_float(self._laplacian_exact)

    def weight(self, u, v):
        """Weight of edge {u, v}, zero when absent"""
        return self._adjacency_exact[self.index[u], self.index[v]]

    def neighbors(self, node):
        i = self.index[node]
        return [self.nodes[j] for j in range(self.n) if self._adjacency_exact[i, j] != 0]

    def indices(self, nodes):
        return [self.index[node] for node in nodes]

    def ordered(self, nodes):
        """Nodes sorted into canonical order"""
        return sorted(nodes, key=self.index.__getitem__)

    def to_networkx(self):
        """networkx view with float 'weight' and integer 'sign' edge attributes"""
        G = nx.Graph()
        G.add_nodes_from(self.nodes)
        for u, v, w in self.edges:
            G.add_edge(u, v, weight=float(w), sign=1 if w > 0 else -1)
        return G

    def to_dict(self):
        return {
            'nodes': [str(node) for node in self.nodes],
            'edges': [{'u': str(u), 'v': str(v), 'w': str(w)} for u, v, w in self.edges],
        }


@dataclass(frozen=True, eq=False)
class LeaderFollowerSystem:
    """
    Floating/input blocks of L_s: dynamics x' = -A_s^f x - B_s^f u.

    floating_matrix and input_matrix are exact sympy matrices; rows follow
    floating_nodes and input columns follow input_nodes (canonical order).
    """
    graph: SignedGraph
    floating_matrix: sympy.Matrix
    input_matrix: sympy.Matrix
    input_nodes: tuple
    floating_nodes: tuple

    def floating_array(self):
        return to_float(self.floating_matrix)

    def input_array(self):
        return to_float(self.input_matrix)

    @property
    def size(self):
        return len(self.floating_nodes)


@dataclass(frozen=True, eq=False)
class InfluencedSystem:
    """
    Influenced consensus dynamics x' = -L_s x + B(I) u, y = C(O) x.
    """
    graph: SignedGraph
    input_nodes: tuple
    output_nodes: tuple

    @property
    def n(self):
        return self.graph.n

    def laplacian(self, exact=False):
        return self.graph.laplacian(exact)

    def input_matrix(self, exact=False):
        """B(I) = [e_i1 ... e_iq]"""
        B = sympy.zeros(self.n, len(self.input_nodes))
        for k, node in enumerate(self.input_nodes):
            B[self.graph.index[node], k] = 1
        return B if exact else to_float(B)

    def output_matrix(self, exact=False):
        """C(O) = [f_j1 ... f_jp]^T"""
        C = sympy.zeros(len(self.output_nodes), self.n)
        for k, node in enumerate(self.output_nodes):
            C[k, self.graph.index[node]] = 1
        return C if exact else to_float(C)

    def complement_output_matrix(self, exact=False):
        """Selection rows for the nodes outside the output set"""
        rest = [node for node in self.graph.nodes if node not in set(self.output_nodes)]
        C = sympy.zeros(len(rest), self.n)
        for k, node in enumerate(rest):
            C[k, self.graph.index[node]] = 1
        return C if exact else to_float(C)


def build_graph(nodes, edges):
    """
    Validate nodes and weighted edges and build a SignedGraph.

    Args:
        nodes: Ordered node identifiers
        edges: Iterable of (u, v, w) with w nonzero

    Returns:
        SignedGraph
    """
    nodes = tuple(nodes)
    seen = set()
    for node in nodes:
        if node in seen:
            raise DuplicateNodeError(f"Duplicate node: {node!r}")
        seen.add(node)

    pairs = set()
    clean = []
    for edge in edges:
        if len(edge) != 3:
            raise GraphValidationError(f"Edge must be (u, v, w): {edge!r}")
        u, v, w = edge
        for endpoint in (u, v):
            if endpoint not in seen:
                raise UnknownEndpointError(f"Edge ({u!r}, {v!r}) references unknown node {endpoint!r}")
        if u == v:
            raise SelfLoopError(f"Self-loop on node {u!r}")
        weight = to_rational(w)
        if weight == 0:
            raise ZeroWeightError(f"Zero weight on edge ({u!r}, {v!r})")
        pair = frozenset((u, v))
        if pair in pairs:
            raise DuplicateEdgeError(f"Duplicate edge ({u!r}, {v!r})")
        pairs.add(pair)
        clean.append((u, v, weight))

    logger.debug(f"Built signed graph: {len(nodes)} nodes, {len(clean)} edges")
    return SignedGraph(nodes=nodes, edges=tuple(clean))


def signed_laplacian(g, exact=False):
    """
    Signed Laplacian of g.

    Args:
        g: SignedGraph
        exact: Return a sympy matrix instead of a float array

    Returns:
        L_s with [L_s]_ii = sum_j |w_ij| and [L_s]_ij = -w_ij
    """
    return g.laplacian(exact)


def underlying_unsigned(g):
    """Same topology with every weight replaced by its absolute value"""
    return SignedGraph(nodes=g.nodes, edges=tuple((u, v, abs(w)) for u, v, w in g.edges))


def is_connected(g):
    if g.n <= 1:
        return True
    return nx.is_connected(g.to_networkx())


def connected_components(g):
    """Components as node lists in canonical order, sorted by their first node"""
    components = [g.ordered(c) for c in nx.connected_components(g.to_networkx())]
    return sorted(components, key=lambda c: g.index[c[0]])


def induced_subgraph(g, nodes):
    """Subgraph on `nodes`, keeping canonical order"""
    keep = set(nodes)
    unknown = keep - set(g.nodes)
    if unknown:
        raise UnknownEndpointError(f"Unknown nodes: {sorted(map(str, unknown))}")
    return SignedGraph(
        nodes=tuple(node for node in g.nodes if node in keep),
        edges=tuple(e for e in g.edges if e[0] in keep and e[1] in keep),
    )


def _select_nodes(g, selection, label):
    selection = list(dict.fromkeys(selection))
    if not selection:
        raise InputSetError(f"Empty {label} set")
    unknown = [node for node in selection if node not in g.index]
    if unknown:
        raise InputSetError(f"Unknown {label} nodes: {', '.join(map(str, unknown))}")
    return tuple(g.ordered(selection))


def leader_follower_split(g, inputs):
    """
    Partition L_s into floating and input blocks.

    Args:
        g: SignedGraph
        inputs: Nonempty strict subset of nodes

    Returns:
        LeaderFollowerSystem with A_s^f (floating x floating) and B_s^f (floating x input)
    """
    input_nodes = _select_nodes(g, inputs, 'input')
    if len(input_nodes) == g.n:
        raise InputSetError("Input set covers every node; no floating nodes remain")
    floating_nodes = tuple(node for node in g.nodes if node not in set(input_nodes))

    L = g.laplacian(exact=True)
    f_idx = g.indices(floating_nodes)
    i_idx = g.indices(input_nodes)
    system = LeaderFollowerSystem(
        graph=g,
        floating_matrix=L.extract(f_idx, f_idx),
        input_matrix=L.extract(f_idx, i_idx),
        input_nodes=input_nodes,
        floating_nodes=floating_nodes,
    )
    logger.debug(f"Leader-follower split: {len(floating_nodes)} floating, {len(input_nodes)} input")
    return system


def influenced_system(g, inputs, outputs=None):
    """
    Build the influenced system (L_s, B(I), C(O)).

    Args:
        g: SignedGraph
        inputs: Nonempty input node set (may cover every node)
        outputs: Output node set (default: every node)

    Returns:
        InfluencedSystem
    """
    input_nodes = _select_nodes(g, inputs, 'input')
    output_nodes = g.nodes if outputs is None else _select_nodes(g, outputs, 'output')
    return InfluencedSystem(graph=g, input_nodes=input_nodes, output_nodes=tuple(output_nodes))


def graph_fingerprint(g):
    """SHA-256 of the canonical node/edge listing"""
    payload = json.dumps(g.to_dict(), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def weight_summary(g):
    """
    Edge counts and weight extrema.

    Returns:
        dict: n, m, positive/negative edge counts and min/max weights
    """
    weights = [w for _, _, w in g.edges]
    return {
        'n': g.n,
        'm': g.m,
        'positive_edges': sum(1 for w in weights if w > 0),
        'negative_edges': sum(1 for w in weights if w < 0),
        'min_weight': float(min(weights)) if weights else None,
        'max_weight': float(max(weights)) if weights else None,
        'total_abs_weight': float(sum(abs(w) for w in weights)) if weights else 0.0,
    }


def is_unsigned(g):
    return all(w > 0 for _, _, w in g.edges)


def laplacian_spectrum(g):
    """Ascending eigenvalues of the float signed Laplacian"""
    L = g.laplacian()
    if L.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(L)

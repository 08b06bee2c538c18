"""
Signed graph generators for tests and sign-pattern sweeps.
Nodes are labelled '1'..'n'.
"""
from itertools import product

import networkx as nx

from network.balance import Gauge, apply_gauge
from network.errors import DimensionMismatchError
from network.graph_core import build_graph


def _labels(n):
    return [str(k) for k in range(1, n + 1)]


def _from_networkx(G, weight=1):
    """SignedGraph from an integer-labelled networkx graph; missing weights default to `weight`"""
    mapping = {node: str(node + 1) for node in G.nodes}
    nodes = [mapping[node] for node in sorted(G.nodes)]
    edges = [(mapping[u], mapping[v], data.get('weight', weight)) for u, v, data in G.edges(data=True)]
    return build_graph(nodes, edges)


def random_connected_graph(n, rng, p=0.5, signed=True, weights=(1,)):
    """
    Random connected graph: a random spanning tree plus each remaining pair with probability p.

    Args:
        n: Node count
        rng: numpy Generator
        p: Extra-edge probability
        signed: Draw each edge sign uniformly from {+1, -1}
        weights: Magnitudes to draw from

    Returns:
        SignedGraph
    """
    if n < 1:
        raise ValueError(f"Node count must be positive: {n}")
    G = nx.Graph()
    G.add_nodes_from(range(n))
    for k in range(1, n):
        G.add_edge(k, int(rng.integers(0, k)))
    for u in range(n):
        for v in range(u + 1, n):
            if not G.has_edge(u, v) and rng.random() < p:
                G.add_edge(u, v)

    for u, v in G.edges:
        magnitude = weights[int(rng.integers(0, len(weights)))]
        sign = int(rng.choice([-1, 1])) if signed else 1
        G[u][v]['weight'] = sign * magnitude
    return _from_networkx(G)


def gauge_graph(g, sigma):
    """Gauge transform of g by a sign vector in node order"""
    return apply_gauge(g, Gauge(sigma=tuple(sigma), nodes=g.nodes))


def _random_sigma(n, rng):
    return tuple(int(s) for s in rng.choice([-1, 1], size=n))


def random_balanced_graph(n, rng, p=0.5, weights=(1,)):
    """Unsigned random connected graph scrambled by a random gauge"""
    g = random_connected_graph(n, rng, p=p, signed=False, weights=weights)
    return gauge_graph(g, _random_sigma(n, rng))


def random_unbalanced_graph(n, rng, p=0.5, weights=(1,)):
    """
    Random connected graph with at least one negative cycle.

    One edge on a cycle of an unsigned graph is negated before a random gauge is applied.
    """
    if n < 3:
        raise ValueError(f"An unbalanced simple graph needs at least 3 nodes: {n}")
    while True:
        g = random_connected_graph(n, rng, p=p, signed=False, weights=weights)
        bridges = {frozenset(edge) for edge in nx.bridges(g.to_networkx())}
        candidates = [k for k, (u, v, _) in enumerate(g.edges) if frozenset((u, v)) not in bridges]
        if candidates:
            break
    flipped = candidates[int(rng.integers(0, len(candidates)))]
    pattern = [-1 if k == flipped else 1 for k in range(g.m)]
    return gauge_graph(relabel_signs(g, pattern), _random_sigma(n, rng))


def star_graph(leaves, weight=1):
    """Node '1' joined to `leaves` leaf nodes"""
    return _from_networkx(nx.star_graph(leaves), weight=weight)


def path_graph(n, weights=None):
    """Path 1-2-...-n; weights lists one weight per edge (default all 1)"""
    if weights is None:
        weights = [1] * (n - 1)
    if len(weights) != n - 1:
        raise DimensionMismatchError(f"Path on {n} nodes needs {n - 1} weights, got {len(weights)}")
    labels = _labels(n)
    return build_graph(labels, [(labels[k], labels[k + 1], w) for k, w in enumerate(weights)])


def complete_graph(n, weight=1):
    return _from_networkx(nx.complete_graph(n), weight=weight)


def relabel_signs(g, pattern):
    """Same magnitudes with edge k signed by pattern[k]"""
    pattern = [int(s) for s in pattern]
    if len(pattern) != g.m:
        raise DimensionMismatchError(f"Sign pattern has {len(pattern)} entries for {g.m} edges")
    if any(s not in (1, -1) for s in pattern):
        raise ValueError(f"Sign pattern entries must be +1 or -1: {pattern}")
    return build_graph(g.nodes, [(u, v, s * abs(w)) for (u, v, w), s in zip(g.edges, pattern)])


def sign_patterns(g):
    """Every +/-1 sign assignment to g's edges (2**m patterns)"""
    return product((1, -1), repeat=g.m)

"""
Tests for the signed graph generators.
"""
import pytest

from network.balance import detect_balance
from network.errors import DimensionMismatchError
from network.generators import (
    complete_graph,
    gauge_graph,
    path_graph,
    random_connected_graph,
    random_unbalanced_graph,
    relabel_signs,
    sign_patterns,
    star_graph,
)
from network.graph_core import is_connected, is_unsigned


def test_random_graphs_connected(rng):
    for n in range(1, 9):
        g = random_connected_graph(n, rng, p=0.3)
        assert g.n == n
        assert g.nodes == tuple(str(k) for k in range(1, n + 1))
        assert is_connected(g)
        assert g.m >= n - 1


def test_unsigned_option(rng):
    g = random_connected_graph(6, rng, signed=False, weights=(2,))
    assert is_unsigned(g)
    assert all(w == 2 for _, _, w in g.edges)


def test_unbalanced_needs_three_nodes(rng):
    with pytest.raises(ValueError):
        random_unbalanced_graph(2, rng)


def test_gauge_graph_preserves_magnitudes(ga):
    flipped = gauge_graph(ga, (1, -1, 1, 1))
    assert flipped.weight('1', '2') == -1
    assert flipped.weight('1', '4') == -1
    assert flipped.weight('2', '4') == 1


def test_shapes():
    star = star_graph(3)
    assert star.n == 4
    assert sorted(star.neighbors('1')) == ['2', '3', '4']
    assert complete_graph(4).m == 6
    path = path_graph(3, weights=[1, 2])
    assert path.weight('2', '3') == 2
    with pytest.raises(DimensionMismatchError):
        path_graph(3, weights=[1])


def test_relabel_signs(ga):
    g = relabel_signs(ga, [1] * ga.m)
    assert is_unsigned(g)
    assert detect_balance(g).balanced
    with pytest.raises(DimensionMismatchError):
        relabel_signs(ga, [1, -1])
    with pytest.raises(ValueError):
        relabel_signs(ga, [1, 0, 1, 1, 1])


def test_sign_patterns_count(ga):
    patterns = list(sign_patterns(ga))
    assert len(patterns) == 2 ** 5
    assert patterns[0] == (1, 1, 1, 1, 1)
    assert len(set(patterns)) == 32

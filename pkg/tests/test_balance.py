"""
Tests for structural balance detection, gauges and the balance equivalences.
"""
import numpy as np
import pytest

from network.balance import (
    Gauge,
    apply_gauge,
    cycle_sign,
    detect_balance,
    fundamental_cycles,
    positive_component_gauge,
    shortest_negative_cycle,
    verify_equivalences,
)
from network.errors import DimensionMismatchError, GraphValidationError
from network.generators import (
    gauge_graph,
    random_balanced_graph,
    random_connected_graph,
    random_unbalanced_graph,
)
from network.graph_core import build_graph, is_unsigned


def test_ga_balanced(ga):
    result = detect_balance(ga)
    assert result.balanced
    assert result.gauge.sigma == (1, 1, 1, -1)
    assert result.bipartition == (('1', '2', '3'), ('4',))
    assert result.witness_cycle is None


def test_gb_unbalanced_with_triangle_witness(gb):
    result = detect_balance(gb)
    assert not result.balanced
    assert result.gauge is None
    assert result.witness_cycle == ('2', '3', '4')
    assert cycle_sign(gb, result.witness_cycle) == -1


def test_gauge_removes_signs(ga):
    gauge = detect_balance(ga).gauge
    transformed = apply_gauge(ga, gauge)
    assert is_unsigned(transformed)
    G = gauge.matrix()
    assert np.allclose(G @ ga.laplacian() @ G, transformed.laplacian())


def test_gauge_involutive(gb):
    gauge = Gauge(sigma=(1, -1, -1, 1), nodes=gb.nodes)
    assert apply_gauge(apply_gauge(gb, gauge), gauge) == gb


def test_gauge_validation(ga):
    with pytest.raises(GraphValidationError):
        Gauge(sigma=(1, 2))
    with pytest.raises(DimensionMismatchError):
        Gauge(sigma=(1, -1), nodes=('a',))
    with pytest.raises(DimensionMismatchError):
        Gauge(sigma=(1, -1)).aligned(ga)


def test_gauge_normalize_and_restrict(ga):
    gauge = detect_balance(ga).gauge
    normalized = gauge.normalized('4')
    assert normalized.sigma == (-1, -1, -1, 1)
    assert normalized.sign_of('4') == 1
    assert gauge.restrict(['4', '1']).sigma == (-1, 1)
    assert Gauge.identity(ga.nodes).sigma == (1, 1, 1, 1)


def test_balance_invariant_under_gauge(ga, gb):
    sigma = (-1, 1, -1, 1)
    assert detect_balance(gauge_graph(ga, sigma)).balanced
    assert not detect_balance(gauge_graph(gb, sigma)).balanced


def test_disconnected_graph_balance():
    g = build_graph(['a', 'b', 'c', 'd'], [('a', 'b', -1), ('c', 'd', 2)])
    result = detect_balance(g)
    assert result.balanced
    assert result.gauge.sigma == (1, -1, 1, 1)


def test_tree_always_balanced():
    g = build_graph(['a', 'b', 'c'], [('a', 'b', -1), ('b', 'c', -3)])
    assert detect_balance(g).balanced
    assert fundamental_cycles(g) == []


def test_fundamental_cycles(ga, gb):
    cycles = fundamental_cycles(ga)
    assert len(cycles) == ga.m - ga.n + 1
    assert all(sign == 1 for _, sign in cycles)
    assert any(sign == -1 for _, sign in fundamental_cycles(gb))


def test_shortest_negative_cycle_none_when_balanced(ga):
    assert shortest_negative_cycle(ga) is None


def test_positive_component_gauge(ga, gb):
    gauge = positive_component_gauge(ga)
    assert gauge.sigma == (1, 1, 1, -1)
    assert positive_component_gauge(gb) is None


def test_negative_edge_inside_positive_component():
    g = build_graph(['a', 'b', 'c'], [('a', 'b', 1), ('b', 'c', 1), ('a', 'c', -1)])
    assert positive_component_gauge(g) is None
    assert not detect_balance(g).balanced


def test_equivalences_ga(ga):
    report = verify_equivalences(ga)
    assert report.consistent
    assert all(report.flags.values())
    assert abs(report.lambda_min) < 1e-9
    assert report.lambda_max == pytest.approx(4.0)


def test_equivalences_gb(gb):
    report = verify_equivalences(gb)
    assert report.consistent
    assert not any(report.flags.values())
    assert report.lambda_min > 1e-6
    assert report.negative_cycles


def test_equivalences_random(rng):
    for _ in range(20):
        n = int(rng.integers(3, 8))
        for g in (random_balanced_graph(n, rng), random_unbalanced_graph(n, rng),
                  random_connected_graph(n, rng)):
            report = verify_equivalences(g)
            assert report.consistent, report.flags


def test_generated_balance_classes(rng):
    for _ in range(10):
        assert detect_balance(random_balanced_graph(6, rng)).balanced
        assert not detect_balance(random_unbalanced_graph(6, rng)).balanced


def test_report_serialization(gb):
    data = detect_balance(gb).to_dict()
    assert data == {
        'balanced': False,
        'gauge': None,
        'witness_cycle': ['2', '3', '4'],
        'bipartition': None,
    }

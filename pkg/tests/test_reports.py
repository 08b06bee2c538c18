"""
Tests for report rendering.
"""
import json

import numpy as np
import pytest
import sympy

from cli.reports import STRUCTURED, TEXT, render, to_plain
from services.models import AnalysisReport


def test_to_plain_conversions():
    data = {
        'array': np.array([1.5, 2.0]),
        'flag': np.bool_(True),
        'count': np.int64(3),
        'rational': sympy.Rational(1, 4),
        'integer': sympy.Integer(7),
        'pair': ('a', 'b'),
        'missing': float('nan'),
        1: 'key',
    }
    assert to_plain(data) == {
        'array': [1.5, 2.0],
        'flag': True,
        'count': 3,
        'rational': 0.25,
        'integer': 7,
        'pair': ['a', 'b'],
        'missing': None,
        '1': 'key',
    }


def test_structured_is_json():
    report = AnalysisReport(graph={'n': 4}, skipped={'symmetry': 'capped'})
    text = render(report, STRUCTURED)
    assert text.endswith('\n')
    data = json.loads(text)
    assert data['graph'] == {'n': 4}
    assert data['skipped'] == {'symmetry': 'capped'}


def test_structured_float_round_trip():
    value = 0.1 + 0.2
    assert json.loads(render({'x': value}, STRUCTURED))['x'] == value


def test_text_layout():
    text = render({'verdict': 'balanced', 'gauge': [1, -1], 'lambda': 0.5, 'witness': None,
                   'nested': {'a': 1}}, TEXT)
    lines = text.splitlines()
    assert lines[0] == 'verdict: balanced'
    assert lines[1] == 'gauge: [1, -1]'
    assert lines[2] == 'lambda: 0.5'
    assert lines[3] == 'witness: -'
    assert lines[4] == 'nested:'
    assert lines[5] == '  a: 1'


def test_text_full_precision():
    assert render({'x': 1 / 3}, TEXT) == 'x: 0.33333333333333331\n'


def test_text_list_of_dicts():
    lines = render({'modes': [{'eigenvalue': 2.0}, {}]}, TEXT).splitlines()
    assert lines[0] == 'modes:'
    assert lines[1] == '  - eigenvalue: 2'
    assert lines[2] == '  - {}'


def test_unknown_format():
    with pytest.raises(ValueError):
        render({}, 'xml')

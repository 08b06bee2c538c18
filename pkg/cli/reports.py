"""
Text and structured rendering of command results and analysis reports.
"""
import json
import math

import numpy as np
import sympy

TEXT = 'text'
STRUCTURED = 'structured'


def _format_float(x):
    return format(x, '.17g')


def to_plain(value):
    """
    Recursively convert numpy, sympy and tuple values to JSON-compatible data.

    Non-finite floats become None.
    """
    if isinstance(value, dict):
        return {str(key): to_plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, sympy.Basic):
        if value.is_Integer:
            return int(value)
        value = float(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if value is None or isinstance(value, str):
        return value
    if hasattr(value, 'to_dict'):
        return to_plain(value.to_dict())
    return str(value)


def render_structured(data):
    """UTF-8 JSON text, two-space indent, LF line endings"""
    if hasattr(data, 'to_dict'):
        data = data.to_dict()
    return json.dumps(to_plain(data), indent=2, allow_nan=False, ensure_ascii=False) + '\n'


def _text_lines(value, indent=0):
    pad = '  ' * indent
    lines = []
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, dict) and item:
                lines.append(f'{pad}{key}:')
                lines.extend(_text_lines(item, indent + 1))
            elif isinstance(item, list) and item and any(isinstance(x, (dict, list)) for x in item):
                lines.append(f'{pad}{key}:')
                for entry in item:
                    if isinstance(entry, dict):
                        sub = _text_lines(entry, indent + 2) or ['{}']
                        sub[0] = f"{'  ' * (indent + 1)}- {sub[0].lstrip()}"
                        lines.extend(sub)
                    else:
                        lines.append(f"{'  ' * (indent + 1)}- {_scalar_text(entry)}")
            else:
                lines.append(f'{pad}{key}: {_scalar_text(item)}')
    else:
        lines.append(f'{pad}{_scalar_text(value)}')
    return lines


def _scalar_text(value):
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, list):
        return '[' + ', '.join(_scalar_text(x) for x in value) + ']'
    if isinstance(value, dict):
        return '{}'
    if value is None:
        return '-'
    return str(value)


def render_text(data):
    """Indented key/value listing with floats at 17 significant digits"""
    if hasattr(data, 'to_dict'):
        data = data.to_dict()
    return '\n'.join(_text_lines(to_plain(data))) + '\n'


def render(data, fmt=TEXT):
    if fmt == STRUCTURED:
        return render_structured(data)
    if fmt == TEXT:
        return render_text(data)
    raise ValueError(f"Unknown output format: {fmt}")

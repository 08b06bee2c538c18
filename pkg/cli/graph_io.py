"""
Graph file ingestion and emission.
Structured (JSON) and plain-text edge-list formats, plus trajectory CSV output.
"""
import json
import re
from pathlib import Path

import sympy

from network.errors import GraphParseError, GraphValidationError
from network.graph_core import build_graph
from utils.logger import setup_logger

logger = setup_logger(__name__, 'logs/io.log')

STRUCTURED = 'structured'
TEXT = 'text'

WEIGHT_PATTERN = re.compile(r'^[+-]?(?:\d+/\d+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)$')
TOKEN_PATTERN = re.compile(r'\S+')
WHITESPACE = re.compile(r'[ \t\n\r]*')


def sniff_format(content):
    """Structured when the first non-blank character is '{'"""
    stripped = content.lstrip()
    return STRUCTURED if stripped.startswith('{') else TEXT


def _parse_text(content):
    """
    One edge per line as "u v w"; a single token declares a node.

    Blank lines and lines starting with '#' are ignored. Node order is
    declaration order, then first appearance in an edge.
    """
    nodes = []
    seen = set()
    edges = []

    def declare(node):
        if node not in seen:
            seen.add(node)
            nodes.append(node)

    for lineno, line in enumerate(content.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith('#'):
            continue
        tokens = [(m.group(), m.start() + 1) for m in TOKEN_PATTERN.finditer(line)]
        if len(tokens) == 1:
            if tokens[0][0] in seen:
                raise GraphParseError(f"node {tokens[0][0]!r} declared twice", line=lineno, column=tokens[0][1])
            declare(tokens[0][0])
            continue
        if len(tokens) != 3:
            raise GraphParseError(f"expected 'u v w', found {len(tokens)} fields", line=lineno, column=1)
        (u, _), (v, _), (w, column) = tokens
        if not WEIGHT_PATTERN.match(w):
            raise GraphParseError(f"malformed weight {w!r}", line=lineno, column=column)
        declare(u)
        declare(v)
        edges.append((u, v, w))
    return nodes, edges


def _skip_ws(content, pos):
    return WHITESPACE.match(content, pos).end()


def _entry_offsets(content, keys=('nodes', 'edges')):
    """Offsets of each entry in the top-level arrays named by `keys` of valid JSON text"""
    decoder = json.JSONDecoder()
    offsets = {}
    pos = _skip_ws(content, 0)
    if content[pos:pos + 1] != '{':
        return offsets
    pos = _skip_ws(content, pos + 1)
    while content[pos] != '}':
        key, pos = decoder.raw_decode(content, pos)
        pos = _skip_ws(content, _skip_ws(content, pos) + 1)
        if key in keys and content[pos] == '[':
            entries = []
            pos = _skip_ws(content, pos + 1)
            while content[pos] != ']':
                entries.append(pos)
                _, pos = decoder.raw_decode(content, pos)
                pos = _skip_ws(content, pos)
                if content[pos] == ',':
                    pos = _skip_ws(content, pos + 1)
            offsets[key] = entries
            pos += 1
        else:
            _, pos = decoder.raw_decode(content, pos)
        pos = _skip_ws(content, pos)
        if content[pos] == ',':
            pos = _skip_ws(content, pos + 1)
    return offsets


def _line_column(content, offset):
    line = content.count('\n', 0, offset) + 1
    return line, offset - content.rfind('\n', 0, offset)


def _parse_structured(content):
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        raise GraphParseError(e.msg, line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict) or not isinstance(data.get('edges'), list):
        raise GraphParseError("structured graph must be an object with an 'edges' list")
    if 'nodes' in data and not isinstance(data['nodes'], list):
        raise GraphParseError("'nodes' must be a list of node labels")
    offsets = _entry_offsets(content)

    def fail(key, k, message):
        line, column = _line_column(content, offsets[key][k])
        raise GraphParseError(message, line=line, column=column)

    edges = []
    for k, edge in enumerate(data['edges']):
        if not isinstance(edge, dict) or not {'u', 'v', 'w'} <= set(edge):
            fail('edges', k, f"edge {k} must be an object with keys u, v, w")
        w = edge['w']
        if isinstance(w, bool) or not isinstance(w, (str, int, float)):
            fail('edges', k, f"edge {k}: weight must be a number or a fraction string")
        if isinstance(w, str) and not WEIGHT_PATTERN.match(w.strip()):
            fail('edges', k, f"edge {k}: malformed weight {w!r}")
        for end in ('u', 'v'):
            if isinstance(edge[end], (dict, list)) or edge[end] is None:
                fail('edges', k, f"edge {k}: endpoint {end} must be a node label")
        edges.append((str(edge['u']), str(edge['v']), w))

    if 'nodes' in data:
        for k, node in enumerate(data['nodes']):
            if isinstance(node, (dict, list)) or node is None:
                fail('nodes', k, f"node {k} must be a string or number label")
        nodes = [str(node) for node in data['nodes']]
    else:
        nodes = list(dict.fromkeys(node for u, v, _ in edges for node in (u, v)))
    return nodes, edges


def parse_graph(content, source='<string>'):
    """
    Parse graph text in either format.

    Args:
        content: File contents
        source: Name used in error messages

    Returns:
        SignedGraph
    """
    fmt = sniff_format(content)
    nodes, edges = _parse_structured(content) if fmt == STRUCTURED else _parse_text(content)
    try:
        g = build_graph(nodes, edges)
    except GraphValidationError as e:
        raise type(e)(f"{source}: {e}") from e
    logger.info(f"Parsed {fmt} graph from {source}: {g.n} nodes, {g.m} edges")
    return g


def parse_graph_file(path):
    """
    Read a graph file, sniffing the format by its leading character.

    Args:
        path: File path

    Returns:
        SignedGraph
    """
    path = Path(path)
    try:
        content = path.read_text(encoding='utf-8')
    except OSError as e:
        raise GraphParseError(f"cannot read {path}: {e.strerror}") from e
    return parse_graph(content, source=str(path))


def _weight_value(w):
    return int(w) if w.is_Integer else str(w)


def emit_graph(g, fmt=STRUCTURED):
    """
    Serialize g so that parse_graph returns an equal graph.

    Args:
        g: SignedGraph
        fmt: 'structured' or 'text'

    Returns:
        str
    """
    if fmt == STRUCTURED:
        data = {
            'nodes': [str(node) for node in g.nodes],
            'edges': [{'u': str(u), 'v': str(v), 'w': _weight_value(sympy.Rational(w))} for u, v, w in g.edges],
        }
        return json.dumps(data, indent=2) + '\n'
    if fmt == TEXT:
        for node in g.nodes:
            if TOKEN_PATTERN.fullmatch(str(node)) is None or str(node).startswith('#'):
                raise GraphValidationError(f"Node {node!r} cannot be written in the text format")
        lines = [str(node) for node in g.nodes]
        lines += [f'{u} {v} {w}' for u, v, w in g.edges]
        return '\n'.join(lines) + '\n'
    raise ValueError(f"Unknown graph format: {fmt}")


def write_trajectory_csv(trajectory, path):
    """Write t,x_<node>... rows at full precision"""
    frame = trajectory.to_frame()
    frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')
    logger.info(f"Wrote {len(frame)} trajectory samples to {path}")
    return path

"""
Reader / writer for the dense ARFF subset ASlib distributes its tables in.

Supported: '%' comment lines, one @relation, @attribute NAME TYPE with TYPE in
NUMERIC, REAL, INTEGER, STRING or {nominal,values}, then @data and comma separated rows.
Keywords are case-insensitive and '?' denotes a missing value (MISSING, i.e. None).
"""
import io
import math
import re
from collections import namedtuple

import metaxfer.util.log as log

__all__ = ['MISSING', 'ArffRelation', 'ArffError', 'MalformedArff', 'parse_arff', 'parse_arff_file', 'dump_arff',
           'dumps_arff', 'is_numeric_type']

logger = log.get_logger(__name__)

MISSING = None

NUMERIC_TYPES = ('NUMERIC', 'REAL', 'INTEGER')
STRING_TYPE = 'STRING'

_TK_COMMENT = '%'
_TK_RELATION = '@RELATION'
_TK_ATTRIBUTE = '@ATTRIBUTE'
_TK_DATA = '@DATA'

# a name is quoted with ' or " (backslash escapes allowed) or is a run of non-space characters
_NAME = r'''(?:'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*"|[^\s{}]+)'''
_RE_RELATION = re.compile(r'^@relation\s+(%s)\s*$' % _NAME, re.IGNORECASE)
_RE_ATTRIBUTE = re.compile(r'^@attribute\s+(%s)\s+(.+?)\s*$' % _NAME, re.IGNORECASE)
# one value per match: quoted, or anything up to the next comma
_RE_VALUE = re.compile(r'''\s*('(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*"|[^,]*?)\s*(,|$)''')
_RE_NEEDS_QUOTE = re.compile(r'''[\s,'"{}%\\]|^\?$|^$''')

ArffRelation = namedtuple('ArffRelation', ['name', 'attributes', 'rows'])
ArffRelation.__doc__ = """Parsed ARFF file. attributes: list of (name, type); rows: list of value lists."""


class ArffError(Exception):
    """Base class for ARFF reading errors"""


class MalformedArff(ArffError):
    """Raised when the input is not in the supported ARFF subset"""

    def __init__(self, line, reason):
        super(MalformedArff, self).__init__('line %s: %s' % (line, reason))
        self.line = line
        self.reason = reason


def is_numeric_type(type_):
    return isinstance(type_, str) and type_ in NUMERIC_TYPES


def _unquote(token):
    if token[:1] in ('"', "'") and len(token) >= 2 and token[-1] == token[0]:
        return re.sub(r'\\(.)', r'\1', token[1:-1])
    return token


def _split_values(text, lineno):
    """Split a data line or a nominal declaration into raw (still quoted) tokens."""
    tokens = []
    pos = 0
    while True:
        m = _RE_VALUE.match(text, pos)
        if m is None:
            raise MalformedArff(lineno, 'cannot tokenize %r' % text[pos:])
        tokens.append(m.group(1))
        if m.group(2) == '':
            if m.end() != len(text):
                raise MalformedArff(lineno, 'trailing characters after %r' % m.group(1))
            break
        pos = m.end()
    return tokens


def _decode_type(raw, lineno):
    if raw.startswith('{'):
        if not raw.endswith('}'):
            raise MalformedArff(lineno, 'unterminated nominal declaration %r' % raw)
        values = tuple(_unquote(v) for v in _split_values(raw[1:-1].strip(), lineno))
        if not values or any(v == '' for v in values):
            raise MalformedArff(lineno, 'empty nominal value in %r' % raw)
        return values
    type_ = raw.upper()
    if type_ not in NUMERIC_TYPES + (STRING_TYPE,):
        raise MalformedArff(lineno, 'unknown attribute type %r' % raw)
    return type_


def _convert(token, type_, lineno, name):
    if token == '?':
        return MISSING
    value = _unquote(token)
    if isinstance(type_, tuple):
        if value not in type_:
            raise MalformedArff(lineno, 'value %r not declared for nominal attribute %s' % (value, name))
        return value
    elif type_ == STRING_TYPE:
        return value
    try:
        number = float(value)
    except ValueError:
        raise MalformedArff(lineno, 'cannot parse %r as a number for attribute %s' % (value, name))
    if type_ == 'INTEGER':
        if not number.is_integer():
            raise MalformedArff(lineno, 'value %r is not an integer for attribute %s' % (value, name))
        return int(number)
    return number


def parse_arff(stream):
    """Parse an ARFF text stream (any iterable of lines, or a string).

    Returns
    -------
    ArffRelation with attributes in declaration order and rows of typed values or MISSING.

    Raises
    ------
    MalformedArff with the 1-based line number on layout, type, arity or value errors.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()

    relation = None
    attributes = []
    names = set()
    rows = []
    in_data = False
    lineno = 0

    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith(_TK_COMMENT):
            continue

        if in_data:
            if line.startswith('{'):
                raise MalformedArff(lineno, 'sparse rows are not supported')
            tokens = _split_values(line, lineno)
            if len(tokens) != len(attributes):
                raise MalformedArff(lineno, 'expected %d values, found %d' % (len(attributes), len(tokens)))
            rows.append([_convert(tok, type_, lineno, name) for tok, (name, type_) in zip(tokens, attributes)])
            continue

        upper = line.upper()
        if upper.startswith(_TK_RELATION):
            if relation is not None or attributes:
                raise MalformedArff(lineno, 'unexpected @relation')
            m = _RE_RELATION.match(line)
            if not m:
                raise MalformedArff(lineno, 'bad @relation declaration')
            relation = _unquote(m.group(1))
        elif upper.startswith(_TK_ATTRIBUTE):
            if relation is None:
                raise MalformedArff(lineno, '@attribute before @relation')
            m = _RE_ATTRIBUTE.match(line)
            if not m:
                raise MalformedArff(lineno, 'bad @attribute declaration')
            name = _unquote(m.group(1))
            if name in names:
                raise MalformedArff(lineno, 'duplicate attribute %r' % name)
            names.add(name)
            attributes.append((name, _decode_type(m.group(2), lineno)))
        elif upper.startswith(_TK_DATA):
            if not attributes:
                raise MalformedArff(lineno, '@data before any @attribute')
            in_data = True
        else:
            raise MalformedArff(lineno, 'unexpected line %r' % line[:40])

    if not in_data:
        raise MalformedArff(lineno, 'no @data section')

    logger.debug('parsed relation %s: %d attributes, %d rows' % (relation, len(attributes), len(rows)))
    return ArffRelation(relation, attributes, rows)


def parse_arff_file(path):
    with open(path, 'r', encoding='utf-8') as f:
        return parse_arff(f)


def _quote(text):
    if _RE_NEEDS_QUOTE.search(text):
        return "'%s'" % text.replace('\\', '\\\\').replace("'", "\\'")
    return text


def _encode_value(value, type_):
    if value is MISSING:
        return '?'
    if is_numeric_type(type_):
        if type_ == 'INTEGER':
            return str(int(value))
        value = float(value)
        if not math.isfinite(value):
            raise ValueError('cannot write non-finite value %r' % value)
        return repr(value)
    return _quote(str(value))


def _encode_type(type_):
    if isinstance(type_, tuple):
        return '{%s}' % ','.join(_quote(v) for v in type_)
    return type_


def dump_arff(relation, stream):
    """Write an ArffRelation in the same subset parse_arff reads."""
    stream.write('@RELATION %s\n\n' % _quote(relation.name))
    for name, type_ in relation.attributes:
        stream.write('@ATTRIBUTE %s %s\n' % (_quote(name), _encode_type(type_)))
    stream.write('\n@DATA\n')
    for row in relation.rows:
        if len(row) != len(relation.attributes):
            raise ValueError('row arity %d does not match %d attributes' % (len(row), len(relation.attributes)))
        stream.write(','.join(_encode_value(v, t) for v, (_, t) in zip(row, relation.attributes)))
        stream.write('\n')


def dumps_arff(relation):
    buf = io.StringIO()
    dump_arff(relation, buf)
    return buf.getvalue()

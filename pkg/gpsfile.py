#!/usr/bin/env python3
"""
Reader and writer for `.gps` series files

    # X1 - X2 on the unit square
    gps 2 0
    radius 1 1
    -1 : 0 1
    1 : 1 0

The radius line is optional and defaults to all ones. Rationals are
written in lowest terms and terms ascend lexicographically by exponent,
exactly as serialize_series writes them.
"""

from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from common import QmonoError, format_rational
from exponents import Exponent, RationalFormatError, VariableSignature, parse_rational
from logger import get_logger
from series import GenSeries

log = get_logger(__name__)

MAGIC = 'gps'


class ParseError(QmonoError):
    """Malformed series file, carries the offending line number"""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        self.message = message
        super().__init__(f"{path}:{line}: {message}")


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split('#', 1)[0].strip()
        if body:
            lines.append((number, body))
    return lines


def _rational(token: str, path: str, line: int) -> Fraction:
    try:
        return parse_rational(token)
    except RationalFormatError as e:
        raise ParseError(path, line, str(e)) from None


def _parse_header(lines: List[Tuple[int, str]], path: str) -> Tuple[VariableSignature, int]:
    if not lines:
        raise ParseError(path, 1, "empty file, expected 'gps <m> <n>'")
    number, body = lines[0]
    tokens = body.split()
    if len(tokens) != 3 or tokens[0] != MAGIC:
        raise ParseError(path, number, f"expected 'gps <m> <n>', got '{body}'")
    try:
        m, n = int(tokens[1]), int(tokens[2])
    except ValueError:
        raise ParseError(path, number, f"variable counts must be integers, got '{body}'") from None
    if m < 0 or n < 0:
        raise ParseError(path, number, "variable counts must be nonnegative")

    consumed = 1
    radius = tuple(Fraction(1) for _ in range(m + n))
    if len(lines) > 1 and lines[1][1].split()[0] == 'radius':
        number, body = lines[1]
        tokens = body.split()[1:]
        if len(tokens) != m + n:
            raise ParseError(path, number, f"radius needs {m + n} entries, got {len(tokens)}")
        radius = tuple(_rational(t, path, number) for t in tokens)
        if any(r <= 0 for r in radius):
            raise ParseError(path, number, "radii must be positive")
        consumed = 2
    return VariableSignature(m, n, radius), consumed


def parse_series_text(text: str, path: str = '<text>') -> GenSeries:
    """Parse the contents of a `.gps` file

    Args:
        text: File contents
        path: Name used in error messages

    Returns:
        The parsed series

    Raises:
        ParseError: on any malformed line
    """
    lines = _content_lines(text)
    signature, consumed = _parse_header(lines, path)
    size = signature.size
    terms: Dict[Exponent, Fraction] = {}
    seen: Dict[Exponent, int] = {}
    previous: Optional[Exponent] = None

    for number, body in lines[consumed:]:
        if ':' not in body:
            raise ParseError(path, number, f"expected '<coeff> : <exponents>', got '{body}'")
        coeff_text, exponent_text = body.split(':', 1)
        coeff_tokens = coeff_text.split()
        if len(coeff_tokens) != 1:
            raise ParseError(path, number, f"expected one coefficient, got '{coeff_text.strip()}'")
        coeff = _rational(coeff_tokens[0], path, number)
        if coeff == 0:
            raise ParseError(path, number, "zero coefficient")

        tokens = exponent_text.split()
        if len(tokens) != size:
            raise ParseError(path, number, f"expected {size} exponent entries, got {len(tokens)}")
        exponent = tuple(_rational(t, path, number) for t in tokens)
        for k, v in enumerate(exponent):
            if v < 0:
                raise ParseError(path, number, f"negative exponent for {signature.variable_name(k + 1)}")
            if k >= signature.m and v.denominator != 1:
                raise ParseError(
                    path, number,
                    f"exponent of standard variable {signature.variable_name(k + 1)} must be an integer, "
                    f"got {format_rational(v)}")
        if exponent in seen:
            raise ParseError(path, number, f"duplicate exponent (first seen on line {seen[exponent]})")
        if previous is not None and exponent < previous:
            raise ParseError(path, number, "terms must ascend lexicographically by exponent")
        seen[exponent] = number
        previous = exponent
        terms[exponent] = coeff

    series = GenSeries(signature, terms, check=False)
    log.debug(f"parsed {path}: {len(series)} terms on {signature}")
    return series


def parse_series_file(path: str) -> GenSeries:
    """Read and parse a UTF-8 `.gps` file"""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(str(path), 0, f"cannot read file: {e}") from None
    return parse_series_text(text, str(path))


def serialize_series(series: GenSeries) -> str:
    """Canonical `.gps` text of a series, newline-terminated"""
    signature = series.signature
    lines = [
        f"{MAGIC} {signature.m} {signature.n}",
        ('radius ' + ' '.join(format_rational(r) for r in signature.polyradius)).rstrip(),
    ]
    for exponent, coeff in series.items():
        entries = ' '.join(format_rational(v) for v in exponent)
        lines.append(f"{format_rational(coeff)} : {entries}".rstrip())
    return '\n'.join(lines) + '\n'


def write_series_file(series: GenSeries, path: str, header: Optional[str] = None):
    text = serialize_series(series)
    if header:
        text = ''.join(f"# {line}\n" for line in header.splitlines()) + text
    Path(path).write_text(text, encoding='utf-8')

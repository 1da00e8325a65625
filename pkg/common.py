#!/usr/bin/env python3
"""
Shared utilities for qmono

This module contains the root exception, the formatting helpers used by
reports across normalize, parametrize, fibercut and vlab, and the
numerical rank shared by the Jacobian checks.
"""

import re
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

import constants


class QmonoError(Exception):
    """Base class for every error raised by qmono modules"""


def numeric_rank(M: np.ndarray, threshold: float = constants.SVD_THRESHOLD) -> int:
    """Rank with singular values below `threshold` times the largest dropped"""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    return int(np.linalg.matrix_rank(M, tol=threshold * np.linalg.norm(M, 2)))


def format_rational(value: Fraction) -> str:
    """Format a rational verbatim as `p` or `p/q`"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_real(value: float) -> str:
    """Format a real with 17 significant digits"""
    if value != value:
        return 'nan'
    return f"{float(value):.17g}"


def format_vector(values: Iterable, real: bool = False) -> str:
    """Format a vector as `(v1, v2, ...)`"""
    fmt = format_real if real else format_rational
    return '(' + ', '.join(fmt(v) for v in values) + ')'


def format_sign(sign: int) -> str:
    return {-1: '-', 0: '0', 1: '+'}[sign]


def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Render rows as a left-aligned plain-text table

    Args:
        headers: Column titles
        rows: Cell strings, one sequence per row

    Returns:
        Table text without trailing newline
    """
    widths = [get_display_width(h) for h in headers]
    for row in rows:
        for col, cell in enumerate(row):
            widths[col] = max(widths[col], get_display_width(cell))

    def _line(cells):
        return '  '.join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()

    lines = [_line(headers), _line(['-' * w for w in widths])]
    lines.extend(_line(row) for row in rows)
    return '\n'.join(lines)


def strip_ansi(text: str) -> str:
    """Remove ANSI color codes from text"""
    ansi_escape = re.compile(r'\x1B(?:[@-Z\\-_]|\[[0-?]*[ -/]*[@-~])')
    return ansi_escape.sub('', text)


def get_display_width(text: str) -> int:
    """Get display width of text without ANSI codes"""
    return len(strip_ansi(str(text)))


def plural(count: int, word: str, suffix: Optional[str] = None) -> str:
    return f"{count} {word}" if count == 1 else f"{count} {word}{suffix or 's'}"

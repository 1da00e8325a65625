#!/usr/bin/env python3
"""
Exponent vectors, variable signatures and good-set combinatorics

Exponents are tuples of Fractions: the first m entries belong to the
generalized variables X_1..X_m (nonnegative rationals), the last n to the
standard variables Y_1..Y_n (nonnegative integers). Index arguments in the
public API are 1-based, as in X1, Y1.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, List, Sequence, Tuple

from common import QmonoError, format_rational, format_vector

Exponent = Tuple[Fraction, ...]


class SignatureError(QmonoError):
    """Mismatched or malformed variable signatures and exponents"""


class RationalFormatError(QmonoError):
    """Malformed rational literal"""


def parse_rational(text: str, reduced: bool = True) -> Fraction:
    """Parse `p` or `p/q` with q > 0

    Args:
        text: Literal text
        reduced: Require gcd(p, q) = 1

    Returns:
        The exact rational
    """
    text = text.strip()
    try:
        if '/' in text:
            num_text, den_text = text.split('/')
            num, den = int(num_text), int(den_text)
            if den <= 0 or den_text.strip() != den_text or den_text.startswith('+'):
                raise RationalFormatError(f"bad denominator in '{text}'")
            if reduced and (gcd(num, den) != 1 or den == 1):
                raise RationalFormatError(f"rational '{text}' is not in lowest terms")
            return Fraction(num, den)
        return Fraction(int(text))
    except ValueError:
        raise RationalFormatError(f"malformed rational '{text}'") from None


def format_exponent(e: Exponent) -> str:
    return format_vector(e)


@dataclass(frozen=True)
class VariableSignature:
    """m generalized variables on [0, s_i) and n standard ones on (-t_j, t_j)"""
    m: int
    n: int
    polyradius: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise SignatureError(f"negative variable count ({self.m}, {self.n})")
        radius = tuple(Fraction(r) for r in self.polyradius)
        object.__setattr__(self, 'polyradius', radius)
        if len(radius) != self.m + self.n:
            raise SignatureError(f"polyradius has {len(radius)} entries, expected {self.m + self.n}")
        if any(r <= 0 for r in radius):
            raise SignatureError("radii must be positive")

    @classmethod
    def uniform(cls, m: int, n: int, radius=1) -> 'VariableSignature':
        return cls(m, n, tuple(Fraction(radius) for _ in range(m + n)))

    @property
    def size(self) -> int:
        return self.m + self.n

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.m, self.n)

    def is_standard(self, position: int) -> bool:
        """Whether the 1-based position is a standard variable"""
        self.check_position(position)
        return position > self.m

    def check_position(self, position: int):
        if not 1 <= position <= self.size:
            raise SignatureError(f"variable index {position} out of range 1..{self.size}")

    def standard_position(self, j: int) -> int:
        """1-based global position of the standard variable Y_j"""
        if not 1 <= j <= self.n:
            raise SignatureError(f"standard index {j} out of range 1..{self.n}")
        return self.m + j

    def generalized_position(self, i: int) -> int:
        if not 1 <= i <= self.m:
            raise SignatureError(f"generalized index {i} out of range 1..{self.m}")
        return i

    def variable_name(self, position: int) -> str:
        self.check_position(position)
        if position <= self.m:
            return f"X{position}"
        return f"Y{position - self.m}"

    def with_radius(self, polyradius: Sequence) -> 'VariableSignature':
        return VariableSignature(self.m, self.n, tuple(polyradius))

    def meet(self, other: 'VariableSignature') -> 'VariableSignature':
        """Same shape, componentwise minimal radius"""
        if self.shape != other.shape:
            raise SignatureError(f"signature mismatch {self.shape} vs {other.shape}")
        if self.polyradius == other.polyradius:
            return self
        return self.with_radius(min(a, b) for a, b in zip(self.polyradius, other.polyradius))

    def contains(self, point: Sequence[float]) -> bool:
        """Membership of a real point in the polydisk"""
        if len(point) != self.size:
            return False
        for k, (x, r) in enumerate(zip(point, self.polyradius)):
            if k < self.m:
                if not 0 <= x < r:
                    return False
            elif not -r < x < r:
                return False
        return True

    def __str__(self) -> str:
        radii = ' '.join(format_rational(r) for r in self.polyradius)
        return f"(m={self.m}, n={self.n}, radius={radii})"


def make_exponent(entries: Iterable, signature: VariableSignature = None) -> Exponent:
    """Build an exponent tuple, checking it against a signature when given"""
    e = tuple(Fraction(v) for v in entries)
    if signature is not None:
        check_exponent(e, signature)
    return e


def check_exponent(e: Exponent, signature: VariableSignature):
    if len(e) != signature.size:
        raise SignatureError(f"exponent {format_exponent(e)} has wrong length for {signature}")
    for k, v in enumerate(e):
        if v < 0:
            raise SignatureError(f"negative exponent entry in {format_exponent(e)}")
        if k >= signature.m and v.denominator != 1:
            raise SignatureError(
                f"standard exponent of {signature.variable_name(k + 1)} must be an integer, got {v}")


def zero_exponent(size: int) -> Exponent:
    return tuple(Fraction(0) for _ in range(size))


def add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def sub_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def dominates(a: Exponent, b: Exponent) -> bool:
    """True iff a_i <= b_i for every i (a lies below b)"""
    if len(a) != len(b):
        raise SignatureError(f"length mismatch {len(a)} vs {len(b)}")
    return all(x <= y for x, y in zip(a, b))


def comparable(a: Exponent, b: Exponent) -> bool:
    return dominates(a, b) or dominates(b, a)


def min_elements(S: Iterable[Exponent]) -> List[Exponent]:
    """Minimal elements of a finite set, in canonical (lexicographic) order"""
    points = sorted(set(S))
    result = []
    for p in points:
        if not any(q != p and dominates(q, p) for q in points):
            result.append(p)
    return result


def incomparable_pairs(S: Iterable[Exponent]) -> List[Tuple[Exponent, Exponent]]:
    """All unordered incomparable pairs, each sorted, in lexicographic order"""
    points = sorted(set(S))
    return [(a, b) for a, b in combinations(points, 2) if not comparable(a, b)]

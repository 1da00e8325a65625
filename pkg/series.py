#!/usr/bin/env python3
"""
Finite-support generalized power series with exact rational coefficients

A GenSeries is a map from exponent vectors to nonzero Fractions over a
VariableSignature. Generalized variables X_i carry nonnegative rational
exponents and live on [0, s_i); standard variables Y_j carry integer
exponents and live on (-t_j, t_j). Values are immutable; every operation
returns a new series.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from common import QmonoError, format_rational
from exponents import (
    Exponent, SignatureError, VariableSignature, add_exponents, check_exponent,
    incomparable_pairs, make_exponent, min_elements, sub_exponents, zero_exponent,
)

Scalar = Union[int, Fraction]


class SeriesError(QmonoError):
    """Invalid series operation or evaluation"""


class GenSeries:
    """Finite-support mixed series Σ c_γ X^α Y^β"""

    __slots__ = ('signature', '_terms')

    def __init__(self, signature: VariableSignature,
                 terms: Optional[Mapping[Exponent, Scalar]] = None, check: bool = True):
        self.signature = signature
        clean: Dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            e = tuple(Fraction(v) for v in e)
            if check:
                check_exponent(e, signature)
            clean[e] = clean.get(e, Fraction(0)) + c
            if clean[e] == 0:
                del clean[e]
        self._terms = dict(sorted(clean.items()))

    # ------------------------------------------------------------------
    # Constructors

    @classmethod
    def zero(cls, signature: VariableSignature) -> 'GenSeries':
        return cls(signature)

    @classmethod
    def constant(cls, signature: VariableSignature, c: Scalar) -> 'GenSeries':
        return cls(signature, {zero_exponent(signature.size): c})

    @classmethod
    def monomial(cls, signature: VariableSignature, exponent: Iterable, coeff: Scalar = 1) -> 'GenSeries':
        return cls(signature, {make_exponent(exponent): coeff})

    @classmethod
    def variable(cls, signature: VariableSignature, position: int) -> 'GenSeries':
        """The coordinate series of the 1-based variable position"""
        signature.check_position(position)
        e = [0] * signature.size
        e[position - 1] = 1
        return cls.monomial(signature, e)

    # ------------------------------------------------------------------
    # Views

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Exponent, Fraction]]:
        """Terms in canonical (lexicographic ascending) exponent order"""
        return list(self._terms.items())

    @property
    def support(self) -> List[Exponent]:
        return list(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get(zero_exponent(self.signature.size), Fraction(0))

    def coefficient(self, exponent: Iterable) -> Fraction:
        return self._terms.get(make_exponent(exponent), Fraction(0))

    def variables(self) -> List[int]:
        """1-based positions of variables occurring with a positive exponent"""
        used = set()
        for e in self._terms:
            used.update(k + 1 for k, v in enumerate(e) if v != 0)
        return sorted(used)

    def with_signature(self, signature: VariableSignature) -> 'GenSeries':
        if signature.shape != self.signature.shape:
            raise SignatureError(f"cannot move series from {self.signature} to {signature}")
        return GenSeries(signature, self._terms, check=False)

    # ------------------------------------------------------------------
    # Ring operations

    def _coerce(self, other) -> 'GenSeries':
        if isinstance(other, GenSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return GenSeries.constant(self.signature, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return GenSeries(self.signature, {e: -c for e, c in self._terms.items()}, check=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, GenSeries):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise SeriesError("series powers take nonnegative integer exponents")
        result = GenSeries.constant(self.signature, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, c: Scalar) -> 'GenSeries':
        c = Fraction(c)
        return GenSeries(self.signature, {e: c * v for e, v in self._terms.items()}, check=False)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GenSeries.constant(self.signature, other)
        if not isinstance(other, GenSeries):
            return NotImplemented
        return self.signature.shape == other.signature.shape and self._terms == other._terms

    def __hash__(self):
        return hash((self.signature.shape, tuple(self._terms.items())))

    # ------------------------------------------------------------------
    # Numerics

    def eval_numeric(self, point: Sequence[float], check_domain: bool = True) -> float:
        return eval_numeric(self, point, check_domain)

    def eval_array(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an (N, m+n) array, no domain checks"""
        points = np.asarray(points, dtype=float)
        total = np.zeros(points.shape[0])
        for e, c in self._terms.items():
            value = np.full(points.shape[0], float(c))
            for k, v in enumerate(e):
                if v != 0:
                    value = value * np.power(points[:, k], float(v))
            total = total + value
        return total

    # ------------------------------------------------------------------

    def __repr__(self) -> str:
        return f"GenSeries({self})"

    def __str__(self) -> str:
        if self.is_zero:
            return '0'
        parts = []
        for e, c in self._terms.items():
            factors = []
            for k, v in enumerate(e):
                if v == 0:
                    continue
                name = self.signature.variable_name(k + 1)
                factors.append(name if v == 1 else f"{name}^({format_rational(v)})")
            magnitude = abs(c)
            if not factors:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = '*'.join(factors)
            else:
                body = format_rational(magnitude) + '*' + '*'.join(factors)
            sign = '-' if c < 0 else '+'
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ('-' if first_sign == '-' else '') + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


# =============================================================================
# Normality statuses
# =============================================================================

@dataclass(frozen=True)
class NormalDecomposition:
    """F = X^γ · U with U(0) != 0"""
    monomial_exponent: Exponent
    unit: GenSeries

    @property
    def constant(self) -> Fraction:
        return self.unit.constant_term

    def monomial(self) -> GenSeries:
        return GenSeries.monomial(self.unit.signature, self.monomial_exponent)

    def reconstruct(self) -> GenSeries:
        return self.monomial() * self.unit


@dataclass(frozen=True)
class NotNormal:
    """Witness: two incomparable minimal support exponents

    The pair is the lexicographically first one and is itself sorted, so
    X1 + X2 gives ((0,1), (1,0)).
    """
    pair: Tuple[Exponent, Exponent]


@dataclass(frozen=True)
class Zero:
    """Status of the zero series"""


ZERO = Zero()

Status = Union[NormalDecomposition, Zero]


def is_settled(status) -> bool:
    """Normal or Zero, the two statuses a leaf may carry"""
    return isinstance(status, (NormalDecomposition, Zero))


# =============================================================================
# Operations
# =============================================================================

def add(F: GenSeries, G: GenSeries) -> GenSeries:
    signature = F.signature.meet(G.signature)
    terms = dict(F._terms)
    for e, c in G._terms.items():
        terms[e] = terms.get(e, Fraction(0)) + c
    return GenSeries(signature, terms, check=False)


def mul(F: GenSeries, G: GenSeries) -> GenSeries:
    signature = F.signature.meet(G.signature)
    terms: Dict[Exponent, Fraction] = {}
    for e1, c1 in F._terms.items():
        for e2, c2 in G._terms.items():
            e = add_exponents(e1, e2)
            terms[e] = terms.get(e, Fraction(0)) + c1 * c2
    return GenSeries(signature, terms, check=False)


def product(series: Sequence[GenSeries]) -> GenSeries:
    if not series:
        raise SeriesError("product of an empty list has no signature")
    result = series[0]
    for F in series[1:]:
        result = result * F
    return result


def normal_decompose(F: GenSeries) -> Union[NormalDecomposition, NotNormal, Zero]:
    """Split F as X^γ · U when its support has a unique minimal element

    Otherwise the witness is the first of `incomparable_pairs` over the
    minimal exponents, smaller exponent first.
    """
    if F.is_zero:
        return ZERO
    minimal = min_elements(F.support)
    if len(minimal) > 1:
        return NotNormal(incomparable_pairs(minimal)[0])
    gamma = minimal[0]
    unit = GenSeries(F.signature, {sub_exponents(e, gamma): c for e, c in F.items()}, check=False)
    return NormalDecomposition(gamma, unit)


def y_regularity_order(F: GenSeries, j: int) -> Optional[int]:
    """Order of F(0,...,0,Y_j) in Y_j, or None when that restriction vanishes"""
    position = F.signature.standard_position(j) - 1
    orders = [
        e[position] for e in F.support
        if all(v == 0 for k, v in enumerate(e) if k != position)
    ]
    if not orders:
        return None
    return int(min(orders))


def log_derivative(F: GenSeries, position: int) -> GenSeries:
    """x_i ∂F/∂x_i, termwise c·X^γ ↦ c·γ_i·X^γ"""
    F.signature.check_position(position)
    k = position - 1
    return GenSeries(F.signature, {e: c * e[k] for e, c in F.items()}, check=False)


def derivative(F: GenSeries, position: int) -> GenSeries:
    """Plain partial derivative; exponents in (0, 1) have none within the class"""
    F.signature.check_position(position)
    k = position - 1
    terms = {}
    for e, c in F.items():
        v = e[k]
        if v == 0:
            continue
        if v < 1:
            raise SeriesError(
                f"∂/∂{F.signature.variable_name(position)} leaves the class on exponent {format_rational(v)}")
        terms[e[:k] + (v - 1,) + e[k + 1:]] = c * v
    return GenSeries(F.signature, terms, check=False)


def eval_numeric(F: GenSeries, point: Sequence[float], check_domain: bool = True) -> float:
    """Σ c_γ x^γ in canonical exponent order"""
    point = [float(x) for x in point]
    signature = F.signature
    if len(point) != signature.size:
        raise SeriesError(f"point has {len(point)} coordinates, expected {signature.size}")
    for k in range(signature.m):
        if point[k] < 0:
            raise SeriesError(f"negative base {point[k]} for generalized variable X{k + 1}")
    if check_domain and not signature.contains(point):
        raise SeriesError(f"point {tuple(point)} outside polydisk {signature}")
    total = 0.0
    for e, c in F.items():
        value = float(c)
        for x, v in zip(point, e):
            if v == 0:
                continue
            value *= x ** int(v) if v.denominator == 1 else x ** float(v)
        total += value
    return total


def eval_gradient(F: GenSeries, point: Sequence[float]) -> np.ndarray:
    """Numeric partial derivatives at a point with positive generalized coordinates"""
    point = np.asarray(point, dtype=float)
    grad = np.zeros(F.signature.size)
    for e, c in F.items():
        for k, v in enumerate(e):
            if v == 0:
                continue
            value = float(c * v)
            for q, w in enumerate(e):
                power = w - 1 if q == k else w
                if power != 0:
                    value *= point[q] ** float(power)
            grad[k] += value
    return grad


def specialize(F: GenSeries, values: Mapping[int, Fraction]) -> GenSeries:
    """Substitute exact values for some variables and drop them

    Args:
        F: Series to specialize
        values: 1-based position -> rational value; exponents on these
            variables must be integers

    Returns:
        Series over the signature without the substituted variables
    """
    signature = F.signature
    for position in values:
        signature.check_position(position)
    keep = [k for k in range(signature.size) if k + 1 not in values]
    new_sig = VariableSignature(
        sum(1 for k in keep if k < signature.m),
        sum(1 for k in keep if k >= signature.m),
        tuple(signature.polyradius[k] for k in keep),
    )
    terms: Dict[Exponent, Fraction] = {}
    for e, c in F.items():
        coeff = c
        for position, value in values.items():
            v = e[position - 1]
            if v == 0:
                continue
            if v.denominator != 1:
                raise SeriesError(f"cannot substitute into fractional exponent {format_rational(v)}")
            coeff *= Fraction(value) ** int(v)
        if coeff == 0:
            continue
        new_e = tuple(e[k] for k in keep)
        terms[new_e] = terms.get(new_e, Fraction(0)) + coeff
    return GenSeries(new_sig, terms, check=False)


def embed(F: GenSeries, signature: VariableSignature, positions: Sequence[int]) -> GenSeries:
    """Lift F into a larger signature, old variable k going to positions[k]"""
    if len(positions) != F.signature.size:
        raise SignatureError("one target position per variable is required")
    terms = {}
    for e, c in F.items():
        new_e = [Fraction(0)] * signature.size
        for v, position in zip(e, positions):
            new_e[position - 1] = v
        terms[tuple(new_e)] = c
    return GenSeries(signature, terms)

#!/usr/bin/env python3
"""
Elementary transformations and their chains

Each ElementaryTransform ν maps a source polydisk to a target polydisk.
Series are pulled back along ν (F ↦ F∘ν, from target to source
variables); points are pushed forward (source to target).

Index conventions (1-based):
    Ramification(i, λ)        i generalized        X_i ← X_i^λ
    Translation(i, c)         i standard           Y_i ← Y_i + c
    BlowupChartA(i, j, λ)     i, j generalized     X_j ← X_i^λ X_j
    BlowupChartB(i, j, λ)     i, j generalized     X_i ← X_i X_j^(1/λ)
    ReflectionPlus/Minus(i)   i standard           Y_i ← ±X_{m+1}
    SignFlip(i)               i standard           Y_i ← -Y_i
    FaceZero(i)               i any position       restriction to x_i = 0

Source radii: ramifications keep s_i^(1/λ) (rounded down to a rational),
blow-up charts give the moved coordinate radius 1 and shrink the kept
one to min(s_i, s_j^(1/λ)) (chart A) or min(s_j, s_i^λ) (chart B),
reflections give X_{m+1} the radius of Y_i, translations shrink by |c|.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import integer_nthroot

import constants
from common import QmonoError, format_rational
from exponents import Exponent, VariableSignature, parse_rational
from series import GenSeries


class TransformError(QmonoError):
    """Invalid transformation or mismatched signatures"""


class TransformKind(str, Enum):
    RAMIFICATION = 'Ramification'
    TRANSLATION = 'Translation'
    BLOWUP_A = 'BlowupChartA'
    BLOWUP_B = 'BlowupChartB'
    REFLECTION_PLUS = 'ReflectionPlus'
    REFLECTION_MINUS = 'ReflectionMinus'
    FACE_ZERO = 'FaceZero'
    SIGN_FLIP = 'SignFlip'


BLOWUPS = (TransformKind.BLOWUP_A, TransformKind.BLOWUP_B)
REFLECTIONS = (TransformKind.REFLECTION_PLUS, TransformKind.REFLECTION_MINUS)


# =============================================================================
# Exact radius arithmetic
# =============================================================================

def rational_power_floor(s: Fraction, lam: Fraction) -> Fraction:
    """A positive rational r <= s^lam, exact when s^lam is rational"""
    s, lam = Fraction(s), Fraction(lam)
    p, q = lam.numerator, lam.denominator
    base = s ** p if p >= 0 else 1 / s ** (-p)
    num, num_exact = integer_nthroot(base.numerator, q)
    den, den_exact = integer_nthroot(base.denominator, q)
    if num_exact and den_exact:
        return Fraction(num, den)
    # s^lam = base^(1/q): approximate then step down until r^q <= base
    guess = Fraction(math.exp(math.log(float(s)) * float(lam))).limit_denominator(constants.RADIUS_DENOMINATOR)
    step = Fraction(1, constants.RADIUS_DENOMINATOR)
    while guess > 0 and guess ** q > base:
        guess -= step
        step *= 2
    if guess <= 0:
        raise TransformError(f"no positive rational below {format_rational(s)}^{format_rational(lam)}")
    return guess


# =============================================================================
# Elementary transforms
# =============================================================================

@dataclass(frozen=True)
class ElementaryTransform:
    kind: TransformKind
    i: int
    j: Optional[int]
    param: Optional[Fraction]
    target: VariableSignature = field(repr=False)
    source: VariableSignature = field(repr=False)

    def __str__(self) -> str:
        args = [str(self.i)]
        if self.j is not None:
            args.append(str(self.j))
        if self.param is not None:
            args.append(format_rational(self.param))
        return f"{self.kind.value}({','.join(args)})"

    @property
    def is_blowup(self) -> bool:
        return self.kind in BLOWUPS

    @property
    def is_reflection(self) -> bool:
        return self.kind in REFLECTIONS

    def to_record(self) -> Dict[str, object]:
        """Serialization record with deterministic field order"""
        record: Dict[str, object] = {'kind': self.kind.value, 'i': self.i}
        if self.j is not None:
            record['j'] = self.j
        if self.param is not None:
            key = 'c' if self.kind == TransformKind.TRANSLATION else 'lambda'
            record[key] = format_rational(self.param)
        return record


def make_transform(kind: Union[TransformKind, str], target: VariableSignature, i: int,
                   j: Optional[int] = None, param=None) -> ElementaryTransform:
    """Build a transform from its target signature, deriving the source"""
    kind = TransformKind(kind)
    m, n, radius = target.m, target.n, list(target.polyradius)
    param = None if param is None else Fraction(param)

    if kind == TransformKind.RAMIFICATION:
        target.generalized_position(i)
        if param is None or param <= 0:
            raise TransformError("ramification needs λ > 0")
        radius[i - 1] = rational_power_floor(radius[i - 1], 1 / param)
        source = VariableSignature(m, n, tuple(radius))
    elif kind in BLOWUPS:
        if j is None or i == j:
            raise TransformError("blow-up charts need two distinct generalized variables")
        for index in (i, j):
            if not 1 <= index <= m:
                raise TransformError(f"blow-up index {index} is not a generalized variable")
        if param is None or param <= 0:
            raise TransformError("blow-up charts need λ > 0")
        # moved coordinate on [0, 1), kept one shrunk so the image stays in the target box
        if kind == TransformKind.BLOWUP_A:
            radius[i - 1] = min(radius[i - 1], rational_power_floor(radius[j - 1], 1 / param))
            radius[j - 1] = Fraction(1)
        else:
            radius[j - 1] = min(radius[j - 1], rational_power_floor(radius[i - 1], param))
            radius[i - 1] = Fraction(1)
        source = VariableSignature(m, n, tuple(radius))
    elif kind in REFLECTIONS:
        if not 1 <= i <= n:
            raise TransformError(f"reflection index {i} is not a standard variable")
        p = m + i - 1
        new_radius = radius[:m] + [radius[p]] + radius[m:p] + radius[p + 1:]
        source = VariableSignature(m + 1, n - 1, tuple(new_radius))
    elif kind == TransformKind.TRANSLATION:
        if not 1 <= i <= n:
            raise TransformError(f"translation index {i} is not a standard variable")
        if param is None:
            raise TransformError("translation needs a center c")
        p = m + i - 1
        radius[p] = radius[p] - abs(param)
        if radius[p] <= 0:
            raise TransformError(f"translation by {format_rational(param)} leaves the polydisk")
        source = VariableSignature(m, n, tuple(radius))
    elif kind == TransformKind.SIGN_FLIP:
        if not 1 <= i <= n:
            raise TransformError(f"sign flip index {i} is not a standard variable")
        source = target
    else:
        target.check_position(i)
        del radius[i - 1]
        if i <= m:
            source = VariableSignature(m - 1, n, tuple(radius))
        else:
            source = VariableSignature(m, n - 1, tuple(radius))
    return ElementaryTransform(kind, i, j, param, target, source)


def ramification(target, i, lam):
    return make_transform(TransformKind.RAMIFICATION, target, i, param=lam)


def translation(target, i, c):
    return make_transform(TransformKind.TRANSLATION, target, i, param=c)


def blowup_chart_a(target, i, j, lam):
    return make_transform(TransformKind.BLOWUP_A, target, i, j, lam)


def blowup_chart_b(target, i, j, lam):
    return make_transform(TransformKind.BLOWUP_B, target, i, j, lam)


def reflection_plus(target, i):
    return make_transform(TransformKind.REFLECTION_PLUS, target, i)


def reflection_minus(target, i):
    return make_transform(TransformKind.REFLECTION_MINUS, target, i)


def face_zero(target, i):
    return make_transform(TransformKind.FACE_ZERO, target, i)


def sign_flip(target, i):
    return make_transform(TransformKind.SIGN_FLIP, target, i)


def transform_from_record(record: Dict[str, object], target: VariableSignature) -> ElementaryTransform:
    param = record.get('lambda', record.get('c'))
    if param is not None:
        param = parse_rational(str(param))
    return make_transform(record['kind'], target, int(record['i']),
                          None if record.get('j') is None else int(record['j']), param)


def critical_variable(t: ElementaryTransform) -> Optional[int]:
    """The variable one divides by to invert a blow-up chart"""
    if t.kind == TransformKind.BLOWUP_A:
        return t.i
    if t.kind == TransformKind.BLOWUP_B:
        return t.j
    return None


def equalizing_blowup(alpha: Exponent, beta: Exponent) -> Tuple[int, int, Fraction]:
    """(i, j, λ) making an incomparable pair comparable in both charts"""
    i = next(k for k, (a, b) in enumerate(zip(alpha, beta)) if a > b)
    j = next(k for k, (a, b) in enumerate(zip(alpha, beta)) if a < b)
    lam = (alpha[i] - beta[i]) / (beta[j] - alpha[j])
    return i + 1, j + 1, lam


# =============================================================================
# Chains
# =============================================================================

class TransformChain:
    """Composition ν_1 ∘ ν_2 ∘ ... ∘ ν_k, listed from the target side"""

    def __init__(self, steps: Sequence[ElementaryTransform] = (),
                 base: Optional[VariableSignature] = None):
        self.steps: Tuple[ElementaryTransform, ...] = tuple(steps)
        if not self.steps and base is None:
            raise TransformError("an empty chain needs a base signature")
        for upper, lower in zip(self.steps, self.steps[1:]):
            if upper.source != lower.target:
                raise TransformError(f"{lower} does not compose below {upper}")
        if base is not None and self.steps and self.steps[0].target != base:
            raise TransformError("base signature differs from the first target")
        self._base = base if base is not None else self.steps[0].target

    @property
    def target(self) -> VariableSignature:
        return self._base

    @property
    def source(self) -> VariableSignature:
        return self.steps[-1].source if self.steps else self._base

    def __iter__(self) -> Iterator[ElementaryTransform]:
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, index):
        return self.steps[index]

    def then(self, more: Union['TransformChain', ElementaryTransform, Sequence[ElementaryTransform]]) -> 'TransformChain':
        """Append transforms on the source side"""
        if isinstance(more, ElementaryTransform):
            extra = (more,)
        else:
            extra = tuple(more)
        return TransformChain(self.steps + extra, self._base)

    def __eq__(self, other) -> bool:
        return isinstance(other, TransformChain) and self.steps == other.steps and self._base == other._base

    def __hash__(self):
        return hash((self.steps, self._base))

    def __str__(self) -> str:
        if not self.steps:
            return 'id'
        return ' ∘ '.join(str(t) for t in self.steps)


Transformish = Union[ElementaryTransform, TransformChain]


def _steps(t: Transformish) -> Tuple[ElementaryTransform, ...]:
    return t.steps if isinstance(t, TransformChain) else (t,)


# =============================================================================
# Series pull-back
# =============================================================================

def _pull_term(t: ElementaryTransform, e: Exponent, c: Fraction) -> List[Tuple[Exponent, Fraction]]:
    kind = t.kind
    if kind == TransformKind.RAMIFICATION:
        k = t.i - 1
        return [(e[:k] + (t.param * e[k],) + e[k + 1:], c)]
    if kind == TransformKind.BLOWUP_A:
        i, j = t.i - 1, t.j - 1
        new = list(e)
        new[i] = e[i] + t.param * e[j]
        return [(tuple(new), c)]
    if kind == TransformKind.BLOWUP_B:
        i, j = t.i - 1, t.j - 1
        new = list(e)
        new[j] = e[j] + e[i] / t.param
        return [(tuple(new), c)]
    m = t.target.m
    if kind in REFLECTIONS:
        p = m + t.i - 1
        beta = e[p]
        sign = -1 if kind == TransformKind.REFLECTION_MINUS and beta.numerator % 2 else 1
        return [(e[:m] + (beta,) + e[m:p] + e[p + 1:], c * sign)]
    if kind == TransformKind.SIGN_FLIP:
        p = m + t.i - 1
        return [(e, -c if e[p].numerator % 2 else c)]
    if kind == TransformKind.TRANSLATION:
        p = m + t.i - 1
        b = int(e[p])
        return [
            (e[:p] + (Fraction(k),) + e[p + 1:], c * math.comb(b, k) * t.param ** (b - k))
            for k in range(b + 1)
        ]
    p = t.i - 1
    if e[p] != 0:
        return []
    return [(e[:p] + e[p + 1:], c)]


def apply_transform(F: GenSeries, t: Transformish) -> GenSeries:
    """Exact pull-back F ↦ F∘ν along a transform or chain"""
    if isinstance(t, TransformChain) and F.signature.shape != t.target.shape:
        raise TransformError(f"series signature {F.signature} does not match chain target {t.target}")
    for step in _steps(t):
        if F.signature.shape != step.target.shape:
            raise TransformError(f"series signature {F.signature} does not match target of {step}")
        terms: Dict[Exponent, Fraction] = {}
        for e, c in F.items():
            for new_e, new_c in _pull_term(step, e, c):
                terms[new_e] = terms.get(new_e, Fraction(0)) + new_c
        F = GenSeries(step.source, terms, check=False)
    return F


def transform_exponent(t: ElementaryTransform, e: Exponent) -> Exponent:
    """Image of a single exponent under a monomial-type transform"""
    images = _pull_term(t, e, Fraction(1))
    if len(images) != 1:
        raise TransformError(f"{t} does not map monomials to monomials")
    return images[0][0]


def coordinate_series(chain: TransformChain) -> List[GenSeries]:
    """Components of the chain map: target coordinates pulled back to the source"""
    return [apply_transform(GenSeries.variable(chain.target, k), chain)
            for k in range(1, chain.target.size + 1)]


# =============================================================================
# Pointwise action
# =============================================================================

def _push(t: ElementaryTransform, P: np.ndarray) -> np.ndarray:
    """Source points (rows) to target points"""
    kind, m = t.kind, t.target.m
    Q = np.array(P, dtype=float, copy=True)
    if kind == TransformKind.RAMIFICATION:
        Q[:, t.i - 1] = np.power(P[:, t.i - 1], float(t.param))
    elif kind == TransformKind.BLOWUP_A:
        Q[:, t.j - 1] = np.power(P[:, t.i - 1], float(t.param)) * P[:, t.j - 1]
    elif kind == TransformKind.BLOWUP_B:
        Q[:, t.i - 1] = P[:, t.i - 1] * np.power(P[:, t.j - 1], float(1 / t.param))
    elif kind in REFLECTIONS:
        sign = 1.0 if kind == TransformKind.REFLECTION_PLUS else -1.0
        moved = sign * P[:, m]
        rest = np.delete(P, m, axis=1)
        Q = np.insert(rest, m + t.i - 1, moved, axis=1)
    elif kind == TransformKind.TRANSLATION:
        Q[:, m + t.i - 1] = P[:, m + t.i - 1] + float(t.param)
    elif kind == TransformKind.SIGN_FLIP:
        Q[:, m + t.i - 1] = -P[:, m + t.i - 1]
    else:
        Q = np.insert(P, t.i - 1, 0.0, axis=1)
    return Q


def _pull_points(t: ElementaryTransform, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Target points to source points, with a mask of points in the image"""
    kind, m = t.kind, t.target.m
    X = np.asarray(X, dtype=float)
    P = np.array(X, copy=True)
    ok = np.ones(X.shape[0], dtype=bool)
    with np.errstate(divide='ignore', invalid='ignore'):
        if kind == TransformKind.RAMIFICATION:
            P[:, t.i - 1] = np.power(X[:, t.i - 1], float(1 / t.param))
        elif kind in BLOWUPS:
            divisor_col = t.i - 1 if kind == TransformKind.BLOWUP_A else t.j - 1
            moved_col = t.j - 1 if kind == TransformKind.BLOWUP_A else t.i - 1
            power = float(t.param) if kind == TransformKind.BLOWUP_A else float(1 / t.param)
            divisor = np.power(X[:, divisor_col], power)
            on_divisor = divisor == 0
            ok &= ~on_divisor | (X[:, moved_col] == 0)
            P[:, moved_col] = np.where(on_divisor, 0.0, X[:, moved_col] / np.where(on_divisor, 1.0, divisor))
        elif kind in REFLECTIONS:
            sign = 1.0 if kind == TransformKind.REFLECTION_PLUS else -1.0
            value = sign * X[:, m + t.i - 1]
            ok &= value >= 0
            rest = np.delete(X, m + t.i - 1, axis=1)
            P = np.insert(rest, m, value, axis=1)
        elif kind == TransformKind.TRANSLATION:
            P[:, m + t.i - 1] = X[:, m + t.i - 1] - float(t.param)
        elif kind == TransformKind.SIGN_FLIP:
            P[:, m + t.i - 1] = -X[:, m + t.i - 1]
        else:
            ok &= X[:, t.i - 1] == 0
            P = np.delete(X, t.i - 1, axis=1)
    ok &= _inside(t.source, P)
    return P, ok


def _inside(signature: VariableSignature, P: np.ndarray) -> np.ndarray:
    radius = np.array([float(r) for r in signature.polyradius])
    if P.shape[1] == 0:
        return np.ones(P.shape[0], dtype=bool)
    gen = P[:, :signature.m]
    std = P[:, signature.m:]
    ok = np.all((gen >= 0) & (gen < radius[:signature.m]), axis=1)
    ok &= np.all(np.abs(std) < radius[signature.m:], axis=1)
    return ok


def map_points(t: Transformish, P: np.ndarray) -> np.ndarray:
    """Vectorized push-forward of source rows, no domain checks"""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    for step in reversed(_steps(t)):
        P = _push(step, P)
    return P


def map_point(t: Transformish, p: Sequence[float]) -> Tuple[float, ...]:
    """Image ν(p) of a point of the source polydisk"""
    source = t.source
    p = [float(x) for x in p]
    if not source.contains(p):
        raise TransformError(f"point {tuple(p)} outside source polydisk {source}")
    return tuple(map_points(t, np.array([p]))[0])


def invert_points(t: Transformish, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Preimages of target rows and a mask of rows with a preimage in the source"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    ok = np.ones(X.shape[0], dtype=bool)
    for step in _steps(t):
        X, step_ok = _pull_points(step, X)
        ok &= step_ok
    return X, ok


def invert_point(t: Transformish, x: Sequence[float]) -> Optional[Tuple[float, ...]]:
    P, ok = invert_points(t, np.array([list(map(float, x))]))
    return tuple(P[0]) if ok[0] else None


# =============================================================================
# Recentering
# =============================================================================

def recenter(a: Sequence, signs: Sequence[int], radius=1) -> TransformChain:
    """Chain pulling series back along h_{a,σ}^{-1}(x') = a + σ·x'

    The standard block is (Y_1..Y_n) with n = len(a); the target radius of
    Y_j is radius + |a_j| so that the recentered source has radius `radius`.
    """
    if len(a) != len(signs) or any(s not in (-1, 1) for s in signs):
        raise TransformError("recenter needs one sign in {-1, +1} per coordinate")
    a = [Fraction(v) for v in a]
    radius = Fraction(radius)
    target = VariableSignature(0, len(a), tuple(radius + abs(v) for v in a))
    steps: List[ElementaryTransform] = []
    current = target
    for j, value in enumerate(a, start=1):
        if value != 0:
            steps.append(translation(current, j, value))
            current = steps[-1].source
    for j, sign in enumerate(signs, start=1):
        if sign == -1:
            steps.append(sign_flip(current, j))
            current = steps[-1].source
    return TransformChain(steps, target)


def recenter_point(a: Sequence, signs: Sequence[int], x: Sequence[float]) -> Tuple[float, ...]:
    """h_{a,σ}(x) = (σ_1(x_1 - a_1), ..., σ_m(x_m - a_m))"""
    return tuple(s * (float(xi) - float(ai)) for ai, s, xi in zip(a, signs, x))


def recenter_point_inverse(a: Sequence, signs: Sequence[int], y: Sequence[float]) -> Tuple[float, ...]:
    return tuple(float(ai) + s * float(yi) for ai, s, yi in zip(a, signs, y))

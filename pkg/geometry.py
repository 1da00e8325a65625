#!/usr/bin/env python3
"""
Quadrants, sign analysis of normal series, local parametrizations of
polydisks and basic sets, cleared-Jacobian calculus and rank profiling.

A Chart is an admissible chain restricted to a sub-quadrant of its source
polydisk. build_local_parametrization produces a family of charts on
which every compatibility function has a constant, symbolically certified
sign; sampling helpers re-check signs and covering numerically.
"""

import itertools
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

import constants
from common import QmonoError, format_rational, numeric_rank
from exponents import VariableSignature, zero_exponent
from logger import get_logger
from series import (
    GenSeries, NormalDecomposition, NotNormal, Zero, eval_gradient, log_derivative,
    normal_decompose,
)
from trees import AdmissibleTree, FORK_BLOWUP, iter_branches, star_monomialize
from transforms import (
    ElementaryTransform, TransformChain, apply_transform, critical_variable, face_zero,
    invert_points, map_points, reflection_minus, reflection_plus,
)

log = get_logger(__name__)


class RadiusNotCertified(QmonoError):
    """A unit could not be shown sign-constant on the requested radius"""


class RankInstability(QmonoError):
    """Numeric rank differs between samples of one chart"""


class Selector(str, Enum):
    ZERO = '0'
    POSITIVE = '+'
    NEGATIVE = '-'


SIGN_OF = {Selector.POSITIVE: 1, Selector.NEGATIVE: -1}


# =============================================================================
# Quadrants, charts, basic sets
# =============================================================================

@dataclass(frozen=True)
class Quadrant:
    """Per-variable selectors inside a polydisk"""
    signature: VariableSignature
    selectors: Tuple[Selector, ...]

    def __post_init__(self):
        selectors = tuple(Selector(s) for s in self.selectors)
        object.__setattr__(self, 'selectors', selectors)
        if len(selectors) != self.signature.size:
            raise QmonoError(f"quadrant has {len(selectors)} selectors for {self.signature}")
        for k, s in enumerate(selectors[:self.signature.m]):
            if s == Selector.NEGATIVE:
                raise QmonoError(f"generalized variable X{k + 1} has no negative side")

    @classmethod
    def open(cls, signature: VariableSignature) -> 'Quadrant':
        return cls(signature, tuple(Selector.POSITIVE for _ in range(signature.size)))

    @property
    def dimension(self) -> int:
        return sum(1 for s in self.selectors if s != Selector.ZERO)

    @property
    def radius(self) -> Tuple[Fraction, ...]:
        return self.signature.polyradius

    @property
    def zero_positions(self) -> List[int]:
        return [k + 1 for k, s in enumerate(self.selectors) if s == Selector.ZERO]

    @property
    def free_positions(self) -> List[int]:
        return [k + 1 for k, s in enumerate(self.selectors) if s != Selector.ZERO]

    def with_radius(self, radius: Sequence) -> 'Quadrant':
        return Quadrant(self.signature.with_radius(radius), self.selectors)

    def sample(self, rng: np.random.Generator, count: int,
               low: float = constants.INTERIOR_LOW, high: float = constants.INTERIOR_HIGH) -> np.ndarray:
        """Interior points, each free coordinate at a fraction in [low, high] of its radius"""
        radius = np.array([float(r) for r in self.radius])
        signs = np.array([SIGN_OF.get(s, 0) for s in self.selectors], dtype=float)
        u = rng.uniform(low, high, size=(count, self.signature.size))
        return u * radius * signs

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        ok = np.ones(points.shape[0], dtype=bool)
        for k, (s, r) in enumerate(zip(self.selectors, self.radius)):
            col = points[:, k]
            if s == Selector.ZERO:
                ok &= col == 0
            elif s == Selector.POSITIVE:
                ok &= (col > 0) & (col < float(r))
            else:
                ok &= (col < 0) & (col > -float(r))
        return ok

    def __str__(self) -> str:
        return '(' + ','.join(s.value for s in self.selectors) + ')'


def enumerate_quadrants(signature: VariableSignature) -> List[Quadrant]:
    choices = [(Selector.ZERO, Selector.POSITIVE)] * signature.m
    choices += [(Selector.ZERO, Selector.NEGATIVE, Selector.POSITIVE)] * signature.n
    return [Quadrant(signature, combo) for combo in itertools.product(*choices)]


@dataclass
class Chart:
    """An admissible chain restricted to a sub-quadrant of its source

    When `embedding` is given the chart map is embedding ∘ chain, with the
    embedding series defined over the chain's target signature.
    """
    chain: TransformChain
    domain: Quadrant
    embedding: Optional[List[GenSeries]] = None

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    @property
    def radius(self) -> Tuple[Fraction, ...]:
        return self.domain.radius


@dataclass
class BasicSetDescriptor:
    """{f = 0, g_1 > 0, ..., g_p > 0} on the polydisk of f's signature"""
    equation: GenSeries
    inequalities: List[GenSeries] = field(default_factory=list)

    def __post_init__(self):
        for g in self.inequalities:
            if g.signature.shape != self.equation.signature.shape:
                raise QmonoError("basic set series must share a signature")

    @property
    def signature(self) -> VariableSignature:
        signature = self.equation.signature
        for g in self.inequalities:
            signature = signature.meet(g.signature)
        return signature

    @property
    def series(self) -> List[GenSeries]:
        return [self.equation] + list(self.inequalities)


# =============================================================================
# Exact radius certification
# =============================================================================

def power_upper_bound(s: Fraction, gamma: Fraction) -> Fraction:
    """A rational >= s^gamma, exact when s^gamma is rational"""
    p, q = gamma.numerator, gamma.denominator
    base = Fraction(s) ** p
    if q == 1:
        return base
    scale = 10 ** 6
    # (num/den)^(1/q) = (num * den^(q-1) * scale^q)^(1/q) / (den * scale)
    radicand = base.numerator * base.denominator ** (q - 1) * scale ** q
    root, exact = sympy.integer_nthroot(radicand, q)
    if not exact:
        root += 1
    return Fraction(root, base.denominator * scale)


def _tail_bound(unit: GenSeries, radius: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for e, c in unit.items():
        if all(v == 0 for v in e):
            continue
        term = abs(c)
        for r, v in zip(radius, e):
            if v != 0:
                term *= power_upper_bound(r, v)
        total += term
    return total


def validity_radius(nd: NormalDecomposition, start: Sequence, closed: bool = True) -> Tuple[Fraction, ...]:
    """Shrink `start` until Σ_{γ≠0} |c_γ| r^γ < |c| (or <= for the open polydisk)

    The radii of the variables the unit involves are halved together;
    the others are returned unchanged.

    Args:
        nd: Normal decomposition whose unit is certified
        start: Initial polyradius
        closed: Certify the closed polydisk (strict inequality)

    Returns:
        Certified polyradius, componentwise <= start
    """
    unit = nd.unit
    c = abs(unit.constant_term)
    if c == 0:
        raise RadiusNotCertified("unit has zero constant term")
    radius = [Fraction(r) for r in start]
    used = [p - 1 for p in unit.variables()]
    for _ in range(256):
        bound = _tail_bound(unit, radius)
        if bound < c or (not closed and bound == c):
            return tuple(radius)
        for k in used:
            radius[k] /= 2
    raise RadiusNotCertified(f"no radius found for unit {unit}")


def _first_root(unit: GenSeries, position: int, side: int) -> Optional[Fraction]:
    """Rational lower bound of the first root of a one-variable unit on one side of 0"""
    k = position - 1
    q = math.lcm(*[e[k].denominator for e in unit.support])
    t = sympy.Symbol('t')
    expr = sum(sympy.Rational(c.numerator, c.denominator) * (side * t) ** int(e[k] * q)
               for e, c in unit.items())
    poly = sympy.Poly(expr, t)
    eps = Fraction(1, 10 ** 6)
    for _ in range(8):
        positive = []
        for (a, b), _mult in poly.intervals(eps=sympy.Rational(eps.numerator, eps.denominator)):
            a = Fraction(int(a.p), int(a.q))
            b = Fraction(int(b.p), int(b.q))
            if b <= 0:
                continue
            positive.append((a, b))
        if not positive:
            return None
        a, b = min(positive)
        if a > 0:
            return a ** q
        eps /= 1000
    return None


def certified_radius(unit: GenSeries, start: Sequence, sides: Optional[Sequence[int]] = None) -> Tuple[Fraction, ...]:
    """Radius on whose open quadrant the unit keeps the sign of its constant term

    One-variable units get the exact first root (sympy root isolation);
    others fall back to validity_radius on the open polydisk.
    """
    used = unit.variables()
    radius = [Fraction(r) for r in start]
    if not used:
        return tuple(radius)
    if len(used) == 1:
        position = used[0]
        side = sides[position - 1] if sides else 1
        root = _first_root(unit, position, side or 1)
        if root is not None and root < radius[position - 1]:
            radius[position - 1] = root
        return tuple(radius)
    nd = NormalDecomposition(zero_exponent(unit.signature.size), unit)
    return validity_radius(nd, radius, closed=False)


def _face_chain(signature: VariableSignature, zero_positions: Sequence[int]) -> TransformChain:
    steps: List[ElementaryTransform] = []
    current = signature
    for position in sorted(zero_positions, reverse=True):
        steps.append(face_zero(current, position))
        current = steps[-1].source
    return TransformChain(steps, signature)


def _face_radius(unit: GenSeries, Q: Quadrant) -> Dict[int, Fraction]:
    """Certified radius per free position of Q for the unit restricted to Q's face"""
    face = _face_chain(unit.signature, Q.zero_positions)
    restricted = apply_transform(unit.with_signature(Q.signature), face)
    free = Q.free_positions
    sides = [SIGN_OF[Q.selectors[p - 1]] for p in free]
    start = [Q.radius[p - 1] for p in free]
    radius = certified_radius(restricted, start, sides)
    return dict(zip(free, radius))


def sign_on_quadrant(nd: Union[NormalDecomposition, Zero], Q: Quadrant) -> int:
    """Constant sign of a normal series on a quadrant

    Raises:
        RadiusNotCertified: when the unit is not shown nonvanishing on Q
    """
    if isinstance(nd, Zero):
        return 0
    e = nd.monomial_exponent
    if any(s == Selector.ZERO and v > 0 for s, v in zip(Q.selectors, e)):
        return 0
    for position, r in _face_radius(nd.unit, Q).items():
        if r < Q.radius[position - 1]:
            raise RadiusNotCertified(
                f"unit certified to radius {format_rational(r)} on {Q.signature.variable_name(position)},"
                f" quadrant needs {format_rational(Q.radius[position - 1])}")
    sign = 1 if nd.constant > 0 else -1
    for k, (s, v) in enumerate(zip(Q.selectors, e)):
        if s == Selector.NEGATIVE and v.numerator % 2:
            sign = -sign
    return sign


# =============================================================================
# Local parametrizations
# =============================================================================

def _reflection_completions(signature: VariableSignature) -> List[List[ElementaryTransform]]:
    """Every ±reflection sequence turning the standard block generalized"""
    sequences: List[List[ElementaryTransform]] = [[]]
    for _ in range(signature.n):
        extended = []
        for steps in sequences:
            current = steps[-1].source if steps else signature
            extended.append(steps + [reflection_plus(current, 1)])
            extended.append(steps + [reflection_minus(current, 1)])
        sequences = extended
    return sequences


def critical_statuses(chain: TransformChain) -> List:
    """Status of each blow-up's critical variable pulled to the chain's source"""
    statuses = []
    steps = chain.steps
    for s, t in enumerate(steps):
        w = critical_variable(t)
        if w is None:
            continue
        W = apply_transform(GenSeries.variable(t.source, w), TransformChain(steps[s + 1:], t.source))
        statuses.append(normal_decompose(W))
    return statuses


def injectivity_certificate(chart: Chart) -> bool:
    """No ancestor critical variable vanishes on the chart domain"""
    for status in critical_statuses(chart.chain):
        if isinstance(status, NotNormal):
            return False
        try:
            if sign_on_quadrant(status, chart.domain) == 0:
                return False
        except RadiusNotCertified:
            return False
    return True


def _candidates(base: TransformChain, compat: List[GenSeries], max_depth: int) -> List[Tuple[TransformChain, Quadrant]]:
    signature = base.source
    local = [apply_transform(F, base) for F in compat]
    tree = star_monomialize(local, max_depth) if local else AdmissibleTree(signature)
    candidates = []
    for steps, _leaf in iter_branches(tree):
        chain = base.then(steps)
        for completion in _reflection_completions(chain.source):
            full = chain.then(completion)
            candidates.extend((full, Q) for Q in enumerate_quadrants(full.source))
    for chain in _strata(base, tree):
        candidates.extend(_candidates(chain, compat, max_depth))
    return candidates


def _strata(base: TransformChain, tree: AdmissibleTree) -> List[TransformChain]:
    """Chains onto {x_i = x_j = 0} for every blow-up fork of the tree"""
    strata = []

    def _walk(node: AdmissibleTree, prefix: Tuple[ElementaryTransform, ...]):
        if node.is_leaf:
            return
        if node.fork == FORK_BLOWUP:
            t = node.children[0][0]
            first = face_zero(node.signature, max(t.i, t.j))
            second = face_zero(first.source, min(t.i, t.j))
            strata.append(base.then(prefix + (first, second)))
        for t, child in node.children:
            _walk(child, prefix + (t,))

    _walk(tree, ())
    return strata


def _certify(candidate: Tuple[TransformChain, Quadrant], compat: List[GenSeries]):
    chain, Q = candidate
    statuses = [normal_decompose(apply_transform(F, chain)) for F in compat]
    for index, status in enumerate(statuses):
        if isinstance(status, NotNormal):
            raise QmonoError(f"compat function {index} not normal on chart {chain}")
    radius = list(Q.radius)
    for status in statuses + [s for s in critical_statuses(chain) if isinstance(s, NormalDecomposition)]:
        if isinstance(status, Zero):
            continue
        for position, r in _face_radius(status.unit, Q).items():
            radius[position - 1] = min(radius[position - 1], r)
    if radius != list(Q.radius):
        log.debug(f"chart {chain} {Q}: radius shrunk to {[format_rational(r) for r in radius]}")
    chart = Chart(chain, Q.with_radius(radius))
    if not injectivity_certificate(chart):
        return None
    return chart, tuple(sign_on_quadrant(s, chart.domain) for s in statuses)


def build_local_parametrization(target: Union[VariableSignature, BasicSetDescriptor],
                                compat: Sequence[GenSeries] = (), max_depth: int = 64,
                                executor: Optional[Executor] = None) -> List[Tuple[Chart, Tuple[int, ...]]]:
    """Sign-compatible injective charts at 0 of a polydisk or basic set

    Args:
        target: Polydisk signature or basic set descriptor
        compat: Functions that must have constant sign on each chart; a basic
            set appends its equation and inequalities
        max_depth: Depth guard for the monomialization trees
        executor: Optional pool for per-chart certification

    Returns:
        (chart, sign vector) pairs in deterministic order; for a basic set only
        charts with sign(f) = 0 and sign(g_i) = +1
    """
    compat = list(compat)
    descriptor = target if isinstance(target, BasicSetDescriptor) else None
    if descriptor is not None:
        signature = descriptor.signature
        compat = compat + descriptor.series
    else:
        signature = target
    compat = [F.with_signature(signature) for F in compat]

    candidates = _candidates(TransformChain((), signature), compat, max_depth)
    if executor is not None:
        certified = list(executor.map(lambda c: _certify(c, compat), candidates))
    else:
        certified = [_certify(c, compat) for c in candidates]
    charts = [c for c in certified if c is not None]
    log.info(f"parametrization of {signature}: {len(charts)} charts from {len(candidates)} candidates")

    if descriptor is not None:
        charts = select_basic_set(charts, len(compat) - len(descriptor.series))
        log.info(f"basic set retains {len(charts)} charts")
    return charts


def select_basic_set(charts: Sequence[Tuple[Chart, Tuple[int, ...]]],
                     offset: int) -> List[Tuple[Chart, Tuple[int, ...]]]:
    """Charts where the equation at `offset` vanishes and every later inequality is positive"""
    return [
        (chart, signs) for chart, signs in charts
        if signs[offset] == 0 and all(s == 1 for s in signs[offset + 1:])
    ]


# =============================================================================
# Sampling oracles
# =============================================================================

@dataclass
class SignCheck:
    checked: int = 0
    inconclusive: int = 0
    violations: List[Tuple[int, int, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def sign_constancy_check(charts: Sequence[Tuple[Chart, Tuple[int, ...]]], compat: Sequence[GenSeries],
                         samples: int = constants.SIGN_SAMPLES, seed: int = constants.DEFAULT_SEED) -> SignCheck:
    """Compare symbolic chart signs with values at pushed-forward interior samples"""
    rng = np.random.default_rng(seed)
    report = SignCheck()
    for index, (chart, signs) in enumerate(charts):
        points = map_points(chart.chain, chart.domain.sample(rng, samples))
        for f_index, (F, sign) in enumerate(zip(compat, signs)):
            values = F.eval_array(points)
            report.checked += len(values)
            if sign == 0:
                bad = np.abs(values) > constants.ZERO_MARGIN
            else:
                bad = sign * values < -constants.SIGN_MARGIN
                report.inconclusive += int(np.sum(np.abs(values) <= constants.SIGN_MARGIN))
            for value in values[bad][:1]:
                report.violations.append((index, f_index, float(value)))
    if report.violations:
        log.warning(f"sign check: {len(report.violations)} violations")
    return report


def sample_polydisk(signature: VariableSignature, rng: np.random.Generator, count: int,
                    radius: Optional[Sequence[float]] = None) -> np.ndarray:
    if radius is None:
        radius = [float(r) for r in signature.polyradius]
    radius = np.asarray(radius, dtype=float)
    u = rng.uniform(0.0, 1.0, size=(count, signature.size))
    u[:, signature.m:] = 2 * u[:, signature.m:] - 1
    return u * radius


@dataclass
class CoveringReport:
    samples: int
    covered: int
    threshold: float = constants.COVERING_THRESHOLD
    radius: Tuple[float, ...] = ()

    @property
    def fraction(self) -> float:
        return self.covered / self.samples if self.samples else 1.0

    @property
    def passed(self) -> bool:
        return self.fraction >= self.threshold


def covered_radius(charts: Sequence[Chart], signature: VariableSignature) -> np.ndarray:
    """Target box inside every full-dimensional chart image's bounding box

    Chart maps are monomial in the absolute values of their coordinates, so a
    chart's image is bounded by the image of its domain corner.
    """
    bound = np.array([float(r) for r in signature.polyradius])
    for chart in charts:
        if chart.embedding is not None or chart.dimension < signature.size:
            continue
        signs = np.array([SIGN_OF.get(s, 0) for s in chart.domain.selectors], dtype=float)
        corner = np.array([float(r) for r in chart.radius]) * signs
        bound = np.minimum(bound, np.abs(map_points(chart.chain, corner))[0])
    return bound

def covering_check(charts: Sequence[Chart], signature: VariableSignature,
                   samples: int = constants.COVERING_SAMPLES, seed: int = constants.DEFAULT_SEED,
                   threshold: float = constants.COVERING_THRESHOLD) -> CoveringReport:
    """Share of uniform samples of the certified box with a preimage in some chart domain"""
    rng = np.random.default_rng(seed)
    radius = covered_radius(charts, signature)
    X = sample_polydisk(signature, rng, samples, radius)
    covered = np.zeros(samples, dtype=bool)
    for chart in charts:
        if chart.embedding is not None or chart.dimension < signature.size:
            continue
        P, ok = invert_points(chart.chain, X)
        covered |= ok & chart.domain.contains(P)
    report = CoveringReport(samples, int(np.sum(covered)), threshold, tuple(float(r) for r in radius))
    if not report.passed:
        log.warning(f"covering {report.fraction:.4f} below threshold {threshold}")
    return report


def halved_covering_check(signature: VariableSignature, compat: Sequence[GenSeries],
                          max_depth: int = 64, samples: int = constants.COVERING_SAMPLES,
                          seed: int = constants.DEFAULT_SEED) -> CoveringReport:
    """Rebuild at half the target radius and check covering again"""
    halved = signature.with_radius(r / 2 for r in signature.polyradius)
    charts = [chart for chart, _ in build_local_parametrization(halved, compat, max_depth)]
    return covering_check(charts, halved, samples, seed)


# =============================================================================
# Cleared Jacobians
# =============================================================================

def chart_face(chart: Chart) -> Tuple[TransformChain, Quadrant]:
    """Chain dropping the zero-selected variables and the resulting open domain"""
    face = _face_chain(chart.domain.signature, chart.domain.zero_positions)
    free = chart.domain.free_positions
    selectors = tuple(chart.domain.selectors[p - 1] for p in free)
    return face, Quadrant(face.source, selectors)


def chart_map(chart: Chart) -> Tuple[List[GenSeries], Quadrant]:
    """Components of the chart map over its face, with the face domain"""
    face, domain = chart_face(chart)
    full = chart.chain.then(face.steps)
    if chart.embedding is None:
        components = [GenSeries.variable(chart.chain.target, k) for k in range(1, chart.chain.target.size + 1)]
    else:
        components = chart.embedding
    return [apply_transform(E.with_signature(chart.chain.target), full) for E in components], domain


def series_det(M: Sequence[Sequence[GenSeries]], signature: VariableSignature) -> GenSeries:
    size = len(M)
    if size == 0:
        return GenSeries.constant(signature, 1)
    if size == 1:
        return M[0][0]
    total = GenSeries.zero(signature)
    for col in range(size):
        if M[0][col].is_zero:
            continue
        minor = [row[:col] + row[col + 1:] for row in M[1:]]
        term = M[0][col] * series_det(minor, signature)
        total = total + term if col % 2 == 0 else total - term
    return total


def cofactor_transpose(M: Sequence[Sequence[GenSeries]], signature: VariableSignature) -> List[List[GenSeries]]:
    """Adjugate: B with B·M = det(M)·Id"""
    size = len(M)
    if size == 1:
        return [[GenSeries.constant(signature, 1)]]
    B = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            minor = [row[:j] + row[j + 1:] for r, row in enumerate(M) if r != i]
            cofactor = series_det(minor, signature)
            B[j][i] = cofactor if (i + j) % 2 == 0 else -cofactor
    return B


@dataclass
class ClearedJacobian:
    a: GenSeries
    A: List[List[GenSeries]]
    iota: Optional[Tuple[int, ...]] = None
    A_prime: Optional[List[List[GenSeries]]] = None
    B: Optional[List[List[GenSeries]]] = None
    det: Optional[GenSeries] = None
    rank: Optional[int] = None

    def kernel(self) -> List[List[GenSeries]]:
        """Columns b_{l+1}..b_d of B"""
        if self.B is None or self.rank is None:
            raise QmonoError("kernel needs ι and the projected rank")
        d = len(self.B)
        return [[self.B[row][col] for row in range(d)] for col in range(self.rank, d)]


def cleared_jacobian(eta: Sequence[GenSeries], iota: Optional[Sequence[int]] = None,
                     rank: Optional[int] = None) -> ClearedJacobian:
    """a = x_1…x_d, A = a·dη and, given ι, A′ = rows ι of A and B = adj(A′)

    Entries are assembled exactly as (x_j ∂_j η_i)·(a/x_j).
    """
    signature = eta[0].signature
    d = signature.size
    a = GenSeries.monomial(signature, [1] * d)
    cofactors = [GenSeries.monomial(signature, [0 if k == j else 1 for k in range(d)]) for j in range(d)]
    A = [[log_derivative(F, j + 1) * cofactors[j] for j in range(d)] for F in eta]
    result = ClearedJacobian(a, A, rank=rank)
    if iota is not None:
        iota = tuple(iota)
        if len(iota) != d or list(iota) != sorted(set(iota)):
            raise QmonoError(f"ι must be strictly increasing of length {d}, got {iota}")
        result.iota = iota
        result.A_prime = [A[i - 1] for i in iota]
        result.B = cofactor_transpose(result.A_prime, signature) if d else []
        result.det = series_det(result.A_prime, signature)
    return result


def eval_matrix(M: Sequence[Sequence[GenSeries]], point: Sequence[float]) -> np.ndarray:
    return np.array([[F.eval_numeric(point, check_domain=False) for F in row] for row in M], dtype=float)


def numeric_jacobian(eta: Sequence[GenSeries], point: Sequence[float]) -> np.ndarray:
    return np.array([eval_gradient(F, point) for F in eta])


def finite_difference_jacobian(eta: Sequence[GenSeries], point: Sequence[float],
                               step: float = constants.FD_STEP_GEOMETRY) -> np.ndarray:
    point = np.asarray(point, dtype=float)
    J = np.zeros((len(eta), point.size))
    for k in range(point.size):
        h = step * max(1.0, abs(point[k]))
        up, down = point.copy(), point.copy()
        up[k] += h
        down[k] -= h
        J[:, k] = [(F.eval_numeric(up, False) - F.eval_numeric(down, False)) / (2 * h) for F in eta]
    return J


def find_iota(J: np.ndarray, m_split: int, rank: int) -> Optional[Tuple[int, ...]]:
    """Greedy strictly increasing ι: `rank` rows among the first m_split, the rest after"""
    d = J.shape[1]
    chosen: List[int] = []
    for pool, goal in ((range(m_split), rank), (range(m_split, J.shape[0]), d)):
        for row in pool:
            if len(chosen) >= goal:
                break
            if numeric_rank(J[chosen + [row]]) == len(chosen) + 1:
                chosen.append(row)
        if len(chosen) != goal:
            return None
    return tuple(r + 1 for r in chosen)


# =============================================================================
# Rank refinement
# =============================================================================

@dataclass
class RankedChart:
    chart: Chart
    rank: int
    iota: Optional[Tuple[int, ...]]


def _minors(rows: Sequence[Sequence[GenSeries]], size: int, signature: VariableSignature) -> List[GenSeries]:
    d = len(rows[0]) if rows else 0
    result = []
    for rsel in itertools.combinations(range(len(rows)), size):
        for csel in itertools.combinations(range(d), size):
            det = series_det([[rows[r][c] for c in csel] for r in rsel], signature)
            if not det.is_zero:
                result.append(det)
    return result


def _profile(chart: Chart, m_split: int, samples: int, rng: np.random.Generator) -> RankedChart:
    eta, domain = chart_map(chart)
    d = domain.signature.size
    if d == 0:
        return RankedChart(chart, 0, ())
    points = domain.sample(rng, samples)
    ranks, iota = set(), None
    for point in points:
        J = numeric_jacobian(eta, point)
        ranks.add(numeric_rank(J[:m_split]))
    if len(ranks) != 1:
        raise RankInstability(f"ranks {sorted(ranks)} on chart {chart.chain} {chart.domain}")
    rank = ranks.pop()
    candidates = set()
    for point in points:
        candidates.add(find_iota(numeric_jacobian(eta, point), m_split, rank))
    if len(candidates) == 1:
        iota = candidates.pop()
    return RankedChart(chart, rank, iota)


def refine_by_rank(charts: Sequence[Chart], m_split: int, max_depth: int = 64,
                   samples: int = 32, seed: int = constants.DEFAULT_SEED) -> List[RankedChart]:
    """Subdivide charts until the first m_split coordinates have constant rank

    The maximal nonvanishing minors of the cleared projected Jacobian are
    used as compatibility functions on each chart's face; sub-charts where
    all of them vanish are lower dimensional and refined again.
    """
    rng = np.random.default_rng(seed)
    result: List[RankedChart] = []

    def _refine(chart: Chart, depth: int):
        eta, domain = chart_map(chart)
        d = domain.signature.size
        if d == 0:
            result.append(RankedChart(chart, 0, ()))
            return
        top = cleared_jacobian(eta).A[:m_split]
        generic, minors = 0, []
        for size in range(min(m_split, d), 0, -1):
            minors = _minors(top, size, domain.signature)
            if minors:
                generic = size
                break
        if generic == 0:
            result.append(_profile(chart, m_split, samples, rng))
            return
        if depth >= max_depth:
            raise RankInstability(f"rank refinement exceeded depth {max_depth}")
        face, _ = chart_face(chart)
        prefix = chart.chain.then(face.steps)
        for sub, signs in build_local_parametrization(domain.signature, minors, max_depth):
            coords = [normal_decompose(apply_transform(GenSeries.variable(domain.signature, p), sub.chain))
                      for p in range(1, d + 1)]
            inside = True
            for p, status in enumerate(coords):
                expected = SIGN_OF[domain.selectors[p]]
                if sign_on_quadrant(status, sub.domain) != expected:
                    inside = False
                    break
            if not inside:
                continue
            composed = Chart(prefix.then(sub.chain.steps), sub.domain, chart.embedding)
            if any(s != 0 for s in signs):
                result.append(_profile(composed, m_split, samples, rng))
            else:
                _refine(composed, depth + 1)

    for chart in charts:
        _refine(chart, 0)
    log.info(f"rank refinement: {len(charts)} charts -> {len(result)}")
    return result

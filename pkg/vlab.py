#!/usr/bin/env python3
"""
Piecewise-polynomial laboratory for the space of functions on (-1, 1)
that are C^i at the i-th marked point a_i and smooth elsewhere, with
one-sided derivative limits at every marked point.

Elements are stored as one polynomial per interval [b_{i-1}, b_i) of the
sorted marked points. Elements of W keep each piece in the scaled
variable of its interval (numpy domain/window onto [-1, 1]), which keeps
the jet functionals well conditioned on short intervals. Jet tuples follow a fixed canonical order:

    f^(q)(x_i)            i = 1..n, q = 0..p
    f^(q)(a_i)            i = 0..k, q = 0..i
    f^(q)(a_i-), (a_i+)   i = 0..k, q = i+1..p
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from numpy.polynomial import Polynomial

import constants
from common import QmonoError, numeric_rank
from logger import get_logger

log = get_logger(__name__)


class VlabError(QmonoError):
    """Invalid breakpoint system, element or jet request"""


# =============================================================================
# Marked points
# =============================================================================

def dyadic_sequence(count: int) -> List[Fraction]:
    """First `count` dyadic rationals of (-1, 1), by denominator then numerator"""
    points = [Fraction(0)]
    level = 1
    while len(points) < count:
        den = 2 ** level
        points.extend(Fraction(num, den) for num in range(-den + 1, den, 2))
        level += 1
    return points[:count]


def is_dyadic(x: Fraction) -> bool:
    x = Fraction(x)
    den = x.denominator
    return -1 < x < 1 and den & (den - 1) == 0


@dataclass(frozen=True)
class BreakpointSystem:
    """Marked points a_0..a_k and their sorted view b_0 < ... < b_k"""
    points: Tuple[Fraction, ...]

    def __post_init__(self):
        points = tuple(Fraction(a) for a in self.points)
        object.__setattr__(self, 'points', points)
        if len(set(points)) != len(points):
            raise VlabError("marked points must be distinct")
        if any(not -1 < a < 1 for a in points):
            raise VlabError("marked points must lie in (-1, 1)")

    @classmethod
    def dyadic(cls, k: int) -> 'BreakpointSystem':
        return cls(tuple(dyadic_sequence(k + 1)))

    @property
    def k(self) -> int:
        return len(self.points) - 1

    @property
    def sorted_points(self) -> Tuple[Fraction, ...]:
        return tuple(sorted(self.points))

    @property
    def intervals(self) -> List[Tuple[Fraction, Fraction]]:
        """[b_{i-1}, b_i) for i = 0..k+1, with b_{-1} = -1 and b_{k+1} = 1"""
        edges = (Fraction(-1),) + self.sorted_points + (Fraction(1),)
        return list(zip(edges[:-1], edges[1:]))

    def piece_index(self, x: float, side: int = 1) -> int:
        """Interval holding x, or the one on the given side of a marked point"""
        b = [float(v) for v in self.sorted_points]
        index = int(np.searchsorted(b, x, side='right'))
        if side < 0 and index > 0 and x == b[index - 1]:
            index -= 1
        return index

    def is_marked(self, x: float, clearance: float = 0.0) -> bool:
        return any(abs(float(a) - x) <= clearance for a in self.points)


# =============================================================================
# Elements
# =============================================================================

@dataclass
class VElement:
    breakpoints: BreakpointSystem
    pieces: List[Polynomial]

    def __post_init__(self):
        if len(self.pieces) != self.breakpoints.k + 2:
            raise VlabError(f"expected {self.breakpoints.k + 2} pieces, got {len(self.pieces)}")
        self.pieces = [p if isinstance(p, Polynomial) else Polynomial(p) for p in self.pieces]

    @classmethod
    def from_vector(cls, breakpoints: BreakpointSystem, vector: Sequence[float], degree: int) -> 'VElement':
        vector = np.asarray(vector, dtype=float)
        size = degree + 1
        if vector.size != size * (breakpoints.k + 2):
            raise VlabError(f"coefficient vector has {vector.size} entries, expected {size * (breakpoints.k + 2)}")
        return cls(breakpoints, [
            Polynomial(vector[i * size:(i + 1) * size], domain=[float(lo), float(hi)])
            for i, (lo, hi) in enumerate(breakpoints.intervals)
        ])

    @classmethod
    def polynomial(cls, breakpoints: BreakpointSystem, coefficients: Sequence[float]) -> 'VElement':
        """One global polynomial on every interval"""
        return cls(breakpoints, [Polynomial(coefficients) for _ in range(breakpoints.k + 2)])

    def derivative(self, x: float, q: int = 0, side: int = 1) -> float:
        return float(self.pieces[self.breakpoints.piece_index(x, side)].deriv(q)(x))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        b = np.array([float(v) for v in self.breakpoints.sorted_points])
        index = np.searchsorted(b, flat, side='right')
        out = np.zeros_like(flat)
        for i, piece in enumerate(self.pieces):
            mask = index == i
            out[mask] = piece(flat[mask])
        return out.reshape(x.shape)

    def __add__(self, other: 'VElement') -> 'VElement':
        if other.breakpoints != self.breakpoints:
            raise VlabError("elements live on different breakpoint systems")
        return VElement(self.breakpoints, [_add_pieces(a, b) for a, b in zip(self.pieces, other.pieces)])

    def scale(self, c: float) -> 'VElement':
        return VElement(self.breakpoints, [p * c for p in self.pieces])

    def violations(self, tol: float = constants.DEFAULT_TOL) -> List[Tuple[int, int, float]]:
        """(i, q, jump) for each failed matching f^(q)(a_i-) = f^(q)(a_i+), q <= i"""
        found = []
        for i, a in enumerate(self.breakpoints.points):
            x = float(a)
            left = self.breakpoints.piece_index(x, -1)
            right = self.breakpoints.piece_index(x, 1)
            for q in range(i + 1):
                jump = float(self.pieces[right].deriv(q)(x) - self.pieces[left].deriv(q)(x))
                if abs(jump) > tol * (1 + abs(float(self.pieces[right].deriv(q)(x)))):
                    found.append((i, q, jump))
        return found


def _add_pieces(a: Polynomial, b: Polynomial) -> Polynomial:
    """Sum in b's domain and window"""
    return a.convert(domain=b.domain, window=b.window) + b


def one_sided_jet(f: VElement, a: float, p: int, side: int) -> List[float]:
    """Derivatives 0..p at a of the piece adjacent on the given side"""
    if not -1 < float(a) < 1:
        raise VlabError(f"point {a} outside (-1, 1)")
    piece = f.pieces[f.breakpoints.piece_index(float(a), side)]
    return [float(piece.deriv(q)(float(a))) for q in range(p + 1)]


def _max_abs(poly: Polynomial, lo: float, hi: float) -> float:
    candidates = [lo, hi]
    if poly.degree() >= 2 and hi > lo:
        for root in poly.deriv().roots():
            if abs(root.imag) < 1e-12 and lo < root.real < hi:
                candidates.append(root.real)
    return max(abs(float(poly(x))) for x in candidates)


def seminorm(f: VElement, K: Tuple[float, float], p: int) -> float:
    """sup |f^(q)| over K off the marked points, q <= p"""
    lo, hi = float(K[0]), float(K[1])
    if not -1 < lo <= hi < 1:
        raise VlabError(f"K = [{lo}, {hi}] must be a closed interval inside (-1, 1)")
    if lo == hi and f.breakpoints.is_marked(lo):
        return 0.0
    best = 0.0
    for (left, right), piece in zip(f.breakpoints.intervals, f.pieces):
        a, b = max(lo, float(left)), min(hi, float(right))
        if a > b:
            continue
        for q in range(p + 1):
            best = max(best, _max_abs(piece.deriv(q), a, b))
    return best


# =============================================================================
# The perturbation space W
# =============================================================================

def _unit_rows(M: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(M, axis=1, keepdims=True)
    return M / np.where(norms > 0, norms, 1.0)


def default_degree(n: int, p: int) -> int:
    return (n + 2) * (p + 1) - 1


def scaled_monomial_derivatives(interval: Tuple, x, q: int, size: int) -> List:
    """d^q/dx^q of t^j, j < size, for t the interval mapped onto [-1, 1]

    Exact for Fraction arguments.
    """
    lo, hi = interval
    half = (hi - lo) / 2
    t = (x - (lo + hi) / 2) / half
    return [0 if j < q else math.perm(j, q) * t ** (j - q) / half ** q for j in range(size)]


def constraint_matrix(breakpoints: BreakpointSystem, degree: int) -> np.ndarray:
    """Rows f^(q)(a_i+) - f^(q)(a_i-) = 0 for q <= i, exact then cast to float"""
    size = degree + 1
    intervals = breakpoints.intervals
    rows = []
    for i, a in enumerate(breakpoints.points):
        right = breakpoints.piece_index(float(a), 1)
        left = right - 1
        for q in range(i + 1):
            row = [Fraction(0)] * (size * (breakpoints.k + 2))
            for j, value in enumerate(scaled_monomial_derivatives(intervals[right], a, q, size)):
                row[right * size + j] += value
            for j, value in enumerate(scaled_monomial_derivatives(intervals[left], a, q, size)):
                row[left * size + j] -= value
            rows.append(row)
    return np.array([[float(v) for v in row] for row in rows], dtype=float).reshape(len(rows), -1)


@dataclass
class WBasis:
    breakpoints: BreakpointSystem
    degree: int
    basis: np.ndarray
    constraints: np.ndarray
    rank: int

    @property
    def codimension(self) -> int:
        return self.constraints.shape[0]

    @property
    def deficient(self) -> bool:
        return self.rank < self.codimension

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def element(self, coords: Sequence[float]) -> VElement:
        return VElement.from_vector(self.breakpoints, self.basis @ np.asarray(coords, dtype=float), self.degree)


def w_basis(breakpoints: BreakpointSystem, degree: int) -> WBasis:
    """Null-space basis of the matching constraints and their rank"""
    C = constraint_matrix(breakpoints, degree)
    total = (degree + 1) * (breakpoints.k + 2)
    if C.shape[0] == 0:
        return WBasis(breakpoints, degree, np.eye(total), C, 0)
    C = _unit_rows(C)
    rank = numeric_rank(C)
    _, _, vt = np.linalg.svd(C)
    basis = vt[rank:].T
    result = WBasis(breakpoints, degree, basis, C, rank)
    if result.deficient:
        log.warning(f"degree {degree} too low: constraint rank {rank} < {result.codimension}")
    return result


def random_w_element(basis: WBasis, rng: np.random.Generator, scale: float = 1.0) -> Tuple[np.ndarray, VElement]:
    coords = rng.normal(0.0, scale, size=basis.dimension)
    return coords, basis.element(coords)


# =============================================================================
# Jets
# =============================================================================

def jet_length(n: int, p: int, k: int) -> int:
    return n * (p + 1) + (k + 1) * (k + 2) // 2 + 2 * sum(p - i for i in range(k + 1))


def submersion_dimension(n: int, p: int, k: int) -> int:
    """l = n(p+2) + 2(k+1)(p+1) - (k+1)(k+2)/2"""
    return n * (p + 2) + 2 * (k + 1) * (p + 1) - (k + 1) * (k + 2) // 2


def transcendence_tuple_length(n: int, p: int, k: int) -> int:
    """|(x, a_0..a_k, jet)| = n(p+2) + (k+1)(2p+3) - (k+1)(k+2)/2"""
    return n * (p + 2) + (k + 1) * (2 * p + 3) - (k + 1) * (k + 2) // 2


def jet_labels(n: int, p: int, k: int) -> List[str]:
    labels = [f"f^({q})(x{i})" for i in range(1, n + 1) for q in range(p + 1)]
    labels += [f"f^({q})(a{i})" for i in range(k + 1) for q in range(i + 1)]
    labels += [f"f^({q})(a{i}{s})" for i in range(k + 1) for q in range(i + 1, p + 1) for s in '-+']
    return labels


@dataclass
class JetTuple:
    values: np.ndarray
    n: int
    p: int
    k: int
    labels: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.values.size)


def _check_jet_request(f: VElement, x: Sequence[float], n: int, p: int, k: int):
    if p < k:
        raise VlabError(f"jets need p >= k, got p={p}, k={k}")
    if len(x) != n:
        raise VlabError(f"expected {n} points, got {len(x)}")
    if f.breakpoints.k < k:
        raise VlabError(f"element has {f.breakpoints.k + 1} marked points, jet needs {k + 1}")
    if len(set(float(v) for v in x)) != len(x):
        raise VlabError("jet points must be distinct")
    for v in x:
        if not -1 < float(v) < 1:
            raise VlabError(f"jet point {v} outside (-1, 1)")
        if f.breakpoints.is_marked(float(v)):
            raise VlabError(f"jet point {v} is a marked point")


def jet_tuple(f: VElement, x: Sequence[float], n: int, p: int, k: int) -> JetTuple:
    """j_n^{p,k} f(x) in canonical order"""
    _check_jet_request(f, x, n, p, k)
    values: List[float] = []
    for xi in x:
        values.extend(one_sided_jet(f, float(xi), p, 1))
    marked = f.breakpoints.points[:k + 1]
    for i, a in enumerate(marked):
        values.extend(one_sided_jet(f, float(a), i, 1))
    for i, a in enumerate(marked):
        left = one_sided_jet(f, float(a), p, -1)
        right = one_sided_jet(f, float(a), p, 1)
        for q in range(i + 1, p + 1):
            values.extend([left[q], right[q]])
    return JetTuple(np.array(values), n, p, k, jet_labels(n, p, k))


# =============================================================================
# Submersion gradients
# =============================================================================

def _phi_vector(f: VElement, basis: WBasis, x: np.ndarray, coords: np.ndarray, n: int, p: int, k: int) -> np.ndarray:
    g = _padded_sum(f, basis.element(coords))
    return np.concatenate([x, jet_tuple(g, list(x), n, p, k).values])


def _padded_sum(f: VElement, h: VElement) -> VElement:
    return VElement(f.breakpoints, [_add_pieces(a, b) for a, b in zip(f.pieces, h.pieces)])


def _functional(breakpoints: BreakpointSystem, degree: int, x: float, q: int, side: int) -> np.ndarray:
    """Row vector δ -> h_δ^(q)(x) on the full coefficient space"""
    size = degree + 1
    row = np.zeros(size * (breakpoints.k + 2))
    piece = breakpoints.piece_index(x, side)
    lo, hi = breakpoints.intervals[piece]
    row[piece * size:(piece + 1) * size] = scaled_monomial_derivatives((float(lo), float(hi)), x, q, size)
    return row


@dataclass
class PhiJacobian:
    matrix: np.ndarray
    finite_difference: np.ndarray
    max_relative_error: float
    rank: int
    expected_rank: int

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= constants.JACOBIAN_RTOL and self.rank == self.expected_rank


def phi_jacobian(f: VElement, coords: Sequence[float], x: Sequence[float], n: int, p: int, k: int,
                 degree: Optional[int] = None, basis: Optional[WBasis] = None) -> PhiJacobian:
    """Closed-form Jacobian of (x, ε) -> (x, j(f + h_ε)(x)) with a finite-difference check

    Args:
        f: Base element, on the same marked points as W
        coords: Coordinates of ε in the W basis
        x: n distinct unmarked points
        degree: Piece degree of h_ε, default (n+2)(p+1)-1
        basis: Precomputed W basis

    Returns:
        Closed-form matrix, central-difference matrix, relative error and rank
    """
    degree = default_degree(n, p) if degree is None else degree
    basis = basis if basis is not None else w_basis(f.breakpoints, degree)
    coords = np.asarray(coords, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_jet_request(f, list(x), n, p, k)
    g = _padded_sum(f, basis.element(coords))

    rows = []
    for i in range(n):
        row = np.zeros(n + basis.dimension)
        row[i] = 1.0
        rows.append(row)
    for i in range(n):
        for q in range(p + 1):
            row = np.zeros(n + basis.dimension)
            row[i] = g.derivative(float(x[i]), q + 1)
            row[n:] = _functional(f.breakpoints, degree, float(x[i]), q, 1) @ basis.basis
            rows.append(row)
    marked = [float(a) for a in f.breakpoints.points[:k + 1]]
    for i, a in enumerate(marked):
        for q in range(i + 1):
            row = np.zeros(n + basis.dimension)
            row[n:] = _functional(f.breakpoints, degree, a, q, 1) @ basis.basis
            rows.append(row)
    for i, a in enumerate(marked):
        for q in range(i + 1, p + 1):
            for side in (-1, 1):
                row = np.zeros(n + basis.dimension)
                row[n:] = _functional(f.breakpoints, degree, a, q, side) @ basis.basis
                rows.append(row)
    J = np.array(rows)

    step = constants.FD_STEP_VLAB
    fd = np.zeros_like(J)
    variables = np.concatenate([x, coords])
    for col in range(variables.size):
        up, down = variables.copy(), variables.copy()
        up[col] += step
        down[col] -= step
        fd[:, col] = (_phi_vector(f, basis, up[:n], up[n:], n, p, k)
                      - _phi_vector(f, basis, down[:n], down[n:], n, p, k)) / (2 * step)
    error = float(np.max(np.abs(J - fd))) / max(1.0, float(np.max(np.abs(J))))
    return PhiJacobian(J, fd, error, numeric_rank(_unit_rows(J)), submersion_dimension(n, p, k))


# =============================================================================
# Avoidance of algebraic sets
# =============================================================================

def jet_symbols(n: int, p: int, k: int) -> List[sympy.Symbol]:
    """Coordinates z1..zl of (x, jet)"""
    return list(sympy.symbols(f"z1:{submersion_dimension(n, p, k) + 1}"))


def parse_polynomials(texts: Sequence[str], n: int, p: int, k: int) -> List[sympy.Expr]:
    symbols = {str(s): s for s in jet_symbols(n, p, k)}
    polys = []
    for text in texts:
        try:
            expr = sympy.sympify(text, locals=symbols)
        except (sympy.SympifyError, SyntaxError) as e:
            raise VlabError(f"cannot parse polynomial '{text}': {e}") from None
        unknown = {str(s) for s in expr.free_symbols} - set(symbols)
        if unknown:
            raise VlabError(f"unknown coordinates {sorted(unknown)} in '{text}'")
        polys.append(expr)
    return polys


def grid_points(breakpoints: BreakpointSystem, grid: int) -> List[float]:
    """Interior grid of (-1, 1) away from the marked points"""
    points = np.linspace(-1.0, 1.0, grid + 2)[1:-1]
    return [float(v) for v in points if not breakpoints.is_marked(float(v), constants.BREAKPOINT_CLEARANCE)]


def avoidance_check(f: VElement, polys: Sequence, n: int, p: int, k: int,
                    grid: int = constants.DEFAULT_GRID, tol: float = constants.DEFAULT_TOL) -> List[Tuple[float, ...]]:
    """Grid tuples x where (x, j(f)(x)) lies on the common zero set of `polys`"""
    symbols = jet_symbols(n, p, k)
    exprs = parse_polynomials(polys, n, p, k) if polys and isinstance(polys[0], str) else list(polys)
    evaluators = [sympy.lambdify(symbols, e, modules='numpy') for e in exprs]
    violations = []
    for x in itertools.permutations(grid_points(f.breakpoints, grid), n):
        z = np.concatenate([np.array(x), jet_tuple(f, list(x), n, p, k).values])
        if all(abs(float(ev(*z))) <= tol for ev in evaluators):
            violations.append(tuple(x))
    if violations:
        log.info(f"avoidance: {len(violations)} grid points on the algebraic set")
    return violations


# =============================================================================
# Germs and rescaling
# =============================================================================

def glue_germ(f: VElement, a: float, order: int, side: int = 1) -> VElement:
    """Germ at 0 of y -> f(a + y) on one side, Taylor polynomial of that side's jet on the other"""
    a = float(a)
    piece = f.pieces[f.breakpoints.piece_index(a, side)]
    shifted = piece(Polynomial([a, 1.0]))
    jet = one_sided_jet(f, a, order, side)
    factorial = np.cumprod([1.0] + list(range(1, order + 1)))
    taylor = Polynomial(np.array(jet) / factorial)
    system = BreakpointSystem((Fraction(0),))
    pieces = [taylor, shifted] if side > 0 else [shifted, taylor]
    return VElement(system, pieces)


def phi(x):
    """φ(x) = x / sqrt(1 + x²), a diffeomorphism R -> (-1, 1)"""
    x = np.asarray(x, dtype=float)
    return x / np.sqrt(1.0 + x * x)


def rescaled_evaluator(f: VElement) -> Callable:
    return lambda x: f(phi(x))

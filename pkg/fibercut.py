#!/usr/bin/env python3
"""
Fiber-cutting equations and their numeric verification

For a map η of constant projected rank l < d on an open quadrant, the
critical set of Φ(x, r') = Π x_i (r'_i - x_i) along the kernel of the
projected differential meets every fiber of η inside the box (0, r').
The system a_i = ∇_x Φ · b_i lives on the doubled variables (x, r').
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy

import constants
from common import QmonoError
from exponents import VariableSignature
from geometry import Chart, chart_map, cleared_jacobian, cofactor_transpose, series_det
from logger import get_logger
from series import GenSeries, derivative, embed, eval_gradient

log = get_logger(__name__)


class FiberCutError(QmonoError):
    """Fiber cutting preconditions not met"""


@dataclass
class FiberCutSystem:
    eta: List[GenSeries]
    rank: int
    rows: Tuple[int, ...]
    kernel: List[List[GenSeries]]
    phi: GenSeries
    equations: List[GenSeries]
    witness: Optional[GenSeries] = None
    iota: Optional[Tuple[int, ...]] = None

    @property
    def d(self) -> int:
        return self.eta[0].signature.size if self.eta else len(self.kernel[0])


def doubled_signature(signature: VariableSignature) -> VariableSignature:
    """Variables (x_1..x_d, r'_1..r'_d), all generalized"""
    radius = tuple(signature.polyradius) * 2
    return VariableSignature(2 * signature.size, 0, radius)


def phi_series(signature: VariableSignature) -> GenSeries:
    """Φ(x, r') = Π x_i (r'_i - x_i)"""
    d = signature.size
    doubled = doubled_signature(signature)
    phi = GenSeries.constant(doubled, 1)
    for i in range(1, d + 1):
        x = GenSeries.variable(doubled, i)
        r = GenSeries.variable(doubled, d + i)
        phi = phi * x * (r - x)
    return phi


def fiber_cut_equations(kernel: Sequence[Sequence[GenSeries]],
                        signature: VariableSignature) -> Tuple[GenSeries, List[GenSeries]]:
    """Φ and the equations ∇_x Φ · b_i for each kernel column b_i"""
    if not kernel:
        raise FiberCutError("missing kernel basis")
    d = signature.size
    doubled = doubled_signature(signature)
    phi = phi_series(signature)
    gradient = [derivative(phi, k) for k in range(1, d + 1)]
    positions = list(range(1, d + 1))
    equations = []
    for column in kernel:
        if len(column) != d:
            raise FiberCutError(f"kernel column has {len(column)} entries, expected {d}")
        total = GenSeries.zero(doubled)
        for g, b in zip(gradient, column):
            total = total + g * embed(b.with_signature(signature), doubled, positions)
        equations.append(total)
    return phi, equations


def _adjugate_kernel(top: List[List[GenSeries]], rank: int, signature: VariableSignature):
    """Kernel columns from the first nonvanishing rank×rank minor of `top`"""
    d = signature.size
    for rows in itertools.combinations(range(len(top)), rank):
        for cols in itertools.combinations(range(d), rank):
            M = [[top[r][c] for c in cols] for r in rows]
            det = series_det(M, signature)
            if det.is_zero:
                continue
            adj = cofactor_transpose(M, signature) if rank else []
            kernel = []
            for c in range(d):
                if c in cols:
                    continue
                v = [GenSeries.zero(signature) for _ in range(d)]
                v[c] = det
                for k, col in enumerate(cols):
                    acc = GenSeries.zero(signature)
                    for q, r in enumerate(rows):
                        acc = acc + adj[k][q] * top[r][c]
                    v[col] = -acc
                kernel.append(v)
            return tuple(r + 1 for r in rows), kernel
    raise FiberCutError(f"no nonvanishing {rank}x{rank} minor")


def build_fiber_cut(eta: Sequence[GenSeries], m_split: int, rank: int,
                    iota: Optional[Sequence[int]] = None) -> FiberCutSystem:
    """Fiber-cutting system for η with projected rank `rank`

    With an immersion witness ι the kernel is read off the adjugate of A′
    (columns b_{l+1}..b_d); otherwise it is built from a maximal
    nonvanishing minor of the cleared projected Jacobian. The witness is
    ρ_{ι(l+1)}, the component of η that ι places after the rank rows; without
    ι it is the first component past m_split, when η has one.
    """
    eta = list(eta)
    signature = eta[0].signature
    d = signature.size
    if rank >= d:
        raise FiberCutError(f"rank {rank} equals dimension {d}: no cutting needed")
    if iota is not None:
        cj = cleared_jacobian(eta, iota, rank)
        kernel = cj.kernel()
        rows = tuple(iota[:rank])
        iota = tuple(iota)
    else:
        top = cleared_jacobian(eta).A[:m_split]
        rows, kernel = _adjugate_kernel(top, rank, signature)
        iota = rows + ((m_split + 1,) if len(eta) > m_split else ())
    witness = eta[iota[rank] - 1] if rank < len(iota) else None
    phi, equations = fiber_cut_equations(kernel, signature)
    log.debug(f"fiber cut: d={d} l={rank} rows={rows}, {len(equations)} equations")
    return FiberCutSystem(eta[:m_split], rank, rows, kernel, phi, equations, witness, iota)


def chart_fiber_cut(chart: Chart, m_split: int, rank: int,
                    iota: Optional[Sequence[int]] = None) -> FiberCutSystem:
    eta, _ = chart_map(chart)
    return build_fiber_cut(eta, m_split, rank, iota)


# =============================================================================
# Verification
# =============================================================================

@dataclass
class FiberCutReport:
    samples: int = 0
    converged: int = 0
    max_discrepancy: float = 0.0
    witness_margin: Optional[float] = None
    failures: List[Tuple[float, ...]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.witness_margin is not None and self.witness_margin <= constants.FIBER_TOL:
            return False
        return self.converged == self.samples and self.max_discrepancy <= constants.FIBER_TOL


def _residual(system: FiberCutSystem, x: np.ndarray, rprime: np.ndarray, target: np.ndarray) -> np.ndarray:
    xr = np.concatenate([x, rprime])
    values = [F.eval_numeric(x, check_domain=False) for F in (system.eta[r - 1] for r in system.rows)]
    values = np.array(values, dtype=float) - target
    cuts = np.array([E.eval_numeric(xr, check_domain=False) for E in system.equations])
    return np.concatenate([values, cuts])


def _jacobian(system: FiberCutSystem, x: np.ndarray, rprime: np.ndarray) -> np.ndarray:
    xr = np.concatenate([x, rprime])
    rows = [eval_gradient(system.eta[r - 1], x) for r in system.rows]
    rows += [eval_gradient(E, xr)[:x.size] for E in system.equations]
    return np.array(rows, dtype=float)


def newton_solve(system: FiberCutSystem, seed_point: np.ndarray, rprime: np.ndarray,
                 target: np.ndarray) -> Optional[np.ndarray]:
    """Damped Newton iteration kept inside the open box (0, r')"""
    x = np.array(seed_point, dtype=float)
    scale = 1.0 + float(np.max(np.abs(target))) if target.size else 1.0
    for _ in range(constants.NEWTON_MAX_ITER):
        G = _residual(system, x, rprime, target)
        norm = float(np.max(np.abs(G))) if G.size else 0.0
        if norm <= constants.NEWTON_RESIDUAL * scale:
            return x
        try:
            step = np.linalg.lstsq(_jacobian(system, x, rprime), -G, rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-8:
            trial = x + t * step
            if np.all(trial > 0) and np.all(trial < rprime):
                trial_G = _residual(system, trial, rprime, target)
                if np.max(np.abs(trial_G)) < norm:
                    x = trial
                    break
            t /= 2
        else:
            return None
    G = _residual(system, x, rprime, target)
    return x if np.max(np.abs(G)) <= constants.FIBER_TOL * scale else None


def verify_fiber_cut(system: FiberCutSystem, rprime: Sequence, samples: int = 100,
                     seed: int = constants.DEFAULT_SEED) -> FiberCutReport:
    """Solve the fiber system above sampled image values and compare images

    Non-convergence is recorded in the report, not raised.
    """
    rng = np.random.default_rng(seed)
    rprime = np.array([float(r) for r in rprime], dtype=float)
    d = rprime.size
    report = FiberCutReport(samples=samples)
    margins = []
    for _ in range(samples):
        x0 = rprime * rng.uniform(constants.INTERIOR_LOW, constants.INTERIOR_HIGH, size=d)
        image = np.array([F.eval_numeric(x0, check_domain=False) for F in system.eta])
        target = np.array([image[r - 1] for r in system.rows])
        seeds = [x0] + [rprime * rng.uniform(0.05, 0.95, size=d) for _ in range(constants.NEWTON_SEEDS)]
        solution = None
        for s in seeds:
            solution = newton_solve(system, s, rprime, target)
            if solution is not None:
                break
        if solution is None:
            report.failures.append(tuple(float(v) for v in x0))
            continue
        report.converged += 1
        found = np.array([F.eval_numeric(solution, check_domain=False) for F in system.eta])
        scale = 1.0 + float(np.max(np.abs(image)))
        report.max_discrepancy = max(report.max_discrepancy, float(np.max(np.abs(found - image))) / scale)
        if system.witness is not None:
            grad = eval_gradient(system.witness, x0)
            margins.append(max(
                abs(float(np.dot(grad, [b.eval_numeric(x0, check_domain=False) for b in column])))
                for column in system.kernel
            ))
    if margins:
        report.witness_margin = min(margins)
    if report.failures:
        log.warning(f"fiber cut: {len(report.failures)} of {samples} fibers without a converged critical point")
    log.info(f"fiber cut: max discrepancy {report.max_discrepancy:.3e}")
    return report


def exact_critical_points(system: FiberCutSystem, rprime: Sequence) -> List[Fraction]:
    """Exact critical set in (0, r') for one-dimensional integer-exponent systems"""
    if system.d != 1 or len(system.equations) != 1:
        raise FiberCutError("exact solving is limited to one variable")
    r = Fraction(rprime[0])
    x = sympy.Symbol('x')
    r_sym = sympy.Rational(r.numerator, r.denominator)
    expr = 0
    for e, c in system.equations[0].items():
        if any(v.denominator != 1 for v in e):
            raise FiberCutError("exact solving needs integer exponents")
        expr += sympy.Rational(c.numerator, c.denominator) * x ** int(e[0]) * r_sym ** int(e[1])
    roots = []
    for root in sympy.Poly(expr, x).real_roots():
        if 0 < root < r_sym:
            if not root.is_Rational:
                raise FiberCutError(f"irrational critical point {root}")
            roots.append(Fraction(int(root.p), int(root.q)))
    return sorted(set(roots))

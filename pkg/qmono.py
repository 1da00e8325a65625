#!/usr/bin/env python3
"""
qmono - monomialization, parametrization and fiber cutting of generalized
power series, plus the piecewise-polynomial jet laboratory

Usage:
    qmono normalize --input f.gps [--star] [--tree f.qtree]
    qmono verify --tree f.qtree --input f.gps
    qmono signs --input f.gps [--input g.gps ...]
    qmono parametrize [--input g.gps ...] [--equation f.gps --inequality g.gps ...]
    qmono fibercut --input eta1.gps [...] --split 1 [--rprime "1 1"]
    qmono vlab {jet|wbasis|gradcheck|avoid} --n 1 --p 2 --k 0

Every report starts with the tool version and the resolved configuration
and is byte-identical across runs with the same inputs and seed.
"""

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import constants
from common import QmonoError, format_rational, format_real, format_sign, format_vector, plural
from config import ConfigError, RunConfig, build_config
from exponents import RationalFormatError, SignatureError, VariableSignature, parse_rational
from fibercut import (FiberCutError, FiberCutSystem, build_fiber_cut, chart_fiber_cut,
                      exact_critical_points, verify_fiber_cut)
from geometry import (BasicSetDescriptor, Quadrant, RankInstability, RadiusNotCertified,
                      build_local_parametrization, chart_face, covering_check,
                      find_iota, halved_covering_check, numeric_jacobian, numeric_rank,
                      refine_by_rank, select_basic_set, sign_constancy_check)
from gpsfile import ParseError, parse_series_file
from logger import get_logger, setup_logging, timed
from reports import Report, write_csv, write_report
from series import GenSeries, Zero
from transforms import TransformChain, TransformError
from trees import (DepthExhausted, VerificationFailure, describe_status, iter_branches,
                   leaf_count, monomialize, star_monomialize, tree_depth, tree_from_json,
                   tree_to_json, verify_tree)
from vlab import (BreakpointSystem, VlabError, avoidance_check, default_degree, jet_tuple,
                  phi_jacobian, random_w_element, submersion_dimension,
                  transcendence_tuple_length, w_basis)

log = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

VLAB_COMMANDS = ('jet', 'wbasis', 'gradcheck', 'avoid')


class UsageError(QmonoError):
    """Missing or inconsistent command-line input"""


# =============================================================================
# Helpers
# =============================================================================

def parse_rational_list(text: str, size: int, what: str) -> Tuple[Fraction, ...]:
    """Whitespace or comma separated rationals; a single value is repeated"""
    tokens = text.replace(',', ' ').split()
    values = [parse_rational(t, reduced=False) for t in tokens]
    if len(values) == 1:
        values = values * size
    if len(values) != size:
        raise UsageError(f"{what} needs 1 or {size} values, got {len(values)}")
    if any(v <= 0 for v in values):
        raise UsageError(f"{what} entries must be positive")
    return tuple(values)


def _load_series(path: str, config: RunConfig) -> GenSeries:
    F = parse_series_file(path)
    if config.radius is None:
        return F
    radius = parse_rational_list(config.radius, F.signature.size, 'radius')
    return F.with_signature(F.signature.with_radius(radius))


def _load_inputs(config: RunConfig, required: bool = True) -> List[GenSeries]:
    if required and not config.inputs:
        raise UsageError(f"{config.subcommand} needs at least one --input series file")
    return [_load_series(path, config) for path in config.inputs]


def _common_signature(series: Sequence[GenSeries]) -> VariableSignature:
    signature = series[0].signature
    for F in series[1:]:
        signature = signature.meet(F.signature)
    return signature


def _descriptor(config: RunConfig) -> Optional[BasicSetDescriptor]:
    if config.equation is None:
        if config.inequalities:
            raise UsageError("--inequality needs an --equation")
        return None
    equation = _load_series(config.equation, config)
    inequalities = [_load_series(path, config) for path in config.inequalities]
    return BasicSetDescriptor(equation, inequalities)


@contextmanager
def _pool(workers: int):
    if workers <= 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=workers) as executor:
        yield executor


def _new_report(config: RunConfig, title: str) -> Report:
    return Report(title, config_lines=config.echo())


def _signs(signs: Sequence[int]) -> str:
    return ''.join(format_sign(s) for s in signs) or '-'


def _radius(values: Sequence[Fraction]) -> str:
    return ' '.join(format_rational(r) for r in values) or '-'


def _verdict(ok: bool) -> str:
    return 'ok' if ok else 'FAIL'


def _chart_rows(charts) -> List[List[str]]:
    return [
        [str(index), str(chart.chain), str(chart.domain), _radius(chart.radius), _signs(signs)]
        for index, (chart, signs) in enumerate(charts)
    ]


CHART_HEADERS = ['chart', 'chain', 'quadrant', 'radius', 'signs']


# =============================================================================
# normalize / verify
# =============================================================================

def _ledger_text(leaf) -> str:
    if not leaf.ledger:
        return '-'
    return ' '.join(
        f"{e.step}:x{e.variable}={'zero' if isinstance(e.status, Zero) else 'normal'}"
        for e in leaf.ledger
    )


def cmd_normalize(config: RunConfig) -> Tuple[Report, int]:
    series = _load_inputs(config)
    build = star_monomialize if config.star else monomialize
    with _pool(config.workers) as executor:
        tree = build(series, config.max_depth, executor)

    tree_path = config.tree or str(Path(config.inputs[0]).with_suffix('.qtree'))
    Path(tree_path).write_text(tree_to_json(tree), encoding='utf-8')

    report = _new_report(config, 'normalize')
    rows = []
    for index, (steps, leaf) in enumerate(iter_branches(tree)):
        chain = TransformChain(steps, tree.signature)
        statuses = ' ; '.join(describe_status(s) for s in leaf.statuses or [])
        rows.append([str(index), str(chain), statuses, _ledger_text(leaf)])
    report.add_section('branches', ['branch', 'chain', 'statuses', 'ledger'], rows)
    report.add_summary(f"leaves: {leaf_count(tree)}")
    report.add_summary(f"depth: {tree_depth(tree)}")
    report.add_summary(f"tree: {tree_path}")
    return report, EXIT_OK


def cmd_verify(config: RunConfig) -> Tuple[Report, int]:
    if not config.tree:
        raise UsageError("verify needs --tree")
    series = _load_inputs(config)
    try:
        tree = tree_from_json(Path(config.tree).read_text(encoding='utf-8'))
    except OSError as e:
        raise UsageError(f"cannot read tree {config.tree}: {e}") from None
    except (ValueError, KeyError, TypeError, QmonoError) as e:
        raise UsageError(f"malformed tree {config.tree}: {e}") from None

    report = _new_report(config, 'verify')
    try:
        branches = verify_tree(tree, series)
    except VerificationFailure as e:
        report.add_section('branches', ['branch', 'chain', 'ledger', 'result'], [])
        where = f"branch {e.branch}" + (f", series {e.series}" if e.series is not None else '')
        report.add_summary(f"verification FAILED at {where}: {e.reason}")
        return report, EXIT_FAILURE

    rows = [[str(index), str(b.chain), str(len(b.ledger)), 'ok'] for index, b in enumerate(branches)]
    report.add_section('branches', ['branch', 'chain', 'ledger', 'result'], rows)
    report.add_summary(f"verified {plural(len(branches), 'branch', 'es')}")
    return report, EXIT_OK


# =============================================================================
# signs / parametrize
# =============================================================================

def cmd_signs(config: RunConfig) -> Tuple[Report, int]:
    series = _load_inputs(config)
    signature = _common_signature(series)
    series = [F.with_signature(signature) for F in series]
    with _pool(config.workers) as executor:
        charts = build_local_parametrization(signature, series, config.max_depth, executor)
    check = sign_constancy_check(charts, series, config.samples or constants.SIGN_SAMPLES, config.seed)

    report = _new_report(config, 'signs')
    report.add_section('charts', CHART_HEADERS, _chart_rows(charts))
    report.add_summary(f"signature: {signature}")
    report.add_summary(f"sign check: {check.checked} values, {check.inconclusive} inconclusive, "
                       f"{len(check.violations)} violations: {_verdict(check.passed)}")
    return report, EXIT_OK if check.passed else EXIT_FAILURE


def cmd_parametrize(config: RunConfig) -> Tuple[Report, int]:
    compat = _load_inputs(config, required=False)
    descriptor = _descriptor(config)
    if descriptor is not None:
        signature = descriptor.signature
        family = compat + descriptor.series
    elif compat:
        signature = _common_signature(compat)
        family = compat
    else:
        raise UsageError("parametrize needs --input series or an --equation")
    family = [F.with_signature(signature) for F in family]

    with _pool(config.workers) as executor:
        full = build_local_parametrization(signature, family, config.max_depth, executor)
    charts = select_basic_set(full, len(compat)) if descriptor is not None else full

    check = sign_constancy_check(full, family, config.samples or constants.SIGN_SAMPLES, config.seed)
    covering = covering_check([chart for chart, _ in full], signature, config.covering_samples, config.seed)
    halved = halved_covering_check(signature, family, config.max_depth, config.covering_samples, config.seed)

    report = _new_report(config, 'parametrize')
    title = 'basic set charts' if descriptor is not None else 'charts'
    report.add_section(title, CHART_HEADERS, _chart_rows(charts))
    report.add_summary(f"signature: {signature}")
    if descriptor is not None:
        report.add_summary(f"retained {len(charts)} of {plural(len(full), 'chart')}")
    report.add_summary(f"sign check: {check.checked} values, {len(check.violations)} violations: "
                       f"{_verdict(check.passed)}")
    report.add_summary(f"covering: {format_real(covering.fraction)} of {covering.samples} "
                       f"within radius ({', '.join(format_real(r) for r in covering.radius)}): "
                       f"{_verdict(covering.passed)}")
    report.add_summary(f"covering at half radius: {format_real(halved.fraction)} of {halved.samples}: "
                       f"{_verdict(halved.passed)}")
    ok = check.passed and covering.passed and halved.passed
    return report, EXIT_OK if ok else EXIT_FAILURE


# =============================================================================
# fibercut
# =============================================================================

def _map_rank(eta: Sequence[GenSeries], m_split: int, rng: np.random.Generator,
              samples: int = 32) -> Tuple[int, Optional[Tuple[int, ...]]]:
    """Numeric projected rank and immersion witness of η on the open quadrant"""
    signature = eta[0].signature
    points = Quadrant.open(signature).sample(rng, samples)
    ranks, witnesses = set(), set()
    for point in points:
        J = numeric_jacobian(eta, point)
        ranks.add(numeric_rank(J[:m_split]))
    if len(ranks) != 1:
        raise RankInstability(f"projected ranks {sorted(ranks)} vary over the open quadrant")
    rank = ranks.pop()
    if len(eta) >= signature.size:
        for point in points:
            witnesses.add(find_iota(numeric_jacobian(eta, point), m_split, rank))
    iota = witnesses.pop() if len(witnesses) == 1 else None
    return rank, iota


def _system_rows(index: str, system: FiberCutSystem, result) -> List[str]:
    margin = '-' if result.witness_margin is None else format_real(result.witness_margin)
    return [
        index, str(system.d), str(system.rank), str(len(system.equations)),
        f"{result.converged}/{result.samples}", format_real(result.max_discrepancy), margin,
        _verdict(result.passed),
    ]


FIBER_HEADERS = ['map', 'd', 'rank', 'equations', 'converged', 'max discrepancy', 'witness margin', 'result']


def cmd_fibercut(config: RunConfig) -> Tuple[Report, int]:
    samples = config.samples or constants.FIBER_SAMPLES
    report = _new_report(config, 'fibercut')
    report.header_notes.append("Phi(x, r') = prod x_i (r'_i - x_i)")
    descriptor = _descriptor(config)
    ok = True

    if descriptor is None:
        eta = _load_inputs(config)
        signature = _common_signature(eta)
        if signature.n:
            raise UsageError("fiber cutting of a map needs generalized variables only")
        eta = [F.with_signature(signature) for F in eta]
        if not 1 <= config.split <= len(eta):
            raise UsageError(f"--split must lie in 1..{len(eta)}")
        rng = np.random.default_rng(config.seed)
        rank, iota = _map_rank(eta, config.split, rng)
        system = build_fiber_cut(eta, config.split, rank, iota)
        rprime = (parse_rational_list(config.rprime, signature.size, 'rprime')
                  if config.rprime else signature.polyradius)
        result = verify_fiber_cut(system, rprime, samples, config.seed)
        ok = result.passed
        report.add_section('systems', FIBER_HEADERS, [_system_rows('0', system, result)])
        report.add_section('equations', ['index', 'equation'],
                           [[str(i), str(E)] for i, E in enumerate(system.equations)])
        report.add_summary(f"r': {_radius(rprime)}")
        if system.d == 1:
            try:
                roots = exact_critical_points(system, rprime)
                report.add_summary(f"critical set: {format_vector(roots)}")
            except FiberCutError as e:
                report.add_summary(f"critical set: not computed ({e})")
        return report, EXIT_OK if ok else EXIT_FAILURE

    with _pool(config.workers) as executor:
        charts = build_local_parametrization(descriptor, (), config.max_depth, executor)
    ranked = refine_by_rank([chart for chart, _ in charts], config.split, config.max_depth, seed=config.seed)
    rows, skipped = [], 0
    for index, item in enumerate(ranked):
        _, face = chart_face(item.chart)
        if face.dimension == 0 or item.rank >= face.dimension:
            skipped += 1
            continue
        iota = item.iota if item.iota and len(item.iota) == face.dimension else None
        system = chart_fiber_cut(item.chart, config.split, item.rank, iota)
        result = verify_fiber_cut(system, face.radius, samples, config.seed)
        ok = ok and result.passed
        rows.append(_system_rows(str(index), system, result))
    report.add_section('chart systems', FIBER_HEADERS, rows)
    report.add_summary(f"charts: {len(ranked)}, already of full rank: {skipped}")
    return report, EXIT_OK if ok else EXIT_FAILURE


# =============================================================================
# vlab
# =============================================================================

def _unmarked_points(rng: np.random.Generator, breakpoints: BreakpointSystem, count: int,
                     separation: float = constants.BREAKPOINT_CLEARANCE) -> List[float]:
    points: List[float] = []
    for _ in range(constants.PLACEMENT_ATTEMPTS):
        if len(points) == count:
            break
        x = float(rng.uniform(-0.95, 0.95))
        if breakpoints.is_marked(x, separation):
            continue
        if any(abs(x - y) <= separation for y in points):
            continue
        points.append(x)
    if len(points) < count:
        raise UsageError(f"cannot place {count} points {separation} apart from each other and the marked points")
    return sorted(points)


def _vlab_setup(config: RunConfig):
    if config.n < 1 or config.p < 0 or config.k < 0:
        raise UsageError("vlab needs n >= 1, p >= 0, k >= 0")
    if config.p < config.k:
        raise UsageError(f"vlab needs p >= k, got p={config.p}, k={config.k}")
    degree = config.degree if config.degree is not None else default_degree(config.n, config.p)
    breakpoints = BreakpointSystem.dyadic(config.k)
    return degree, breakpoints, np.random.default_rng(config.seed)


def _vlab_jet(config: RunConfig, report: Report) -> bool:
    n, p, k = config.n, config.p, config.k
    degree, breakpoints, rng = _vlab_setup(config)
    basis = w_basis(breakpoints, degree)
    _, f = random_w_element(basis, rng)
    x = _unmarked_points(rng, breakpoints, n)
    jet = jet_tuple(f, x, n, p, k)
    report.add_section('jet', ['index', 'coordinate', 'value'],
                       [[str(i), label, format_real(v)] for i, (label, v) in enumerate(zip(jet.labels, jet.values))])
    length_ok = n + len(jet) == submersion_dimension(n, p, k)
    tuple_ok = n + (k + 1) + len(jet) == transcendence_tuple_length(n, p, k)
    violations = f.violations(config.tol)
    report.add_summary(f"points: {format_vector(x, real=True)}")
    report.add_summary(f"n + |jet| = {n + len(jet)}, expected {submersion_dimension(n, p, k)}: {_verdict(length_ok)}")
    report.add_summary(f"|(x, a, jet)| = {n + k + 1 + len(jet)}, expected "
                       f"{transcendence_tuple_length(n, p, k)}: {_verdict(tuple_ok)}")
    report.add_summary(f"matching violations: {len(violations)}")
    return length_ok and tuple_ok and not violations


def _vlab_wbasis(config: RunConfig, report: Report) -> bool:
    _, _, rng = _vlab_setup(config)
    rows, ok = [], True
    for k in range(config.k + 1):
        degree = config.degree if config.degree is not None else default_degree(config.n, config.p)
        basis = w_basis(BreakpointSystem.dyadic(k), degree)
        expected = (k + 1) * (k + 2) // 2
        _, element = random_w_element(basis, rng)
        member = not element.violations(config.tol)
        good = basis.rank == expected and basis.codimension == expected and member
        ok = ok and good
        rows.append([str(k), str(degree), str(basis.codimension), str(basis.rank), str(expected),
                     str(basis.dimension), 'yes' if member else 'no', _verdict(good)])
    report.add_section('W codimension',
                       ['k', 'degree', 'constraints', 'rank', 'expected', 'dim W', 'member', 'result'], rows)
    return ok


def _vlab_gradcheck(config: RunConfig, report: Report) -> bool:
    n, p, k = config.n, config.p, config.k
    degree, breakpoints, rng = _vlab_setup(config)
    basis = w_basis(breakpoints, degree)
    _, f = random_w_element(basis, rng)
    rows, ok = [], True
    for index in range(config.samples or constants.GRADCHECK_SAMPLES):
        coords = rng.normal(0.0, 0.1, size=basis.dimension)
        x = _unmarked_points(rng, breakpoints, n, constants.GRADCHECK_SEPARATION)
        result = phi_jacobian(f, coords, x, n, p, k, degree, basis)
        ok = ok and result.passed
        rows.append([str(index), format_real(result.max_relative_error), str(result.rank),
                     str(result.expected_rank), _verdict(result.passed)])
    report.add_section('gradients', ['sample', 'relative error', 'rank', 'expected', 'result'], rows)
    return ok


def _vlab_avoid(config: RunConfig, report: Report) -> bool:
    if not config.polys:
        raise UsageError("vlab avoid needs at least one --poly")
    n, p, k = config.n, config.p, config.k
    degree, breakpoints, rng = _vlab_setup(config)
    _, f = random_w_element(w_basis(breakpoints, degree), rng)
    hits = avoidance_check(f, config.polys, n, p, k, config.grid, config.tol)
    report.add_section('grid points on the algebraic set', ['x'],
                       [[format_vector(x, real=True)] for x in hits])
    report.add_summary(f"polynomials: {'; '.join(config.polys)}")
    report.add_summary(f"grid: {config.grid}, hits: {len(hits)}")
    return not hits


VLAB_HANDLERS: Dict[str, Callable[[RunConfig, Report], bool]] = {
    'jet': _vlab_jet,
    'wbasis': _vlab_wbasis,
    'gradcheck': _vlab_gradcheck,
    'avoid': _vlab_avoid,
}


def cmd_vlab(config: RunConfig) -> Tuple[Report, int]:
    handler = VLAB_HANDLERS.get(config.vlab_command or '')
    if handler is None:
        raise UsageError(f"vlab command must be one of {', '.join(VLAB_COMMANDS)}")
    report = _new_report(config, f"vlab {config.vlab_command}")
    report.header_notes.append(
        "jet order: f^(q)(x_i) q<=p; f^(q)(a_i) q<=i; f^(q)(a_i-), f^(q)(a_i+) i<q<=p")
    report.header_notes.append(f"(n, p, k) = ({config.n}, {config.p}, {config.k})")
    ok = handler(config, report)
    return report, EXIT_OK if ok else EXIT_FAILURE


# =============================================================================
# Entry points
# =============================================================================

COMMANDS: Dict[str, Callable[[RunConfig], Tuple[Report, int]]] = {
    'normalize': cmd_normalize,
    'verify': cmd_verify,
    'signs': cmd_signs,
    'parametrize': cmd_parametrize,
    'fibercut': cmd_fibercut,
    'vlab': cmd_vlab,
}


def run(config: RunConfig) -> int:
    """Execute one subcommand and write its report

    Returns:
        0 on success, 1 on a failed verification or check, 2 on usage or
        input errors
    """
    handler = COMMANDS.get(config.subcommand)
    if handler is None:
        print(f"Error: unknown subcommand '{config.subcommand}'", file=sys.stderr)
        return EXIT_USAGE
    try:
        with timed(log, config.subcommand):
            report, code = handler(config)
    except (UsageError, ParseError, ConfigError, SignatureError, RationalFormatError,
            FiberCutError, VlabError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DepthExhausted, RankInstability, RadiusNotCertified, TransformError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except QmonoError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE

    write_report(report, config.out)
    if config.csv:
        write_csv(report, config.csv)
    log.info(f"{config.subcommand} finished with exit code {code}")
    return code


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--input', dest='inputs', action='append', default=None, metavar='FILE',
                        help='Series file in .gps format (repeatable)')
    common.add_argument('--out', default=None, help='Report file (default: stdout)')
    common.add_argument('--csv', default=None, help='Also write the report tables as CSV')
    common.add_argument('--seed', type=int, default=None, help='Seed for all sampling (default: 0)')
    common.add_argument('--max-depth', type=int, default=None,
                        help=f'Depth guard for monomialization (default: {constants.DEFAULT_MAX_DEPTH})')
    common.add_argument('--tol', type=float, default=None,
                        help=f'Numeric tolerance (default: {constants.DEFAULT_TOL})')
    common.add_argument('--radius', default=None,
                        help='Polyradius override: one rational or one per variable')
    common.add_argument('--samples', type=int, default=None, help='Sample budget of the numeric checks')
    common.add_argument('--workers', type=int, default=None, help='Worker threads (default: 1)')
    common.add_argument('--config', default=None, help='JSON file with default settings')
    common.add_argument('--log-file', default=None, help='Write debug log to this file')
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='Increase verbosity (use -v for info, -vv for debug)')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_arguments()
    parser = argparse.ArgumentParser(
        description='Monomialization and parametrization toolkit for generalized power series',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Series files (.gps):
    gps <m> <n>
    radius <r_1> ... <r_{m+n}>      (optional, default all 1)
    <coeff> : <e_1> ... <e_{m+n}>   (one term per line, rationals as p/q in
                                     lowest terms, exponents ascending)

Configuration:
  Settings come from the command line, optionally layered over a JSON file
  given with --config. No environment variables are read.

Exit codes:
  0 success, 1 verification or check failure, 2 usage or input error

Example:
  qmono normalize --star --input x1_minus_x2.gps --tree x1_minus_x2.qtree
  qmono verify --tree x1_minus_x2.qtree --input x1_minus_x2.gps
        """
    )
    subparsers = parser.add_subparsers(dest='subcommand', required=True, metavar='COMMAND')

    normalize = subparsers.add_parser('normalize', parents=[common], help='Build a monomializing tree')
    normalize.add_argument('--star', action='store_true', default=None,
                           help='Also normalize every blow-up critical variable below it')
    normalize.add_argument('--tree', default=None, help='Tree output file (default: <input>.qtree)')

    verify = subparsers.add_parser('verify', parents=[common], help='Re-check a tree against its series')
    verify.add_argument('--tree', default=None, help='Tree file to verify')

    subparsers.add_parser('signs', parents=[common], help='Sign-compatible charts of the input series')

    parametrize = subparsers.add_parser('parametrize', parents=[common],
                                        help='Local parametrization of a polydisk or basic set')
    parametrize.add_argument('--equation', default=None, help='Series f of the basic set {f = 0, g > 0}')
    parametrize.add_argument('--inequality', dest='inequalities', action='append', default=None,
                             help='Series g of the basic set (repeatable)')
    parametrize.add_argument('--covering-samples', type=int, default=None,
                             help=f'Covering sample budget (default: {constants.COVERING_SAMPLES})')

    fibercut = subparsers.add_parser('fibercut', parents=[common], help='Fiber-cutting systems and checks')
    fibercut.add_argument('--split', type=int, default=None, help='Number of projected coordinates (default: 1)')
    fibercut.add_argument('--rprime', default=None, help="Box radius r' (default: the polyradius)")
    fibercut.add_argument('--equation', default=None, help='Basic set equation, fiber-cut its charts')
    fibercut.add_argument('--inequality', dest='inequalities', action='append', default=None,
                          help='Basic set inequality (repeatable)')

    vlab = subparsers.add_parser('vlab', parents=[common], help='Piecewise-polynomial jet laboratory')
    vlab.add_argument('vlab_command', choices=VLAB_COMMANDS, help='Experiment to run')
    vlab.add_argument('--n', type=int, default=None, help='Number of jet points (default: 1)')
    vlab.add_argument('--p', type=int, default=None, help='Jet order (default: 2)')
    vlab.add_argument('--k', type=int, default=None, help='Last marked point index (default: 0)')
    vlab.add_argument('--grid', type=int, default=None,
                      help=f'Grid size for avoid (default: {constants.DEFAULT_GRID})')
    vlab.add_argument('--degree', type=int, default=None, help='Piece degree (default: (n+2)(p+1)-1)')
    vlab.add_argument('--poly', dest='polys', action='append', default=None,
                      help='Polynomial in z1..zl for avoid (repeatable)')
    return parser


def main(argv: Optional[List[str]] = None):
    parser = build_parser()
    args = parser.parse_args(argv)

    # Setup logging based on verbosity
    setup_logging(verbosity=args.verbose, log_file=args.log_file, use_colors=sys.stderr.isatty())

    flags = {
        key: value for key, value in vars(args).items()
        if key not in ('subcommand', 'verbose', 'log_file', 'config')
    }
    try:
        config = build_config(args.subcommand, flags, args.config)
    except (ConfigError, TypeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    sys.exit(run(config))


if __name__ == '__main__':
    main()

#!/usr/bin/env python3
"""
Admissible trees: automatic (*-)monomialization, branch enumeration,
independent verification and `.qtree` serialization

The engine works on the product P of the input series. A node whose P is
normal (or zero) becomes a leaf. Otherwise the lexicographically first
incomparable pair of minimal exponents (β, α) picks i (first index with
α_i > β_i) and j (first index with α_j < β_j). A standard variable among
them is first turned into a generalized one by a reflection fork;
otherwise both weighted blow-up charts with λ = (α_i-β_i)/(β_j-α_j)
are expanded.
"""

import json
from concurrent.futures import Executor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from common import QmonoError, format_rational, format_vector
from exponents import Exponent, VariableSignature, comparable, make_exponent, parse_rational
from logger import get_logger, is_debug
from series import (
    GenSeries, NormalDecomposition, NotNormal, Status, ZERO, Zero, is_settled,
    normal_decompose, product,
)
from transforms import (
    ElementaryTransform, TransformChain, TransformKind, apply_transform,
    blowup_chart_a, blowup_chart_b, critical_variable, equalizing_blowup,
    reflection_minus, reflection_plus, transform_exponent, transform_from_record,
)

log = get_logger(__name__)

FORK_BLOWUP = 'blowup'
FORK_REFLECTION = 'reflection'


class DepthExhausted(QmonoError):
    """A branch grew beyond the depth guard"""

    def __init__(self, max_depth: int):
        super().__init__(f"branch exceeded max depth {max_depth}")
        self.max_depth = max_depth


class VerificationFailure(QmonoError):
    """Pinpoints the failing branch and series"""

    def __init__(self, branch: int, series: Optional[int], reason: str):
        where = f"branch {branch}" + (f", series {series}" if series is not None else '')
        super().__init__(f"{where}: {reason}")
        self.branch = branch
        self.series = series
        self.reason = reason


@dataclass
class LedgerEntry:
    """Image of a blow-up's critical variable at a leaf below it"""
    step: int
    variable: int
    status: Status


@dataclass
class AdmissibleTree:
    signature: VariableSignature
    children: List[Tuple[ElementaryTransform, 'AdmissibleTree']] = field(default_factory=list)
    fork: Optional[str] = None
    pair: Optional[Tuple[Exponent, Exponent]] = None
    statuses: Optional[List[Status]] = None
    ledger: List[LedgerEntry] = field(default_factory=list)
    star: bool = False

    @property
    def is_leaf(self) -> bool:
        return self.fork is None


@dataclass
class BranchReport:
    chain: TransformChain
    statuses: List[Status]
    ledger: List[LedgerEntry]


# =============================================================================
# Engine
# =============================================================================

@dataclass
class _Plan:
    fork: str
    i: int
    j: Optional[int] = None
    lam: Optional[Fraction] = None
    pair: Optional[Tuple[Exponent, Exponent]] = None


def plan_fork(P: GenSeries) -> Optional[_Plan]:
    """Next fork for the product P, or None when P is normal or zero"""
    status = normal_decompose(P)
    if not isinstance(status, NotNormal):
        return None
    beta, alpha = status.pair
    i, j, lam = equalizing_blowup(alpha, beta)
    m = P.signature.m
    if i > m:
        return _Plan(FORK_REFLECTION, i - m, pair=status.pair)
    if j > m:
        return _Plan(FORK_REFLECTION, j - m, pair=status.pair)
    return _Plan(FORK_BLOWUP, i, j, lam, status.pair)


def fork_transforms(signature: VariableSignature, plan: _Plan) -> List[ElementaryTransform]:
    if plan.fork == FORK_REFLECTION:
        return [reflection_plus(signature, plan.i), reflection_minus(signature, plan.i)]
    return [blowup_chart_a(signature, plan.i, plan.j, plan.lam),
            blowup_chart_b(signature, plan.i, plan.j, plan.lam)]


def _build(inputs: List[GenSeries], tracked: List[Tuple[int, int, GenSeries]],
           depth: int, max_depth: int, star: bool,
           executor: Optional[Executor]) -> AdmissibleTree:
    signature = inputs[0].signature
    nonzero = [F for F in inputs if not F.is_zero]
    plan = plan_fork(product(nonzero)) if nonzero else None
    if plan is None:
        statuses = []
        for index, F in enumerate(inputs):
            status = normal_decompose(F)
            if not is_settled(status):
                raise QmonoError(f"input {index} not normal at a leaf with normal product")
            statuses.append(status)
        ledger = [LedgerEntry(step, variable, normal_decompose(W)) for step, variable, W in tracked]
        return AdmissibleTree(signature, statuses=statuses, ledger=ledger, star=star)

    if depth >= max_depth:
        raise DepthExhausted(max_depth)

    steps = fork_transforms(signature, plan)
    if is_debug():
        log.debug(f"{plan.fork} fork {', '.join(str(t) for t in steps)}", extra={'depth': depth})

    def _child(t: ElementaryTransform) -> AdmissibleTree:
        child_inputs = [apply_transform(F, t) for F in inputs]
        child_tracked = [(s, v, apply_transform(W, t)) for s, v, W in tracked]
        w = critical_variable(t)
        if star and w is not None:
            child_tracked.append((depth, w, GenSeries.variable(t.source, w)))
        return _build(child_inputs, child_tracked, depth + 1, max_depth, star, None)

    if executor is not None:
        subtrees = list(executor.map(_child, steps))
    else:
        subtrees = [_child(t) for t in steps]
    return AdmissibleTree(signature, children=list(zip(steps, subtrees)),
                          fork=plan.fork, pair=plan.pair, star=star)


def _check_inputs(series: Sequence[GenSeries], max_depth: int) -> VariableSignature:
    if not series:
        raise QmonoError("at least one series is required")
    if max_depth < 1:
        raise QmonoError("max_depth must be at least 1")
    signature = series[0].signature
    for F in series[1:]:
        signature = signature.meet(F.signature)
    return signature


def monomialize(series: Sequence[GenSeries], max_depth: int = 64,
                executor: Optional[Executor] = None) -> AdmissibleTree:
    """Tree whose every branch makes each input series normal or zero

    Args:
        series: Input series sharing a signature
        max_depth: Guard on branch length
        executor: Optional pool; the two root charts are expanded concurrently

    Returns:
        The admissible tree
    """
    signature = _check_inputs(series, max_depth)
    inputs = [F.with_signature(signature) for F in series]
    tree = _build(inputs, [], 0, max_depth, False, executor)
    log.info(f"monomialized {len(inputs)} series: {leaf_count(tree)} leaves, depth {tree_depth(tree)}")
    return tree


def star_monomialize(series: Sequence[GenSeries], max_depth: int = 64,
                     executor: Optional[Executor] = None) -> AdmissibleTree:
    """As monomialize, also tracking every blow-up's critical variable below it"""
    signature = _check_inputs(series, max_depth)
    inputs = [F.with_signature(signature) for F in series]
    tree = _build(inputs, [], 0, max_depth, True, executor)
    log.info(f"*-monomialized {len(inputs)} series: {leaf_count(tree)} leaves, depth {tree_depth(tree)}")
    return tree


# =============================================================================
# Branches
# =============================================================================

def iter_branches(tree: AdmissibleTree, prefix: Tuple[ElementaryTransform, ...] = ()):
    """(steps, leaf) pairs in left-to-right order"""
    if tree.is_leaf:
        yield prefix, tree
        return
    for t, child in tree.children:
        yield from iter_branches(child, prefix + (t,))


def branch_charts(tree: AdmissibleTree) -> List[TransformChain]:
    return [TransformChain(steps, tree.signature) for steps, _ in iter_branches(tree)]


def leaf_count(tree: AdmissibleTree) -> int:
    if tree.is_leaf:
        return 1
    return sum(leaf_count(child) for _, child in tree.children)


def tree_depth(tree: AdmissibleTree) -> int:
    if tree.is_leaf:
        return 0
    return 1 + max(tree_depth(child) for _, child in tree.children)


# =============================================================================
# Verification
# =============================================================================

def _snapshot_valid(status) -> bool:
    if isinstance(status, Zero):
        return True
    if not isinstance(status, NormalDecomposition):
        return False
    return isinstance(normal_decompose(status.unit), NormalDecomposition) and status.constant != 0


def _same_status(a, b) -> bool:
    if isinstance(a, Zero) or isinstance(b, Zero):
        return isinstance(a, Zero) and isinstance(b, Zero)
    return a.monomial_exponent == b.monomial_exponent and a.unit == b.unit


def _disagreements(a: Exponent, b: Exponent) -> int:
    return sum(1 for x, y in zip(a, b) if x != y)


def _check_fork(tree: AdmissibleTree, branch: int):
    kinds = [t.kind for t, _ in tree.children]
    if tree.fork == FORK_REFLECTION:
        expected = [TransformKind.REFLECTION_PLUS, TransformKind.REFLECTION_MINUS]
    elif tree.fork == FORK_BLOWUP:
        expected = [TransformKind.BLOWUP_A, TransformKind.BLOWUP_B]
    else:
        raise VerificationFailure(branch, None, f"unknown fork kind {tree.fork!r}")
    if kinds != expected:
        raise VerificationFailure(
            branch, None, f"{tree.fork} fork has children {[k.value for k in kinds]}, expected {[k.value for k in expected]}")
    first, second = tree.children[0][0], tree.children[1][0]
    if (first.i, first.j, first.param) != (second.i, second.j, second.param):
        raise VerificationFailure(branch, None, f"fork children {first} and {second} disagree")
    for t, child in tree.children:
        if t.target != tree.signature or child.signature != t.source:
            raise VerificationFailure(branch, None, f"signatures do not compose at {t}")
    if tree.fork == FORK_BLOWUP and tree.pair is not None:
        before = _disagreements(*tree.pair)
        for t, _ in tree.children:
            images = [transform_exponent(t, e) for e in tree.pair]
            w = critical_variable(t) - 1
            if comparable(*images):
                continue
            if images[0][w] != images[1][w] or _disagreements(*images) >= before:
                raise VerificationFailure(branch, None, f"{t} does not reduce the pair {tree.pair}")


def verify_tree(tree: AdmissibleTree, series: Sequence[GenSeries]) -> List[BranchReport]:
    """Recompute every branch from the root and check statuses, ledger and shapes

    Raises:
        VerificationFailure: on the first failing branch
    """
    inputs = [F.with_signature(tree.signature) for F in series]
    reports: List[BranchReport] = []

    def _walk(node: AdmissibleTree, steps: Tuple[ElementaryTransform, ...], current: List[GenSeries]):
        branch = len(reports)
        if not node.is_leaf:
            if len(node.children) != 2:
                raise VerificationFailure(branch, None, f"{node.fork} fork has {len(node.children)} children")
            _check_fork(node, branch)
            for t, child in node.children:
                _walk(child, steps + (t,), [apply_transform(F, t) for F in current])
            return

        chain = TransformChain(steps, tree.signature)
        snapshots = node.statuses or []
        if len(snapshots) != len(current):
            raise VerificationFailure(branch, None, f"leaf records {len(snapshots)} statuses for {len(current)} series")
        statuses = []
        for index, (F, snapshot) in enumerate(zip(current, snapshots)):
            status = normal_decompose(F)
            if isinstance(status, NotNormal):
                raise VerificationFailure(branch, index, f"not normal, incomparable pair {status.pair}")
            if not _snapshot_valid(snapshot):
                raise VerificationFailure(branch, index, "snapshot is not a normal decomposition")
            if not _same_status(status, snapshot):
                raise VerificationFailure(branch, index, "snapshot differs from recomputed status")
            statuses.append(status)

        ledger = []
        if tree.star:
            for s, t in enumerate(steps):
                w = critical_variable(t)
                if w is None:
                    continue
                W = apply_transform(GenSeries.variable(t.source, w), TransformChain(steps[s + 1:], t.source))
                status = normal_decompose(W)
                if isinstance(status, NotNormal):
                    raise VerificationFailure(branch, None, f"critical variable of {t} not normal below it")
                ledger.append(LedgerEntry(s, w, status))
        if [(e.step, e.variable) for e in node.ledger] != [(e.step, e.variable) for e in ledger]:
            raise VerificationFailure(branch, None, "critical-variable ledger does not match the chain")
        for recorded, entry in zip(node.ledger, ledger):
            if not _same_status(recorded.status, entry.status):
                raise VerificationFailure(branch, None, f"ledger status of step {entry.step} differs from recomputed")
        reports.append(BranchReport(chain, statuses, ledger))

    _walk(tree, (), inputs)
    log.info(f"verified {len(reports)} branches")
    return reports


# =============================================================================
# Serialization
# =============================================================================

def series_to_record(F: GenSeries) -> List[List]:
    return [[format_rational(c), [format_rational(v) for v in e]] for e, c in F.items()]


def series_from_record(record: List, signature: VariableSignature) -> GenSeries:
    return GenSeries(signature, {
        make_exponent(parse_rational(v) for v in e): parse_rational(c) for c, e in record
    })


def status_to_record(status: Status) -> Dict[str, object]:
    if isinstance(status, Zero):
        return {'status': 'zero'}
    return {
        'status': 'normal',
        'exponent': [format_rational(v) for v in status.monomial_exponent],
        'unit': series_to_record(status.unit),
    }


def status_from_record(record: Dict[str, object], signature: VariableSignature) -> Status:
    if record['status'] == 'zero':
        return ZERO
    exponent = make_exponent(parse_rational(v) for v in record['exponent'])
    return NormalDecomposition(exponent, series_from_record(record['unit'], signature))


def _node_to_record(tree: AdmissibleTree) -> Dict[str, object]:
    if tree.is_leaf:
        return {
            'node': 'leaf',
            'statuses': [status_to_record(s) for s in tree.statuses or []],
            'ledger': [
                {'step': e.step, 'variable': e.variable, 'status': status_to_record(e.status)}
                for e in tree.ledger
            ],
        }
    record: Dict[str, object] = {'node': 'fork', 'fork': tree.fork}
    if tree.pair is not None:
        record['pair'] = [[format_rational(v) for v in e] for e in tree.pair]
    record['children'] = [
        {'transform': t.to_record(), 'tree': _node_to_record(child)} for t, child in tree.children
    ]
    return record


def tree_to_json(tree: AdmissibleTree) -> str:
    """Deterministic `.qtree` text"""
    document = {
        'format': 'qtree',
        'version': 1,
        'star': tree.star,
        'signature': {
            'm': tree.signature.m,
            'n': tree.signature.n,
            'radius': [format_rational(r) for r in tree.signature.polyradius],
        },
        'root': _node_to_record(tree),
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + '\n'


def _node_from_record(record: Dict[str, object], signature: VariableSignature, star: bool) -> AdmissibleTree:
    if record['node'] == 'leaf':
        return AdmissibleTree(
            signature,
            statuses=[status_from_record(s, signature) for s in record.get('statuses', [])],
            ledger=[
                LedgerEntry(int(e['step']), int(e['variable']), status_from_record(e['status'], signature))
                for e in record.get('ledger', [])
            ],
            star=star,
        )
    children = []
    for child in record.get('children', []):
        t = transform_from_record(child['transform'], signature)
        children.append((t, _node_from_record(child['tree'], t.source, star)))
    pair = record.get('pair')
    if pair is not None:
        pair = tuple(make_exponent(parse_rational(v) for v in e) for e in pair)
    return AdmissibleTree(signature, children=children, fork=record['fork'], pair=pair, star=star)


def tree_from_json(text: str) -> AdmissibleTree:
    document = json.loads(text)
    if document.get('format') != 'qtree':
        raise QmonoError("not a qtree document")
    sig = document['signature']
    signature = VariableSignature(int(sig['m']), int(sig['n']), tuple(parse_rational(r) for r in sig['radius']))
    star = bool(document.get('star', False))
    return _node_from_record(document['root'], signature, star)


def describe_status(status: Status) -> str:
    if isinstance(status, Zero):
        return 'zero'
    return f"X^{format_vector(status.monomial_exponent)}·[{status.unit}]"

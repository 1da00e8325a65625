#!/usr/bin/env python3
"""
Unit tests for geometry.py module
"""

import pytest
import sys
import os
from fractions import Fraction

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from common import QmonoError
from exponents import VariableSignature, make_exponent
from geometry import (
    BasicSetDescriptor, Chart, Quadrant, RadiusNotCertified, Selector,
    build_local_parametrization, chart_map, cleared_jacobian, covering_check,
    enumerate_quadrants, eval_matrix, finite_difference_jacobian, find_iota,
    halved_covering_check, numeric_rank, refine_by_rank, select_basic_set,
    sign_constancy_check, sign_on_quadrant, validity_radius
)
from gpsfile import parse_series_text
from series import ZERO, GenSeries, NormalDecomposition
from transforms import TransformChain, map_points
from tests.fixtures.corpus import BASIC_SETS, ROOT_DIFFERENCE, X1_MINUS_X2

SIG2 = VariableSignature.uniform(2, 0)
SIG21 = VariableSignature.uniform(2, 1)
SIG1 = VariableSignature(1, 0, (Fraction(1, 2),))


def X(sig, k):
    return GenSeries.variable(sig, k)


def normal(exponent, unit):
    return NormalDecomposition(make_exponent(exponent), unit)


class TestQuadrant:
    """Tests for quadrant selectors"""

    def test_open(self):
        assert str(Quadrant.open(SIG21)) == '(+,+,+)'
        assert Quadrant.open(SIG21).dimension == 3

    def test_generalized_has_no_negative_side(self):
        with pytest.raises(QmonoError):
            Quadrant(SIG2, ('-', '+'))

    def test_enumerate(self):
        assert len(enumerate_quadrants(SIG21)) == 12

    def test_samples_inside(self):
        Q = Quadrant(SIG21, ('+', '0', '-'))
        points = Q.sample(np.random.default_rng(1), 50)
        assert Q.contains(points).all()
        assert Q.zero_positions == [2]


class TestSignOnQuadrant:
    """Tests for symbolic signs of normal series"""

    def test_positive_unit(self):
        nd = normal([1, 0], 1 - X(SIG2, 2))
        assert sign_on_quadrant(nd, Quadrant.open(SIG2)) == 1

    def test_negative_constant(self):
        nd = normal([0, 1], X(SIG2, 1) - 1)
        assert sign_on_quadrant(nd, Quadrant.open(SIG2)) == -1

    def test_vanishing_monomial_on_zero_selector(self):
        nd = normal([1, 0], 1 - X(SIG2, 2))
        assert sign_on_quadrant(nd, Quadrant(SIG2, ('0', '+'))) == 0

    def test_zero_series(self):
        assert sign_on_quadrant(ZERO, Quadrant.open(SIG2)) == 0

    @pytest.mark.parametrize('exponent,expected', [(3, -1), (2, 1)])
    def test_negative_standard_side(self, exponent, expected):
        sig = VariableSignature.uniform(0, 1)
        nd = normal([exponent], GenSeries.constant(sig, 2))
        assert sign_on_quadrant(nd, Quadrant(sig, ('-',))) == expected

    def test_unit_root_inside_quadrant(self):
        nd = normal([0, 0], 1 - 2 * X(SIG2, 2))
        with pytest.raises(RadiusNotCertified):
            sign_on_quadrant(nd, Quadrant.open(SIG2))


class TestValidityRadius:
    """Tests for the exact radius certificate"""

    def test_closed_is_strict(self):
        nd = normal([0, 0], 1 + X(SIG2, 1) + X(SIG2, 2))
        assert validity_radius(nd, (1, 1)) == (Fraction(1, 4), Fraction(1, 4))

    def test_open_allows_equality(self):
        nd = normal([0, 0], 1 + X(SIG2, 1) + X(SIG2, 2))
        assert validity_radius(nd, (1, 1), closed=False) == (Fraction(1, 2), Fraction(1, 2))

    def test_unused_variables_kept(self):
        nd = normal([0, 0], 1 - GenSeries.monomial(SIG2, [Fraction(1, 2), 0]))
        assert validity_radius(nd, (1, 1)) == (Fraction(1, 2), 1)

    def test_zero_constant_rejected(self):
        with pytest.raises(RadiusNotCertified):
            validity_radius(normal([0, 0], X(SIG2, 1)), (1, 1))


class TestParametrization:
    """Tests for local parametrizations of polydisks and basic sets"""

    def test_unit_square(self):
        charts = build_local_parametrization(SIG2)
        assert len(charts) == 4
        full = [chart for chart, _ in charts if chart.dimension == 2]
        assert covering_check(full, SIG2).fraction == 1.0

    def test_difference_is_sign_compatible(self):
        F = parse_series_text(X1_MINUS_X2)
        charts = build_local_parametrization(SIG2, [F])
        check = sign_constancy_check(charts, [F], samples=200)
        assert check.passed
        assert check.checked > 0
        signs = {signs for _, signs in charts}
        assert signs == {(1,), (-1,), (0,)}

    def test_difference_covers(self):
        F = parse_series_text(X1_MINUS_X2)
        charts = [chart for chart, _ in build_local_parametrization(SIG2, [F])]
        assert covering_check(charts, SIG2, samples=10_000).passed
        assert halved_covering_check(SIG2, [F], samples=10_000).passed

    def test_chart_images_inside_shrunk_target(self):
        sig = VariableSignature(2, 0, (Fraction(1, 2), Fraction(1, 2)))
        F = parse_series_text(ROOT_DIFFERENCE).with_signature(sig)
        charts = build_local_parametrization(sig, [F])
        assert charts
        rng = np.random.default_rng(11)
        for chart, _ in charts:
            points = map_points(chart.chain, chart.domain.sample(rng, 500, low=0.0, high=1.0))
            assert np.all(points >= 0)
            assert np.all(points < 0.5 * (1 + 1e-12))

    def test_shrunk_target_covers_balanced_box(self):
        sig = VariableSignature(2, 0, (Fraction(1, 2), Fraction(1, 2)))
        F = parse_series_text(ROOT_DIFFERENCE).with_signature(sig)
        charts = [chart for chart, _ in build_local_parametrization(sig, [F])]
        report = covering_check(charts, sig, samples=10_000)
        assert report.passed
        assert report.radius == pytest.approx((0.5, 0.5 ** 1.5), rel=1e-4)
        assert halved_covering_check(sig, [F], samples=10_000).passed

    def test_charts_are_deterministic(self):
        F = parse_series_text(X1_MINUS_X2)
        first = [(str(c.chain), str(c.domain), s) for c, s in build_local_parametrization(SIG2, [F])]
        second = [(str(c.chain), str(c.domain), s) for c, s in build_local_parametrization(SIG2, [F])]
        assert first == second

    @pytest.mark.parametrize('name', sorted(BASIC_SETS))
    def test_basic_sets(self, name):
        equation, inequalities = BASIC_SETS[name]
        descriptor = BasicSetDescriptor(parse_series_text(equation),
                                        [parse_series_text(g) for g in inequalities])
        full = build_local_parametrization(descriptor.signature, descriptor.series)
        charts = select_basic_set(full, 0)
        assert charts
        assert sign_constancy_check(charts, descriptor.series, samples=1000).passed
        assert sign_constancy_check(full, descriptor.series, samples=1000).passed
        for chart, signs in charts:
            assert signs[0] == 0
            assert all(s == 1 for s in signs[1:])

    def test_descriptor_filters(self):
        equation, inequalities = BASIC_SETS['axis']
        descriptor = BasicSetDescriptor(parse_series_text(equation), [parse_series_text(inequalities[0])])
        charts = build_local_parametrization(descriptor)
        assert charts
        assert all(chart.dimension == 1 for chart, _ in charts)
        rng = np.random.default_rng(5)
        for chart, _ in charts:
            points = map_points(chart.chain, chart.domain.sample(rng, 20))
            assert np.all(points[:, 1] == 0)
            assert np.all(points[:, 0] > 0)


class TestClearedJacobian:
    """Tests for the cleared Jacobian calculus"""

    def test_matches_finite_differences(self):
        eta = [X(SIG2, 1) * X(SIG2, 2), X(SIG2, 1) + GenSeries.monomial(SIG2, [Fraction(3, 2), 2])]
        cj = cleared_jacobian(eta)
        rng = np.random.default_rng(2)
        for point in rng.uniform(0.1, 0.9, size=(20, 2)):
            a = cj.a.eval_numeric(point)
            A = eval_matrix(cj.A, point)
            Jfd = finite_difference_jacobian(eta, point)
            assert np.max(np.abs(A - a * Jfd)) / max(1.0, np.max(np.abs(A))) <= 1e-6

    def test_adjugate_identity(self):
        eta = [X(SIG2, 1) * X(SIG2, 2), X(SIG2, 1) + X(SIG2, 2) ** 2]
        cj = cleared_jacobian(eta, iota=(1, 2), rank=1)
        for i in range(2):
            for j in range(2):
                entry = cj.B[i][0] * cj.A_prime[0][j] + cj.B[i][1] * cj.A_prime[1][j]
                assert entry == (cj.det if i == j else 0)

    def test_kernel_columns(self):
        eta = [X(SIG2, 1), X(SIG2, 2)]
        cj = cleared_jacobian(eta, iota=(1, 2), rank=1)
        assert cj.kernel() == [[GenSeries.zero(SIG2), X(SIG2, 1) * X(SIG2, 2)]]

    def test_iota_checked(self):
        with pytest.raises(QmonoError):
            cleared_jacobian([X(SIG2, 1), X(SIG2, 2)], iota=(2, 1))

    def test_numeric_rank(self):
        assert numeric_rank(np.array([[1.0, 0.0], [0.0, 0.0]])) == 1
        assert numeric_rank(np.zeros((2, 2))) == 0

    def test_find_iota(self):
        J = np.array([[1.0, 1.0], [2.0, 2.0], [0.0, 1.0]])
        assert find_iota(J, 2, 1) == (1, 3)
        assert find_iota(J[:2], 2, 1) is None


class TestRefineByRank:
    """Tests for constant-rank refinement"""

    def test_identity_chart(self):
        chart = Chart(TransformChain((), SIG2), Quadrant.open(SIG2))
        ranked = refine_by_rank([chart], 1)
        assert len(ranked) == 1
        assert ranked[0].rank == 1
        assert ranked[0].iota == (1, 2)

    def test_product_map(self):
        chart = Chart(TransformChain((), SIG2), Quadrant.open(SIG2), [X(SIG2, 1) * X(SIG2, 2)])
        ranked = refine_by_rank([chart], 1)
        assert [r.rank for r in ranked] == [1]
        assert ranked[0].iota is None

    def test_constant_map(self):
        chart = Chart(TransformChain((), SIG2), Quadrant.open(SIG2), [GenSeries.constant(SIG2, 1)])
        ranked = refine_by_rank([chart], 1)
        assert [r.rank for r in ranked] == [0]

    def test_graph_of_diagonal(self):
        t = X(SIG1, 1)
        chart = Chart(TransformChain((), SIG1), Quadrant.open(SIG1), [t, t])
        ranked = refine_by_rank([chart], 1)
        assert [(r.rank, r.iota) for r in ranked] == [(1, (1,))]

    def test_diagonal_curve_in_three_space(self):
        t = X(SIG1, 1)
        chart = Chart(TransformChain((), SIG1), Quadrant.open(SIG1), [t, t, t])
        ranked = refine_by_rank([chart], 1)
        assert [(r.rank, r.iota) for r in ranked] == [(1, (1,))]

    def test_point_chart_has_rank_zero(self):
        chart = Chart(TransformChain((), SIG2), Quadrant(SIG2, (Selector.ZERO, Selector.ZERO)))
        assert [r.rank for r in refine_by_rank([chart], 1)] == [0]

    def test_chart_map_drops_zero_face(self):
        chart = Chart(TransformChain((), SIG2), Quadrant(SIG2, (Selector.POSITIVE, Selector.ZERO)))
        eta, domain = chart_map(chart)
        assert domain.signature.size == 1
        assert eta[1].is_zero


if __name__ == '__main__':
    pytest.main([__file__, '-v'])

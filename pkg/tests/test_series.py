#!/usr/bin/env python3
"""
Unit tests for series.py module
"""

import pytest
import sys
import os
from fractions import Fraction

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from exponents import SignatureError, VariableSignature, make_exponent
from series import (
    GenSeries, NormalDecomposition, NotNormal, SeriesError, Zero,
    derivative, embed, eval_gradient, is_settled, log_derivative,
    normal_decompose, product, specialize, y_regularity_order
)

SIG2 = VariableSignature.uniform(2, 0)
SIG11 = VariableSignature.uniform(1, 1)


def X(sig, k):
    return GenSeries.variable(sig, k)


class TestConstruction:
    """Tests for GenSeries construction and views"""

    def test_zero_coefficients_dropped(self):
        F = GenSeries(SIG2, {(1, 0): 0, (0, 1): 2})
        assert F.support == [make_exponent([0, 1])]

    def test_terms_canonical_order(self):
        F = GenSeries(SIG2, {(1, 0): 1, (0, 1): -1})
        assert [e for e, _ in F.items()] == [make_exponent([0, 1]), make_exponent([1, 0])]

    def test_standard_fractional_exponent_rejected(self):
        with pytest.raises(SignatureError):
            GenSeries(SIG11, {(0, Fraction(1, 2)): 1})

    def test_constant_term_and_coefficient(self):
        F = 3 + X(SIG2, 1)
        assert F.constant_term == 3
        assert F.coefficient([1, 0]) == 1
        assert F.coefficient([0, 1]) == 0

    def test_variables(self):
        F = X(SIG2, 2) * X(SIG2, 2) + 1
        assert F.variables() == [2]

    def test_str(self):
        F = X(SIG2, 1) - X(SIG2, 2)
        assert str(F) == '-X2 + X1'
        assert str(GenSeries.zero(SIG2)) == '0'


class TestArithmetic:
    """Tests for exact ring operations"""

    def test_add_cancels(self):
        F = X(SIG2, 1) - X(SIG2, 1)
        assert F.is_zero

    def test_product_expands(self):
        F = (X(SIG2, 1) - X(SIG2, 2)) ** 2
        assert F.coefficient([1, 1]) == -2
        assert F.coefficient([2, 0]) == 1
        assert F.coefficient([0, 2]) == 1

    def test_fractional_exponents_add(self):
        F = GenSeries.monomial(SIG2, [Fraction(1, 2), 0]) * GenSeries.monomial(SIG2, [Fraction(1, 3), 0])
        assert F.support == [make_exponent([Fraction(5, 6), 0])]

    def test_meet_of_radii(self):
        small = VariableSignature(2, 0, (Fraction(1, 2), 1))
        F = X(SIG2, 1) + GenSeries.variable(small, 2)
        assert F.signature.polyradius == (Fraction(1, 2), 1)

    def test_product_helper(self):
        assert product([X(SIG2, 1), X(SIG2, 2)]) == GenSeries.monomial(SIG2, [1, 1])

    def test_negative_power_rejected(self):
        with pytest.raises(SeriesError):
            X(SIG2, 1) ** -1

    def test_equality_with_scalar(self):
        assert GenSeries.constant(SIG2, 2) == 2


class TestNormalDecompose:
    """Tests for normal_decompose"""

    def test_normal_with_unit(self):
        F = X(SIG2, 1) * (1 - X(SIG2, 2))
        status = normal_decompose(F)
        assert isinstance(status, NormalDecomposition)
        assert status.monomial_exponent == make_exponent([1, 0])
        assert status.unit == 1 - X(SIG2, 2)
        assert status.constant == 1
        assert status.reconstruct() == F

    def test_not_normal_pair(self):
        status = normal_decompose(X(SIG2, 1) - X(SIG2, 2))
        assert isinstance(status, NotNormal)
        assert status.pair == (make_exponent([0, 1]), make_exponent([1, 0]))

    def test_not_normal_pair_is_lex_first(self):
        F = X(SIG2, 1) + X(SIG2, 2)
        assert normal_decompose(F).pair == (make_exponent([0, 1]), make_exponent([1, 0]))
        G = F + GenSeries.monomial(SIG2, [Fraction(1, 2), Fraction(1, 2)])
        assert normal_decompose(G).pair == (make_exponent([0, 1]), make_exponent([Fraction(1, 2), Fraction(1, 2)]))

    def test_zero(self):
        status = normal_decompose(GenSeries.zero(SIG2))
        assert isinstance(status, Zero)
        assert is_settled(status)

    def test_constant_is_normal(self):
        status = normal_decompose(GenSeries.constant(SIG2, -2))
        assert isinstance(status, NormalDecomposition)
        assert status.constant == -2

    def test_not_normal_is_not_settled(self):
        assert not is_settled(normal_decompose(X(SIG2, 1) + X(SIG2, 2)))


class TestDerivatives:
    """Tests for log-derivatives and plain derivatives"""

    def test_log_derivative(self):
        F = GenSeries.monomial(SIG2, [Fraction(3, 2), 1], 2)
        assert log_derivative(F, 1) == GenSeries.monomial(SIG2, [Fraction(3, 2), 1], 3)

    def test_derivative(self):
        F = GenSeries.monomial(SIG2, [Fraction(3, 2), 1])
        assert derivative(F, 1) == GenSeries.monomial(SIG2, [Fraction(1, 2), 1], Fraction(3, 2))

    def test_derivative_leaves_class(self):
        with pytest.raises(SeriesError):
            derivative(GenSeries.monomial(SIG2, [Fraction(1, 2), 0]), 1)

    def test_y_regularity_order(self):
        F = GenSeries(SIG11, {(0, 3): 1, (1, 1): 1})
        assert y_regularity_order(F, 1) == 3
        assert y_regularity_order(X(SIG11, 1), 1) is None


class TestEvaluation:
    """Tests for numeric evaluation"""

    def test_eval_fractional(self):
        F = GenSeries.monomial(SIG2, [Fraction(1, 2), 0]) - GenSeries.monomial(SIG2, [0, Fraction(1, 3)])
        assert F.eval_numeric([0.25, 0.125]) == pytest.approx(0.5 - 0.5)

    def test_eval_standard_negative(self):
        F = GenSeries(SIG11, {(1, 1): 1})
        assert F.eval_numeric([0.5, -0.5]) == pytest.approx(-0.25)

    def test_negative_base_rejected(self):
        with pytest.raises(SeriesError):
            X(SIG2, 1).eval_numeric([-0.1, 0.1])

    def test_outside_polydisk_rejected(self):
        with pytest.raises(SeriesError):
            X(SIG2, 1).eval_numeric([1.5, 0.1])

    def test_eval_array_matches_scalar(self):
        F = (X(SIG2, 1) - X(SIG2, 2)) ** 2 + GenSeries.monomial(SIG2, [Fraction(3, 2), 0])
        points = np.array([[0.1, 0.2], [0.7, 0.3], [0.5, 0.5]])
        expected = [F.eval_numeric(p) for p in points]
        assert F.eval_array(points) == pytest.approx(expected)

    def test_gradient(self):
        F = GenSeries.monomial(SIG2, [2, 1])
        assert eval_gradient(F, [0.5, 0.25]) == pytest.approx([2 * 0.5 * 0.25, 0.25])


class TestSpecializeAndEmbed:
    """Tests for substitution of values and lifting"""

    def test_specialize_drops_variable(self):
        F = X(SIG11, 1) * X(SIG11, 2) + X(SIG11, 2) ** 2
        G = specialize(F, {2: Fraction(1, 2)})
        assert G.signature.shape == (1, 0)
        assert G == GenSeries(VariableSignature.uniform(1, 0), {(1,): Fraction(1, 2), (0,): Fraction(1, 4)})

    def test_specialize_fractional_rejected(self):
        with pytest.raises(SeriesError):
            specialize(GenSeries.monomial(SIG2, [Fraction(1, 2), 0]), {1: Fraction(1, 2)})

    def test_embed(self):
        big = VariableSignature.uniform(4, 0)
        G = embed(X(SIG2, 1) * X(SIG2, 2) ** 2, big, [2, 4])
        assert G == GenSeries.monomial(big, [0, 1, 0, 2])


if __name__ == '__main__':
    pytest.main([__file__, '-v'])

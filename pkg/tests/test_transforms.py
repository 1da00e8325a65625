#!/usr/bin/env python3
"""
Unit tests for transforms.py module
"""

import pytest
import sys
import os
from fractions import Fraction

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from exponents import VariableSignature, make_exponent
from series import GenSeries, NormalDecomposition, normal_decompose
from transforms import (
    TransformChain, TransformError, TransformKind, apply_transform, blowup_chart_a,
    blowup_chart_b, coordinate_series, critical_variable, equalizing_blowup, face_zero,
    invert_point, invert_points, map_point, map_points, ramification, rational_power_floor,
    recenter, recenter_point, recenter_point_inverse, reflection_minus, reflection_plus,
    sign_flip, transform_from_record, translation
)

SIG2 = VariableSignature.uniform(2, 0)
SIG21 = VariableSignature.uniform(2, 1)


def X(sig, k):
    return GenSeries.variable(sig, k)


def random_series(rng, sig, terms=4):
    """Random series with small rational exponents and coefficients"""
    data = {}
    for _ in range(terms):
        e = [Fraction(int(rng.integers(0, 4)), int(rng.choice([1, 2, 3]))) for _ in range(sig.m)]
        e += [Fraction(int(rng.integers(0, 3))) for _ in range(sig.n)]
        data[tuple(e)] = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
    return GenSeries(sig, data)


def random_transform(rng, sig, allow_face=True):
    choices = ['ram', 'blowA', 'blowB', 'refl+', 'refl-', 'trans', 'flip']
    if allow_face:
        choices.append('face')
    kind = choices[int(rng.integers(0, len(choices)))]
    lam = Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 4)))
    if kind == 'ram':
        return ramification(sig, 1 + int(rng.integers(0, sig.m)), lam)
    if kind == 'blowA':
        return blowup_chart_a(sig, 1, 2, lam)
    if kind == 'blowB':
        return blowup_chart_b(sig, 2, 1, lam)
    if kind == 'refl+':
        return reflection_plus(sig, 1)
    if kind == 'refl-':
        return reflection_minus(sig, 1)
    if kind == 'trans':
        return translation(sig, 1, Fraction(int(rng.integers(-2, 3)), 5))
    if kind == 'flip':
        return sign_flip(sig, 1)
    return face_zero(sig, 1 + int(rng.integers(0, sig.size)))


class TestSources:
    """Tests for source signatures of elementary transforms"""

    def test_ramification_radius(self):
        sig = VariableSignature(1, 0, (Fraction(1, 4),))
        t = ramification(sig, 1, 2)
        assert t.source.polyradius == (Fraction(1, 2),)

    def test_rational_power_floor_inexact(self):
        r = rational_power_floor(Fraction(1, 2), Fraction(1, 2))
        assert r > 0
        assert r ** 2 <= Fraction(1, 2)

    def test_blowup_balanced_radius(self):
        sig = VariableSignature(2, 0, (Fraction(1, 2), Fraction(1, 3)))
        assert blowup_chart_a(sig, 1, 2, 1).source.polyradius == (Fraction(1, 3), 1)
        assert blowup_chart_b(sig, 1, 2, 1).source.polyradius == (1, Fraction(1, 3))
        sig = VariableSignature(2, 0, (Fraction(1, 4), Fraction(1, 2)))
        assert blowup_chart_a(sig, 1, 2, Fraction(1, 2)).source.polyradius == (Fraction(1, 4), 1)
        assert blowup_chart_b(sig, 1, 2, Fraction(1, 2)).source.polyradius == (1, Fraction(1, 2))

    def test_blowup_unit_radius_unchanged(self):
        for t in (blowup_chart_a(SIG2, 1, 2, Fraction(3, 2)), blowup_chart_b(SIG2, 1, 2, Fraction(2, 3))):
            assert t.source.polyradius == (1, 1)

    @pytest.mark.parametrize('lam', [Fraction(1), Fraction(1, 2), Fraction(3, 2), Fraction(2, 3)])
    def test_blowup_images_stay_in_target(self, lam):
        sig = VariableSignature(2, 0, (Fraction(1, 2), Fraction(1, 3)))
        bound = np.array([0.5, 1 / 3]) * (1 + 1e-12)
        rng = np.random.default_rng(7)
        for t in (blowup_chart_a(sig, 1, 2, lam), blowup_chart_b(sig, 1, 2, lam)):
            radius = np.array([float(r) for r in t.source.polyradius])
            Q = map_points(t, rng.uniform(0.0, 1.0, size=(1000, 2)) * radius)
            assert np.all(Q >= 0)
            assert np.all(Q < bound)

    def test_reflection_moves_variable(self):
        sig = VariableSignature(1, 2, (1, Fraction(1, 2), Fraction(1, 3)))
        t = reflection_plus(sig, 2)
        assert t.source.shape == (2, 1)
        assert t.source.polyradius == (1, Fraction(1, 3), Fraction(1, 2))

    def test_translation_shrinks(self):
        t = translation(SIG21, 1, Fraction(-1, 4))
        assert t.source.polyradius == (1, 1, Fraction(3, 4))

    def test_translation_leaving_polydisk(self):
        with pytest.raises(TransformError):
            translation(SIG21, 1, 1)

    def test_face_zero_drops_variable(self):
        t = face_zero(SIG21, 3)
        assert t.source.shape == (2, 0)

    def test_invalid_indices(self):
        with pytest.raises(TransformError):
            blowup_chart_a(SIG21, 1, 3, 1)
        with pytest.raises(TransformError):
            reflection_plus(SIG2, 1)
        with pytest.raises(TransformError):
            blowup_chart_a(SIG2, 1, 1, 1)


class TestPullBack:
    """Tests for the substitution homomorphism"""

    def test_chart_a_normalizes_difference(self):
        F = X(SIG2, 1) - X(SIG2, 2)
        G = apply_transform(F, blowup_chart_a(SIG2, 1, 2, 1))
        assert G == X(SIG2, 1) * (1 - X(SIG2, 2))

    def test_chart_b_normalizes_difference(self):
        F = X(SIG2, 1) - X(SIG2, 2)
        G = apply_transform(F, blowup_chart_b(SIG2, 1, 2, 1))
        assert G == X(SIG2, 2) * (X(SIG2, 1) - 1)

    def test_fractional_weights(self):
        F = GenSeries.monomial(SIG2, [Fraction(1, 2), 0]) - GenSeries.monomial(SIG2, [0, Fraction(1, 3)])
        i, j, lam = equalizing_blowup(make_exponent([Fraction(1, 2), 0]), make_exponent([0, Fraction(1, 3)]))
        assert (i, j, lam) == (1, 2, Fraction(3, 2))
        G = apply_transform(F, blowup_chart_a(SIG2, i, j, lam))
        status = normal_decompose(G)
        assert isinstance(status, NormalDecomposition)
        assert status.monomial_exponent == make_exponent([Fraction(1, 2), 0])

    def test_reflection_minus_sign(self):
        sig = VariableSignature.uniform(0, 1)
        F = GenSeries(sig, {(3,): 1, (2,): 1})
        G = apply_transform(F, reflection_minus(sig, 1))
        target = VariableSignature.uniform(1, 0)
        assert G == GenSeries(target, {(3,): -1, (2,): 1})

    def test_translation_binomial(self):
        sig = VariableSignature.uniform(0, 1)
        G = apply_transform(GenSeries(sig, {(2,): 1}), translation(sig, 1, Fraction(1, 2)))
        assert G == GenSeries(G.signature, {(2,): 1, (1,): 1, (0,): Fraction(1, 4)})

    def test_face_zero_kills_terms(self):
        F = X(SIG2, 1) + X(SIG2, 2) ** 2
        G = apply_transform(F, face_zero(SIG2, 1))
        assert G == GenSeries.monomial(G.signature, [2])

    def test_mismatched_signature(self):
        with pytest.raises(TransformError):
            apply_transform(X(SIG21, 1), blowup_chart_a(SIG2, 1, 2, 1))

    def test_homomorphism_randomized(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            F, G = random_series(rng, SIG21), random_series(rng, SIG21)
            t = random_transform(rng, SIG21)
            assert apply_transform(F + G, t) == apply_transform(F, t) + apply_transform(G, t)
            assert apply_transform(F * G, t) == apply_transform(F, t) * apply_transform(G, t)

    def test_injective_without_faces(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            F = random_series(rng, SIG21)
            t = random_transform(rng, SIG21, allow_face=False)
            if not F.is_zero:
                assert not apply_transform(F, t).is_zero


class TestChains:
    """Tests for chains and pointwise action"""

    def test_chain_composition_checked(self):
        a = blowup_chart_a(SIG2, 1, 2, 1)
        b = blowup_chart_a(SIG21, 1, 2, 1)
        with pytest.raises(TransformError):
            TransformChain([a, b])

    def test_empty_chain_needs_base(self):
        with pytest.raises(TransformError):
            TransformChain([])
        assert str(TransformChain([], SIG2)) == 'id'

    def test_coordinate_series(self):
        chain = TransformChain([blowup_chart_a(SIG2, 1, 2, 2)])
        assert coordinate_series(chain) == [X(SIG2, 1), GenSeries.monomial(SIG2, [2, 1])]

    def test_eval_commutes_with_push(self):
        rng = np.random.default_rng(3)
        t1 = reflection_minus(SIG21, 1)
        t2 = blowup_chart_b(t1.source, 1, 3, Fraction(2, 3))
        chain = TransformChain([t1, t2])
        F = random_series(rng, SIG21, terms=6)
        pulled = apply_transform(F, chain)
        P = rng.uniform(0.05, 0.95, size=(100, chain.source.size))
        values = F.eval_array(map_points(chain, P))
        assert pulled.eval_array(P) == pytest.approx(values, rel=1e-9, abs=1e-9)

    def test_invert_points(self):
        chain = TransformChain([blowup_chart_a(SIG2, 1, 2, 1)])
        P = np.array([[0.5, 0.5], [0.25, 0.75]])
        X_ = map_points(chain, P)
        back, ok = invert_points(chain, X_)
        assert ok.all()
        assert back == pytest.approx(P)

    def test_invert_outside_image(self):
        chain = TransformChain([blowup_chart_a(SIG2, 1, 2, 1)])
        assert invert_point(chain, [0.25, 0.5]) is None

    def test_map_point_domain(self):
        with pytest.raises(TransformError):
            map_point(blowup_chart_a(SIG2, 1, 2, 1), [1.5, 0.5])


class TestBookkeeping:
    """Tests for critical variables, records and recentering"""

    def test_critical_variable(self):
        assert critical_variable(blowup_chart_a(SIG2, 1, 2, 1)) == 1
        assert critical_variable(blowup_chart_b(SIG2, 1, 2, 1)) == 2
        assert critical_variable(ramification(SIG2, 1, 2)) is None

    def test_record(self):
        t = blowup_chart_b(SIG2, 1, 2, Fraction(3, 2))
        record = t.to_record()
        assert record == {'kind': 'BlowupChartB', 'i': 1, 'j': 2, 'lambda': '3/2'}
        assert transform_from_record(record, SIG2) == t

    def test_kind_values(self):
        assert TransformKind('ReflectionPlus') == TransformKind.REFLECTION_PLUS

    def test_recenter_pulls_back(self):
        chain = recenter([Fraction(1, 2), 0], [1, -1])
        F = GenSeries(chain.target, {(1, 1): 1})
        G = apply_transform(F, chain)
        # (1/2 + y1)(-y2)
        assert G == GenSeries(chain.source, {(1, 1): -1, (0, 1): Fraction(-1, 2)})
        assert chain.source.polyradius == (1, 1)

    def test_recenter_points(self):
        a, s = [0.5, -0.25], [1, -1]
        y = recenter_point(a, s, [0.75, 0.0])
        assert y == pytest.approx((0.25, -0.25))
        assert recenter_point_inverse(a, s, y) == pytest.approx((0.75, 0.0))


if __name__ == '__main__':
    pytest.main([__file__, '-v'])

"""Operator algebra: application, expectations, translation, moments."""
from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from steinforge.catalog import catalog, noncentral_chi2_operator, quadratic_operator
from steinforge.gaussian import hermite, pushforward_moment
from steinforge.operators import (DiffOperator, InsufficientSeeds,
                                  RecursionNotClosed, expectation_applied,
                                  moment_recursion, normalize_operator,
                                  proportional_eq, translate_operator)
from steinforge.poly import Polynomial

H3 = hermite(3)
H4 = hermite(4)
H3_OP = catalog("h3").operator
H4_OP = catalog("h4").operator


class TestApply:
    def test_h3_operator_on_x(self):
        assert H3_OP.apply(Polynomial.x()) == Polynomial([6, 0, -1])

    def test_h4_operator_on_x(self):
        assert H4_OP.apply(Polynomial.x()) == Polynomial([24, 44, -1])

    def test_zero_function(self):
        assert H3_OP.apply(Polynomial.zero()).is_zero

    @settings(deadline=None, max_examples=30)
    @given(st.lists(st.integers(-5, 5), min_size=0, max_size=5).map(Polynomial),
           st.lists(st.integers(-5, 5), min_size=0, max_size=5).map(Polynomial))
    def test_linearity(self, f, g):
        assert H4_OP.apply(f + g) == H4_OP.apply(f) + H4_OP.apply(g)
        assert H4_OP.apply(3 * f) == 3 * H4_OP.apply(f)


class TestExpectationApplied:
    def test_h3_on_x(self):
        assert expectation_applied(H3_OP, H3, Polynomial.x()) == 0

    def test_h4_on_x_squared(self):
        assert expectation_applied(H4_OP, H4, Polynomial([0, 0, 1])) == 0

    def test_h3_on_x_cubed(self):
        # E[W^4] = 3348 for W = H3(Z), via the direct expansion oracle
        assert pushforward_moment(H3, 4) == 3348
        assert expectation_applied(H3_OP, H3, Polynomial([0, 0, 0, 1])) == 0

    def test_detects_wrong_operator(self):
        flipped = DiffOperator.from_rows([[0, 1], [1]])  # f' + x f
        residual = expectation_applied(flipped, Polynomial.x(), Polynomial.x())
        assert abs(residual) == 2


class TestTranslate:
    def test_quadratic_family_translation(self):
        assert translate_operator(quadratic_operator(1, 0, 0), Fraction(5)) \
            == quadratic_operator(1, 0, 5)

    def test_translate_by_zero(self):
        assert translate_operator(H3_OP, 0) == H3_OP

    def test_roundtrip(self):
        c = Fraction(3, 7)
        assert translate_operator(translate_operator(H4_OP, c), -c) == H4_OP

    def test_translated_chi2_consistency(self):
        # moving the squared-Gaussian operator down by 1 lands on the
        # centered-chi-square one, up to the operator acting on f'
        shifted = translate_operator(noncentral_chi2_operator(1, 0), -1)
        centered = catalog("centered-chi2").operator
        assert shifted + centered == centered.compose_derivative(1).scaled(2)
        # both annihilate W = Z^2 - 1 symbolically
        P = Polynomial([-1, 0, 1])
        for n in range(12):
            assert expectation_applied(shifted, P, Polynomial.monomial(n)) == 0


class TestNormalize:
    def test_scaling_removed(self):
        op = catalog("normal").operator.scaled(2)
        assert normalize_operator(op) == catalog("normal").operator

    def test_fractions_cleared(self):
        op = catalog("h4").operator.scaled(Fraction(5, 3))
        assert normalize_operator(op) == catalog("h4").operator

    def test_proportional_examples(self):
        equal, ratio = proportional_eq(H3_OP, H3_OP.scaled(Fraction(-2, 9)))
        assert equal and ratio == Fraction(-9, 2)
        equal, _ = proportional_eq(catalog("normal").operator,
                                   catalog("centered-chi2").operator)
        assert not equal

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            normalize_operator(DiffOperator(()))
        with pytest.raises(ValueError):
            proportional_eq(DiffOperator(()), H3_OP)

    def test_idempotent_and_equivalence(self):
        for op in (H3_OP, H4_OP, quadratic_operator(1, 2, 1)):
            assert normalize_operator(normalize_operator(op)) == normalize_operator(op)
        a, b, c = H3_OP, H3_OP.scaled(3), H3_OP.scaled(Fraction(-1, 2))
        assert proportional_eq(a, b)[0] and proportional_eq(b, c)[0]
        assert proportional_eq(a, c)[0]


class TestMomentRecursion:
    def test_normal(self):
        mus = moment_recursion(catalog("normal").operator, [1, 0], 8)
        assert mus == [1, 0, 1, 0, 3, 0, 15, 0, 105]

    def test_h3_anchors(self):
        mus = moment_recursion(H3_OP, [1, 0], 4)
        assert mus[2] == 6 and mus[4] == 3348
        assert mus[2] == pushforward_moment(H3, 2)
        assert mus[4] == pushforward_moment(H3, 4)

    def test_h4_anchors(self):
        mus = moment_recursion(H4_OP, [1, 0], 3)
        assert mus[2] == 24 and mus[3] == 1728
        assert mus[3] == pushforward_moment(H4, 3)

    @pytest.mark.parametrize("op,P", [(H3_OP, H3), (H4_OP, H4)])
    def test_matches_pushforward_to_degree_12(self, op, P):
        mus = moment_recursion(op, [1, 0], 12)
        for d in range(13):
            assert mus[d] == pushforward_moment(P, d)

    def test_noncentral_moments(self):
        op = noncentral_chi2_operator(3, 2)
        mus = moment_recursion(op, [1], 2)
        assert mus[1] == 5            # k + lam
        assert mus[2] - mus[1] ** 2 == 14  # 2(k + 2 lam)

    def test_recursion_not_closed(self):
        with pytest.raises(RecursionNotClosed):
            moment_recursion(DiffOperator.from_rows([[], [1]]), [1], 4)
        # an order-1 coefficient reaching degree deg(p0)+1 breaks dominance
        bad = DiffOperator.from_rows([[0, -1], [0, 0, 1]])
        with pytest.raises(RecursionNotClosed):
            moment_recursion(bad, [1, 0], 4)

    def test_insufficient_seeds(self):
        with pytest.raises(InsufficientSeeds):
            moment_recursion(H3_OP, [], 4)

    def test_contradictory_seed_detected(self):
        with pytest.raises(ValueError):
            moment_recursion(H3_OP, [1, 0, 5], 4)  # mu_2 must be 6


def test_latex_generic_emitter():
    assert catalog("normal").operator.latex() == "f'(x)-xf(x)"
    assert H3_OP.latex() == ("(-486x^{2}+1944)f^{(5)}(x)-486xf^{(4)}(x)"
                             "+(27x^{2}-216)f^{(3)}(x)+99xf''(x)+6f'(x)-xf(x)")


def test_operator_json_roundtrip():
    d = H4_OP.to_dict()
    assert d["order"] == 3
    assert DiffOperator.from_dict(d) == H4_OP

from fractions import Fraction

import numpy as np
import pytest

from petersson_lab.arch_coeff import (
    CoeffParams,
    GspRealElement,
    central_character_sign,
    degen_abs_n2,
    degen_terms,
    formal_degree,
    formal_degree_constant,
    hc_decompose,
    hc_formal_degree_ratio,
    hc_matrix_coeff,
    integrability_predicate,
    lemma_sn_sides,
    lp_norm_closed,
    lp_norm_quadrature_n2,
    matrix_coeff,
    matrix_coeff_abs,
    random_compact,
    random_gsp_real,
)
from petersson_lab.errors import DivergentIntegral, NotSymplectic, UnsupportedRegime


class TestFormalDegree:
    def test_constant(self):
        assert formal_degree_constant(2) == Fraction(1, 128)

    def test_value(self):
        assert formal_degree(10, 2) == Fraction(153, 4)

    def test_divergent(self):
        with pytest.raises(DivergentIntegral):
            formal_degree(4, 2)

    @pytest.mark.parametrize("kappa", range(5, 15))
    def test_inverse_of_l2_norm(self, kappa):
        assert formal_degree(kappa, 2) * lp_norm_closed(kappa, 2, 2) == 1

    def test_proportional_to_harish_chandra_product(self):
        ratios = {formal_degree(k, 2) / hc_formal_degree_ratio(k, 2) for k in range(5, 15)}
        assert len(ratios) == 1

    def test_custom_constant(self):
        assert formal_degree(10, 2, Fraction(1)) == 18 * 17 * 16


class TestLpNorm:
    def test_closed_form(self):
        assert lp_norm_closed(10, 2, 2) == Fraction(4, 153)

    def test_divergent(self):
        with pytest.raises(DivergentIntegral):
            lp_norm_closed(3, 1, 2)

    def test_quadrature_matches_closed_form(self):
        value = lp_norm_quadrature_n2(10, 2, rtol=1e-6)
        assert value == pytest.approx(4 / 153, rel=1e-4)


class TestAlternatingSumIdentity:
    def test_two_variables(self):
        lhs, rhs = lemma_sn_sides([1, 2])
        assert lhs == rhs == Fraction(1, 6)

    def test_random_rationals(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(1, 5))
            bs = [Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 7))) for _ in range(n)]
            lhs, rhs = lemma_sn_sides(bs)
            assert lhs == rhs

    def test_zero_partial_sum(self):
        with pytest.raises(ValueError):
            lemma_sn_sides([1, -1])


def test_eight_square_identity_exact():
    rng = np.random.default_rng(5)
    for _ in range(100):
        rows = rng.integers(-9, 10, size=(4, 4)).tolist()
        first, second, X = degen_terms(rows)
        assert first * second == sum(x * x for x in X)


def test_eight_square_rejects_wrong_shape():
    with pytest.raises(ValueError):
        degen_terms([[1, 0], [0, 1]])


class TestMatrixCoefficient:
    def test_identity_is_one(self):
        g = GspRealElement(np.eye(4))
        assert matrix_coeff(g, CoeffParams(2, 10)) == pytest.approx(1.0)

    def test_abs_agrees(self):
        rng = np.random.default_rng(7)
        params = CoeffParams(2, 10)
        for _ in range(10):
            g = random_gsp_real(2, rng)
            assert abs(matrix_coeff(g, params)) == pytest.approx(matrix_coeff_abs(g, params), rel=1e-8)

    def test_degen_exact_and_bound(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            g = random_gsp_real(2, rng)
            exact, bound = degen_abs_n2(g, 10)
            assert exact == pytest.approx(matrix_coeff_abs(g, CoeffParams(2, 10)), rel=1e-8)
            assert exact <= bound * (1 + 1e-12)

    def test_negative_similitude_vanishes(self):
        g = random_gsp_real(2, np.random.default_rng(9), negative=True)
        assert g.r < 0
        assert matrix_coeff(g, CoeffParams(2, 10)) == 0

    def test_compact_elements_have_modulus_one(self):
        rng = np.random.default_rng(10)
        for _ in range(5):
            k = random_compact(2, rng)
            assert abs(matrix_coeff(k, CoeffParams(2, 7))) == pytest.approx(1.0)

    def test_central_character(self):
        rng = np.random.default_rng(11)
        g = random_gsp_real(2, rng)
        params = CoeffParams(2, 9)
        for z in (2.0, -0.5):
            expected = central_character_sign(z, 9, 2) * matrix_coeff(g, params)
            assert matrix_coeff(g.scaled(z), params) == pytest.approx(expected, rel=1e-8)

    def test_harish_chandra_agrees(self):
        rng = np.random.default_rng(12)
        params = CoeffParams(2, 8)
        for _ in range(5):
            g = random_gsp_real(2, rng, scale=1.0)
            hc_decompose(g)
            assert hc_matrix_coeff(g, params) == pytest.approx(matrix_coeff(g, params), rel=1e-7)


def test_not_symplectic():
    with pytest.raises(NotSymplectic):
        GspRealElement(np.diag([1.0, 2.0, 1.0, 1.0]))


def test_central_character_sign():
    assert central_character_sign(-1.0, 3, 1) == -1
    assert central_character_sign(-1.0, 3, 2) == 1
    with pytest.raises(ValueError):
        central_character_sign(0.0, 3, 1)


class TestIntegrability:
    def test_threshold(self):
        assert integrability_predicate(5, 2)
        assert not integrability_predicate(4, 2)
        assert not integrability_predicate(3, 2)

    def test_not_discrete_series(self):
        with pytest.raises(UnsupportedRegime):
            integrability_predicate(2, 2)

from fractions import Fraction

import numpy as np
import pytest
import sympy

from petersson_lab.errors import NotSymplectic
from petersson_lab.padic_cartan import (
    INF,
    classify_coset,
    lambda_matrix,
    minor_valuation,
    p_adic_valuation,
    random_integral_symplectic,
    similitude,
    smith_normal_form,
)
from petersson_lab.root_data import Coweight, dominant_coweights


def test_p_adic_valuation():
    assert p_adic_valuation(12, 2) == 2
    assert p_adic_valuation(Fraction(1, 9), 3) == -2
    assert p_adic_valuation(7, 5) == 0
    assert p_adic_valuation(0, 3) is INF


def test_infinity_ordering():
    assert INF > 10**9
    assert not INF < 0
    assert INF + 3 is INF


class TestSmithNormalForm:
    def test_small_example(self):
        snf = smith_normal_form(sympy.Matrix([[2, 4], [6, 8]]))
        assert snf.diagonal == (2, 4)
        assert snf.U * snf.D * snf.V == sympy.Matrix([[2, 4], [6, 8]])
        assert abs(snf.U.det()) == 1 and abs(snf.V.det()) == 1

    def test_divisibility_chain(self):
        A = sympy.Matrix([[6, 10, 4], [2, 8, 14], [0, 4, 9]])
        d = smith_normal_form(A).diagonal
        assert d[1] % d[0] == 0 and d[2] % d[1] == 0
        assert abs(A.det()) == d[0] * d[1] * d[2]

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            smith_normal_form(sympy.Matrix([[1, 2], [2, 4]]))


def test_lambda_matrix_similitude():
    g = lambda_matrix(Coweight((2, 0, 1)), 3)
    assert g == sympy.diag(1, 3, 9, 3)
    assert similitude(g) == 9


def test_minor_valuation():
    g = sympy.diag(1, 3, 9, 3)
    assert minor_valuation(g, 1, 3) == 0
    assert minor_valuation(g, 2, 3) == 1
    with pytest.raises(ValueError):
        minor_valuation(g, 5, 3)


def test_not_symplectic():
    with pytest.raises(NotSymplectic):
        similitude(sympy.diag(1, 2, 1, 1))


def test_similitude_not_p_power():
    with pytest.raises(NotSymplectic):
        classify_coset(2 * sympy.eye(4), 3)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_classify_lambda_matrix_itself(p):
    for lam in dominant_coweights(2, 4):
        label = classify_coset(lambda_matrix(lam, p), p)
        assert label.lam == lam
        assert label.r_exponent == lam.l0


def test_classify_with_denominator():
    lam = Coweight((2, 0, 1))
    label = classify_coset(3 * lambda_matrix(lam, 3), 3, denom_exp=1)
    assert label.lam == lam
    assert label.r_exponent == 2


def test_random_symplectic_has_similitude_one():
    for seed in range(5):
        g = random_integral_symplectic(2, seed, 6)
        assert similitude(g) == 1


def test_classification_is_double_coset_invariant():
    """k₁λ(p)k₂ は λ に分類される"""
    rng = np.random.default_rng(42)
    lams = dominant_coweights(2, 3)
    for i in range(30):
        p = (2, 3)[i % 2]
        lam = lams[int(rng.integers(len(lams)))]
        k1 = random_integral_symplectic(2, rng, 5)
        k2 = random_integral_symplectic(2, rng, 5)
        assert classify_coset(k1 * lambda_matrix(lam, p) * k2, p).lam == lam

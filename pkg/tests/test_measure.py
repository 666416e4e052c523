from fractions import Fraction

import numpy as np
import pytest

from petersson_lab.errors import InvariantViolation
from petersson_lab.measure import (
    LaurentElement,
    L_of_F,
    MeasureExpansion,
    TorusPoint,
    char_eval,
    char_values,
    density_samples,
    dimension_check,
    gram_matrix,
    kato_lusztig_expand,
    kl_inverse,
    kl_poly,
    kl_table,
    kostant_phat,
    measure_expansion,
    sato_tate_moments,
    tail_bound,
    weyl_character,
)
from petersson_lab.root_data import Coweight, dominant_coweights, leq, weyl_dimension


class TestLaurentElement:
    def test_zero_coefficients_dropped(self):
        x = LaurentElement(2, {(1, 1): 1, (-1, -1): 0})
        assert len(x) == 1

    def test_exact_divide(self):
        a = LaurentElement(1, {(2,): 1, (0,): -1})
        b = LaurentElement(1, {(1,): 1, (0,): -1})
        assert a.exact_divide(b) == LaurentElement(1, {(1,): 1, (0,): 1})

    def test_exact_divide_remainder(self):
        a = LaurentElement(1, {(2,): 1, (0,): 1})
        b = LaurentElement(1, {(1,): 1, (0,): -1})
        with pytest.raises(InvariantViolation):
            a.exact_divide(b)

    def test_json(self):
        x = weyl_character(Coweight((2, 0, 1)))
        assert LaurentElement.from_json(x.to_json()) == x

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            LaurentElement(2, {(1,): 1})


def test_torus_point_requires_unit_modulus():
    with pytest.raises(ValueError):
        TorusPoint((2.0, 1.0))


class TestWeylCharacter:
    def test_spin_representation(self):
        char = weyl_character(Coweight((1, 0, 0)))
        assert len(char) == 4
        assert char.is_weyl_symmetric()

    @pytest.mark.parametrize("lam", dominant_coweights(2, 4))
    def test_dimension(self, lam):
        assert dimension_check(lam)
        assert sum(weyl_character(lam).coeffs.values()) == weyl_dimension(lam)

    def test_non_dominant_rejected(self):
        with pytest.raises(ValueError):
            weyl_character(Coweight((2, 0, 2)))

    def test_ratio_matches_polynomial(self):
        rng = np.random.default_rng(1)
        lam = Coweight((2, 0, 0))
        for _ in range(5):
            angles = rng.uniform(0, 2 * np.pi, size=2)
            t = TorusPoint.from_angles(angles)
            assert char_eval(lam, t) == pytest.approx(complex(char_values(lam, angles)), abs=1e-9)


class TestSatoTate:
    def test_orthonormal(self):
        lams = dominant_coweights(2, 3)
        gram = gram_matrix(lams, grid=32)
        assert np.allclose(gram, np.eye(len(lams)), atol=1e-10)

    def test_moments(self):
        assert sato_tate_moments(Coweight.zero(2), grid=16) == pytest.approx(1.0)
        assert abs(sato_tate_moments(Coweight((2, 0, 1)), grid=16)) < 1e-10


class TestKazhdanLusztig:
    def test_diagonal_is_one(self):
        for lam in dominant_coweights(2, 4):
            assert kl_poly(lam, lam, 3) == 1

    def test_requires_order(self):
        with pytest.raises(ValueError):
            kl_poly(Coweight((2, 0, 0)), Coweight.zero(2), 3)

    def test_table_rows_are_dominant_below(self):
        rows = kl_table(Coweight((2, 0, 0)), 5)
        assert [row.mu for row in rows] == [Coweight((0, 0, 0)), Coweight((2, 0, 0)), Coweight((2, 0, 1))]

    def test_kostant_at_zero(self):
        assert kostant_phat(Coweight.zero(2), 3) == 1

    def test_zero_expands_to_itself(self):
        assert kato_lusztig_expand(Coweight.zero(2), 7) == {Coweight.zero(2): 1.0}

    @pytest.mark.parametrize("p", [3, 5])
    def test_inverse(self, p):
        """K⁻¹·K が単位行列になる"""
        inverse = kl_inverse([Coweight((4, 0, 2))], p)
        order = list(inverse)
        for lam in order:
            for nu in order:
                acc = sum(
                    (c * kl_poly(nu, mu, p) for mu, c in inverse[lam].items() if leq(nu, mu)),
                    start=Fraction(0),
                )
                assert acc == (1 if nu == lam else 0)


class _FixedCache:
    """常に同じ値を返す LValueCache の代用"""

    def __init__(self, value):
        self.value = value
        self.calls = 0

    def get(self, sigma, spec, kappa):
        self.calls += 1
        return self.value

    def put(self, sigma, spec, kappa, value):
        raise AssertionError("キャッシュにヒットしたのに put が呼ばれました")


class TestLOfF:
    def test_zero_is_one(self, sigma_id):
        assert L_of_F({3: Coweight.zero(2)}, sigma_id) == pytest.approx(1.0, abs=1e-12)

    def test_no_solutions_is_zero(self, sigma_id):
        # r = 3 では ᵗAA = 3 の解がない
        assert L_of_F({3: Coweight((1, 0, 0))}, sigma_id) == 0.0

    def test_uses_cache(self, sigma_hex):
        lam = Coweight((1, 0, 0))
        cache = _FixedCache(Fraction(1, 2))
        value = L_of_F({3: lam}, sigma_hex, cache=cache)
        assert value == pytest.approx(0.5 * sum(kato_lusztig_expand(lam, 3).values()))
        assert cache.calls == 1


def test_tail_bound_decreasing():
    values = [tail_bound(3, L) for L in (2, 6, 12)]
    assert values[0] > values[1] > values[2] > 0


class TestMeasureExpansion:
    def test_constant_term_must_be_one(self, sigma_id):
        with pytest.raises(InvariantViolation):
            MeasureExpansion(sigma_id, 10, (3,), 0, {(Coweight.zero(2),): 0.5}, 0.0)

    def test_truncation_zero_is_flat(self, sigma_id):
        samples = density_samples(sigma_id, 10, [3], truncation=0, grid=8)
        assert samples.max_deviation == pytest.approx(0.0)
        assert samples.total_mass() == pytest.approx(1.0)

    def test_no_primes(self, sigma_id):
        samples = density_samples(sigma_id, 10, [], truncation=2, grid=4)
        assert np.all(samples.density == 1.0)

    def test_expansion_keys(self, sigma_id):
        expansion = measure_expansion(sigma_id, 10, [3], 2)
        assert set(expansion.coeffs) == {(lam,) for lam in dominant_coweights(2, 2)}
        assert expansion.coeffs[(Coweight.zero(2),)] == 1.0

    def test_density_has_unit_mass(self, sigma_id):
        """定数項以外は μ_ST について平均 0 なので全質量は 1"""
        samples = density_samples(sigma_id, 10, [3], truncation=2, grid=16)
        assert samples.max_imag < 1e-9
        assert samples.total_mass() == pytest.approx(1.0, abs=1e-9)
        rows = samples.rows()
        assert len(rows) == 16**2
        assert set(rows[0]) == {"theta_0_0", "theta_0_1", "density", "tail_bound"}

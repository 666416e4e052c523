from fractions import Fraction

import pytest
import sympy

from petersson_lab.errors import InvariantViolation, NotCovered, UnsupportedRegime
from petersson_lab.local_gsp4 import (
    DiagData,
    LocalSpec,
    admissible_triples,
    root_count_bound,
    equal_exponent_sum,
    offset_sum,
    offset_sum_relaxed,
    conj_bound_check,
    forms_for_prime,
    local_integral,
    local_integral_explicit,
    local_integral_oracle,
    ramanujan_sum,
    reduce_to_diagonal,
    shift_invariant_vanishing,
    sweep,
    trivial_bound,
)
from petersson_lab.quadform import HalfIntegralSymMat
from petersson_lab.root_data import Coweight


class TestRamanujanSum:
    def test_values(self):
        assert ramanujan_sum(0, 3, 2) == 6
        assert ramanujan_sum(3, 3, 2) == -3
        assert ramanujan_sum(1, 3, 2) == 0
        assert ramanujan_sum(5, 5, 1) == 4

    def test_m_zero_rejected(self):
        with pytest.raises(ValueError):
            ramanujan_sum(1, 3, 0)


class TestLocalSpec:
    def test_from_coweight(self):
        spec = LocalSpec.from_coweight(Coweight((4, 0, 2)), 3)
        assert (spec.p, spec.tau, spec.t) == (3, 4, 2)
        assert spec.lam == Coweight((4, 0, 2))

    def test_invalid_t(self):
        with pytest.raises(ValueError):
            LocalSpec(p=3, tau=2, t=2)

    def test_non_prime(self):
        with pytest.raises(ValueError):
            LocalSpec(p=9, tau=2, t=0)

    def test_rank_three_unsupported(self):
        with pytest.raises(UnsupportedRegime):
            LocalSpec.from_coweight(Coweight((2, 0, 0, 1)), 3)


def test_diag_data_requires_ordered_exponents(sigma_id):
    with pytest.raises(InvariantViolation):
        DiagData(alpha=2, beta=1, sigma_u=sigma_id)


class TestExplicitDispatch:
    @pytest.mark.parametrize(
        "tau, t, alpha, beta, provenance",
        [
            (0, 0, 0, 0, "unramified"),
            (4, 1, 1, 2, "det-order-vanish"),
            (4, 2, 0, 4, "support-vanish"),
            (4, 0, 1, 3, "shift-a-vanish"),
            (5, 2, 2, 3, "gap1-vanish"),
            (6, 3, 2, 4, "gap2-vanish"),
            (4, 2, 2, 2, "equal-sum"),
            (4, 1, 2, 2, "offset-sum"),
        ],
    )
    def test_provenance(self, make_local, tau, t, alpha, beta, provenance):
        spec, d = make_local(3, tau, t, alpha, beta)
        result = local_integral_explicit(spec, d)
        assert result.provenance == provenance

    def test_vanishing_cases_are_zero(self, make_local):
        for args in [(4, 1, 1, 2), (4, 2, 0, 4), (4, 0, 1, 3), (5, 2, 2, 3), (6, 3, 2, 4)]:
            spec, d = make_local(3, *args)
            assert local_integral_explicit(spec, d).value == 0

    def test_unramified_is_one(self, make_local):
        spec, d = make_local(5, 0, 0, 0, 0)
        assert local_integral_explicit(spec, d).value == 1

    def test_not_covered_returned(self, make_local):
        spec, d = make_local(3, 2, 1, 1, 1)
        result = local_integral_explicit(spec, d)
        assert isinstance(result, NotCovered)
        assert result.reason

    def test_not_covered_raised_on_request(self, make_local):
        spec, d = make_local(3, 2, 1, 1, 1)
        with pytest.raises(NotCovered):
            local_integral_explicit(spec, d, require_explicit=True)

    def test_p_dividing_4det_unsupported(self):
        sigma = HalfIntegralSymMat.from_abc(3, 1, 1)  # 4detσ = 11
        spec = LocalSpec(p=11, tau=2, t=1)
        with pytest.raises(UnsupportedRegime):
            local_integral_explicit(spec, DiagData(alpha=1, beta=1, sigma_u=sigma))

    def test_p_two_unsupported(self, make_local):
        spec, d = make_local(2, 2, 1, 1, 1)
        with pytest.raises(UnsupportedRegime):
            local_integral_explicit(spec, d)


def test_offset_sum_is_relaxed_minus_equal_sum(make_local):
    spec3, d = make_local(5, 4, 2, 2, 2, HalfIntegralSymMat.from_abc(1, 1, 2))
    spec4 = LocalSpec(p=5, tau=4, t=1)
    assert offset_sum(spec4, d) == offset_sum_relaxed(spec4, d) - equal_exponent_sum(spec3, d)


class TestOracle:
    def test_matches_explicit_equal_sum(self, make_local):
        spec, d = make_local(3, 4, 2, 2, 2, HalfIntegralSymMat.from_abc(2, 1, 3))
        assert local_integral_oracle(spec, d).value == equal_exponent_sum(spec, d)

    @pytest.mark.parametrize("tau", range(5))
    def test_independent_of_margin(self, tau):
        """格子を 1 段細かくしても値が変わらない（p=3, 全ての (t, α, β) と σ_U）"""
        for t, alpha, beta in admissible_triples(tau):
            for sigma_u in forms_for_prime(3):
                spec = LocalSpec(p=3, tau=tau, t=t)
                d = DiagData(alpha=alpha, beta=beta, sigma_u=sigma_u)
                coarse = local_integral_oracle(spec, d, 0).value
                assert coarse == local_integral_oracle(spec, d, 1).value, (spec, d)

    def test_unequal_det_order_zero_is_reported(self, make_local):
        spec, d = make_local(3, 4, 1, 1, 2)
        value = local_integral_oracle(spec, d)
        assert value.value == 0
        assert value.provenance == "oracle"
        assert value.detail == "α+β ≠ τ"

    def test_full_and_valuation_modes_agree(self, make_local):
        spec, d = make_local(3, 4, 2, 2, 2)
        full = local_integral_oracle(spec, d, full=True).value
        compact = local_integral_oracle(spec, d, full=False).value
        assert full == compact

    def test_feasibility_limit(self, make_local):
        spec, d = make_local(3, 4, 2, 2, 2)
        with pytest.raises(UnsupportedRegime):
            local_integral_oracle(spec, d, max_cells=10)

    def test_falls_back_when_not_covered(self, make_local):
        spec, d = make_local(3, 2, 1, 1, 1)
        assert local_integral(spec, d).provenance == "oracle"


def test_reduce_to_diagonal(sigma_id):
    d = reduce_to_diagonal(sympy.Matrix([[3, 0], [0, 3]]), sigma_id, 3, 2)
    assert (d.alpha, d.beta) == (1, 1)
    assert d.sigma_u.det == sigma_id.det


def test_bounds_and_triples(make_local):
    spec, d = make_local(3, 4, 2, 2, 2)
    assert trivial_bound(spec, d) == Fraction(3) ** 6
    assert root_count_bound(spec) == pytest.approx(2 * 9 * 3**3)
    assert admissible_triples(2) == [(0, 0, 2), (0, 1, 1), (1, 0, 2), (1, 1, 1)]
    assert conj_bound_check(spec, d, Fraction(0), 1.0)
    assert not conj_bound_check(spec, d, Fraction(3**10), 1.0)


def test_forms_for_prime_avoid_p():
    forms = forms_for_prime(3)
    assert len(forms) == 4
    assert all(f.det_two % 3 for f in forms)
    assert forms[1].abc == (3, 1, 1)  # p | a となる形を含む


def _check_records(records):
    for rec in records:
        if rec.covered:
            assert rec.match, (rec.spec, rec.diag, rec.explicit, rec.oracle)
        if shift_invariant_vanishing(rec.spec, rec.diag):
            assert rec.oracle.value == 0
        assert rec.within_trivial_bound


def test_sweep_small_prime():
    """p=3, τ ≤ 4 で明示公式とオラクルが一致し、自明な上界に収まる"""
    records = list(sweep([3], range(5)))
    assert records
    assert any(r.covered for r in records)
    _check_records(records)


@pytest.mark.slow
def test_sweep_acceptance():
    _check_records(list(sweep([3, 5, 7], range(7))))


class TestShiftInvariantVanishing:
    @pytest.mark.parametrize(
        "abc, point, expected",
        [
            ((1, 0, 1), (3, 5, 2, 2, 3), {"x-shift-weak"}),
            ((1, 1, 2), (3, 5, 2, 2, 3), {"x-shift-weak", "y-shift-weak", "y-shift-variant"}),
            ((1, 1, 2), (3, 4, 2, 1, 3), {"x-shift"}),
            ((1, 1, 2), (3, 6, 3, 2, 4), {"x-shift", "y-shift-weak"}),
            ((3, 1, 1), (3, 6, 3, 2, 4), {"y-shift-weak"}),
            ((1, 1, 2), (3, 4, 2, 2, 2), set()),
            ((1, 1, 2), (3, 3, 1, 1, 2), set()),
        ],
    )
    def test_tags(self, make_local, abc, point, expected):
        spec, d = make_local(*point, HalfIntegralSymMat.from_abc(*abc))
        tags = shift_invariant_vanishing(spec, d)
        assert tags == expected
        if tags:
            assert local_integral_oracle(spec, d).value == 0

    def test_p_divides_c_at_tau_four(self, make_local):
        """τ′ = 2, p | c の点は明示公式の対象外だが x 方向の平行移動で 0"""
        spec, d = make_local(3, 4, 2, 1, 3, HalfIntegralSymMat.from_abc(1, 1, 3))
        assert isinstance(local_integral_explicit(spec, d), NotCovered)
        assert shift_invariant_vanishing(spec, d) == {"x-shift"}
        assert local_integral_oracle(spec, d).value == 0


def _gap_vanishing_records(primes, taus):
    return [
        rec
        for rec in sweep(primes, taus)
        if rec.covered and rec.explicit.provenance in ("gap1-vanish", "gap2-vanish")
    ]


def test_gap_vanishing_points_have_shift_tags():
    records = _gap_vanishing_records([3], range(6))
    assert {rec.explicit.provenance for rec in records} == {"gap1-vanish", "gap2-vanish"}
    for rec in records:
        assert shift_invariant_vanishing(rec.spec, rec.diag), (rec.spec, rec.diag)
        assert rec.oracle.value == 0


@pytest.mark.slow
def test_gap_vanishing_points_have_shift_tags_up_to_tau_six():
    for rec in _gap_vanishing_records([3, 5], range(7)):
        assert shift_invariant_vanishing(rec.spec, rec.diag), (rec.spec, rec.diag)
        assert rec.oracle.value == 0

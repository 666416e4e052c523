import itertools

import numpy as np
import pytest

from petersson_lab.root_data import (
    Character,
    Coweight,
    WeylElement,
    all_roots,
    bilinear_form,
    coroot_of,
    dominant_below,
    dominant_coweights,
    dominant_rep,
    generators,
    height,
    leq,
    pair,
    positive_coroots,
    positive_roots,
    relation_vector,
    rho,
    rho_check,
    weyl_apply,
    weyl_dimension,
    weyl_group,
)


class TestCoweight:
    def test_normalizes_to_l1_zero(self):
        """関係ベクトルの倍を足しても同じ代表になる"""
        assert Coweight((2, 1, 1)) == Coweight((0, 0, 0))
        assert Coweight((5, 2, 3)).ell == (1, 0, 1)

    def test_doubled_roundtrip(self):
        lam = Coweight((4, 0, 1))
        assert lam.doubled == (-4, -2)
        assert Coweight.from_doubled(lam.doubled) == lam

    def test_mixed_parity_rejected(self):
        with pytest.raises(ValueError):
            Coweight.from_doubled((-1, 0))

    def test_dominance(self):
        assert Coweight((2, 0, 1)).is_dominant
        assert Coweight((2, 0, 0)).is_dominant
        assert not Coweight((2, 0, 2)).is_dominant  # ℓ₂ > ℓ₀/2

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            Coweight((1,))


def test_relation_vector_and_rho():
    assert relation_vector(2) == (2, 1, 1)
    assert rho(2).two_chi == (3, -4, -2)
    assert rho_check(2) == Coweight((3, 0, 1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_root_coroot_pairing_is_two(n):
    for alpha in all_roots(n):
        assert pair(alpha, coroot_of(alpha)) == 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_root_counts(n):
    assert len(positive_roots(n)) == n * n
    assert len(positive_coroots(n)) == n * n
    assert len(set(all_roots(n))) == 2 * n * n


def test_positive_coroots_have_height_at_least_one():
    for n in (2, 3):
        assert all(height(c) >= 1 for c in positive_coroots(n))


def test_non_root_rejected():
    with pytest.raises(ValueError):
        coroot_of(Character((0, 1, 1)))


class TestWeylGroup:
    @pytest.mark.parametrize("n, order", [(1, 2), (2, 8), (3, 48)])
    def test_order(self, n, order):
        assert len(set(weyl_group(n))) == order

    def test_generators_close_to_whole_group(self):
        n = 3
        closure = {WeylElement.identity(n)}
        frontier = list(closure)
        while frontier:
            frontier = [
                g.compose(w) for w in frontier for g in generators(n) if g.compose(w) not in closure
            ]
            closure.update(frontier)
        assert closure == set(weyl_group(n))

    def test_generators_preserve_roots(self):
        roots = set(all_roots(2))
        for g in generators(2):
            assert {weyl_apply(g, a) for a in roots} == roots

    def test_compose_and_inverse(self):
        for w in weyl_group(2):
            assert w.compose(w.inverse()) == WeylElement.identity(2)

    def test_sign_is_multiplicative(self):
        for v, w in itertools.product(weyl_group(2), repeat=2):
            assert v.compose(w).sign == v.sign * w.sign

    def test_invalid_permutation_rejected(self):
        with pytest.raises(ValueError):
            WeylElement((0, 0), (0, 0))


def test_pairing_invariant_on_pgsp_characters():
    """PGSp の指標に対しては ⟨wχ, wλ⟩ = ⟨χ, λ⟩"""
    rng = np.random.default_rng(0)
    for _ in range(100):
        ks = [int(k) for k in rng.integers(-4, 5, size=2)]
        if sum(ks) % 2:
            ks[0] += 1
        chi = Character((-sum(ks) // 2, *ks))
        assert chi.is_pgsp
        lam = Coweight(tuple(int(c) for c in rng.integers(-5, 6, size=3)))
        for w in weyl_group(2):
            assert pair(weyl_apply(w, chi), weyl_apply(w, lam)) == pair(chi, lam)


def test_bilinear_form_is_w_invariant():
    chi, other = Character((0, 1, -3)), Character((2, -2, 5))
    for w in weyl_group(2):
        assert bilinear_form(weyl_apply(w, chi), weyl_apply(w, other)) == bilinear_form(chi, other)


def test_rho_orthogonal_to_relation_vector():
    for n in range(1, 5):
        assert sum(a * b for a, b in zip(rho(n).two_chi, relation_vector(n))) == 0


def test_dominant_rep():
    lam = Coweight((1, 0, 2))  # 二倍座標 (−1, 3)
    dom, w = dominant_rep(lam)
    assert dom.is_dominant
    assert weyl_apply(w, lam) == dom
    assert dom.doubled == (-3, -1)


def test_dominant_coweights_small():
    assert dominant_coweights(2, 2) == [
        Coweight((0, 0, 0)),
        Coweight((1, 0, 0)),
        Coweight((2, 0, 0)),
        Coweight((2, 0, 1)),
    ]


class TestPartialOrder:
    def test_examples(self):
        assert leq(Coweight((0, 0, 0)), Coweight((2, 0, 1)))
        assert leq(Coweight((2, 0, 1)), Coweight((2, 0, 0)))
        assert not leq(Coweight((1, 0, 0)), Coweight((2, 0, 1)))

    def test_non_dominant_rejected(self):
        with pytest.raises(ValueError):
            leq(Coweight((1, 0, 2)), Coweight((2, 0, 0)))

    def test_dominant_below(self):
        assert dominant_below(Coweight((2, 0, 0))) == [
            Coweight((0, 0, 0)),
            Coweight((2, 0, 0)),
            Coweight((2, 0, 1)),
        ]


@pytest.mark.parametrize(
    "ell, dim",
    [((0, 0, 0), 1), ((1, 0, 0), 4), ((2, 0, 1), 5), ((2, 0, 0), 10)],
)
def test_weyl_dimension(ell, dim):
    assert weyl_dimension(Coweight(ell)) == dim

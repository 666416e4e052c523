"""双対トーラス上の測度：Weyl 指標・佐藤–Tate 密度・Kostant 分割関数・KL 多項式・密度展開

双対群 Spin(2n+1) の指標は余指標 λ（の二倍 x 座標 X）で添字付けする。
トーラスの点は s = (s₁,…,sₙ)、|sᵢ| = 1 で表し、単項式 X の値を ∏ sᵢ^{Xᵢ} とする。
X の成分は偶奇が揃っているので、s ↦ −s の曖昧さは Haar 積分には影響しない。
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import sympy

from . import logger as log
from .errors import InvariantViolation
from .geom_side import SimilitudeSpec, normalized_L
from .quadform import HalfIntegralSymMat
from .root_data import (
    Coweight,
    WeylElement,
    dominant_below,
    dominant_coweights,
    generators,
    height,
    leq,
    positive_coroots,
    rho_check,
    weyl_apply,
    weyl_dimension,
    weyl_group,
)

CONJ_EPSILON = 0.01
# |A_ρ(t)| がこれより小さい点では比ではなく多項式で評価する
_DEGENERATE = 1e-8

Doubled = tuple[int, ...]


# --- Laurent 多項式 ---


@dataclass(frozen=True)
class LaurentElement:
    """ℚ[X^*(T̂)] の元。係数は二倍 x 座標をキーとする有理数（0 は保持しない）"""

    n: int
    coeffs: Mapping[Doubled, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for key, c in self.coeffs.items():
            key = tuple(int(v) for v in key)
            if len(key) != self.n:
                raise ValueError(f"単項式の長さが n={self.n} と一致しません: {key}")
            c = Fraction(c)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
        object.__setattr__(self, "coeffs", {k: v for k, v in sorted(clean.items()) if v})

    @classmethod
    def monomial(cls, X: Doubled, coeff: Fraction | int = 1) -> LaurentElement:
        return cls(len(X), {tuple(X): Fraction(coeff)})

    @classmethod
    def one(cls, n: int) -> LaurentElement:
        return cls.monomial((0,) * n)

    def __add__(self, other: LaurentElement) -> LaurentElement:
        merged = dict(self.coeffs)
        for k, v in other.coeffs.items():
            merged[k] = merged.get(k, Fraction(0)) + v
        return LaurentElement(self.n, merged)

    def __neg__(self) -> LaurentElement:
        return LaurentElement(self.n, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: LaurentElement) -> LaurentElement:
        return self + (-other)

    def __mul__(self, other) -> LaurentElement:
        if isinstance(other, LaurentElement):
            out: dict[Doubled, Fraction] = {}
            for (k1, v1), (k2, v2) in itertools.product(self.coeffs.items(), other.coeffs.items()):
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, Fraction(0)) + v1 * v2
            return LaurentElement(self.n, out)
        scalar = Fraction(other)
        return LaurentElement(self.n, {k: v * scalar for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def weyl_apply(self, w: WeylElement) -> LaurentElement:
        return LaurentElement(self.n, {w.act_on_vector(k): v for k, v in self.coeffs.items()})

    def is_weyl_symmetric(self) -> bool:
        return all(self.weyl_apply(g) == self for g in generators(self.n))

    def weights(self) -> dict[Coweight, Fraction]:
        """重みごとの重複度（キーを余指標に戻したもの）"""
        return {Coweight.from_doubled(k): v for k, v in self.coeffs.items()}

    def evaluate(self, angles) -> np.ndarray:
        """sᵢ = e^{iφᵢ} での値。angles の形は (..., n)"""
        phi = np.asarray(angles, dtype=float)
        if not self.coeffs:
            return np.zeros(phi.shape[:-1], dtype=complex)
        keys = np.array(list(self.coeffs), dtype=float)
        vals = np.array([float(v) for v in self.coeffs.values()])
        return np.exp(1j * (phi @ keys.T)) @ vals

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"X": list(k), "num": v.numerator, "den": v.denominator}
                for k, v in self.coeffs.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> LaurentElement:
        return cls(
            int(data["n"]),
            {tuple(t["X"]): Fraction(int(t["num"]), int(t["den"])) for t in data["terms"]},
        )

    def _to_poly(self, syms) -> tuple[sympy.Poly, Doubled]:
        shift = tuple(min(k[i] for k in self.coeffs) for i in range(self.n))
        expr = sum(
            sympy.Rational(v.numerator, v.denominator)
            * sympy.Mul(*[s ** (k[i] - shift[i]) for i, s in enumerate(syms)])
            for k, v in self.coeffs.items()
        )
        return sympy.Poly(expr, *syms, domain="QQ"), shift

    def exact_divide(self, other: LaurentElement) -> LaurentElement:
        """多変数 Laurent 多項式としての割り算。余りが 0 でなければ InvariantViolation"""
        if not other:
            raise ZeroDivisionError("0 で割ることはできません")
        if not self:
            return LaurentElement(self.n, {})
        syms = sympy.symbols(f"s1:{self.n + 1}")
        num, shift_num = self._to_poly(syms)
        den, shift_den = other._to_poly(syms)
        quotient, remainder = num.div(den)
        if not remainder.is_zero:
            raise InvariantViolation(f"Laurent 多項式の割り算が割り切れません（余り {remainder.as_expr()}）")
        offset = tuple(a - b for a, b in zip(shift_num, shift_den))
        return LaurentElement(
            self.n,
            {
                tuple(m + o for m, o in zip(monom, offset)): Fraction(int(c.p), int(c.q))
                for monom, c in quotient.terms()
            },
        )


@dataclass(frozen=True)
class TorusPoint:
    """T̂_c の点（s 座標）"""

    coords: tuple[complex, ...]

    def __post_init__(self) -> None:
        coords = tuple(complex(c) for c in self.coords)
        if any(abs(abs(c) - 1.0) > 1e-12 for c in coords):
            raise ValueError(f"トーラスの座標は絶対値 1 である必要があります: {coords}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_angles(cls, angles: Iterable[float]) -> TorusPoint:
        return cls(tuple(np.exp(1j * np.asarray(list(angles), dtype=float))))

    @classmethod
    def identity(cls, n: int) -> TorusPoint:
        return cls((1 + 0j,) * n)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def angles(self) -> np.ndarray:
        return np.angle(np.array(self.coords))

    def conjugate(self) -> TorusPoint:
        return TorusPoint(tuple(c.conjugate() for c in self.coords))


def _angles_of(t) -> np.ndarray:
    if isinstance(t, TorusPoint):
        return t.angles
    return np.asarray(t, dtype=float)


# --- Weyl 指標と佐藤–Tate 測度 ---


def alternating_sum(mu: Coweight | Doubled) -> LaurentElement:
    """A_μ = Σ_w sgn(w)·w(μ)"""
    X = mu.doubled if isinstance(mu, Coweight) else tuple(mu)
    n = len(X)
    coeffs: dict[Doubled, Fraction] = {}
    for w in weyl_group(n):
        key = w.act_on_vector(X)
        coeffs[key] = coeffs.get(key, Fraction(0)) + w.sign
    return LaurentElement(n, coeffs)


@lru_cache(maxsize=None)
def _a_rho(n: int) -> LaurentElement:
    return alternating_sum(rho_check(n))


@lru_cache(maxsize=None)
def weyl_character(lam: Coweight) -> LaurentElement:
    """F_λ = A_{λ+ρ}/A_ρ（厳密な割り算）"""
    if not lam.is_dominant:
        raise ValueError(f"支配的でない余指標です: {lam}")
    char = alternating_sum(lam + rho_check(lam.n)).exact_divide(_a_rho(lam.n))
    if any(v.denominator != 1 or v < 0 for v in char.coeffs.values()):
        raise InvariantViolation(f"重複度が非負整数になりません: λ={lam}")
    return char


def char_values(lam: Coweight, angles) -> np.ndarray:
    """F_λ を角度配列 (..., n) 上で評価する（分母を使わない多項式評価）"""
    return weyl_character(lam).evaluate(angles)


def char_eval(lam: Coweight, t: TorusPoint) -> complex:
    """F_λ(t)。A_ρ(t) が 0 に近い点では多項式として評価する"""
    angles = _angles_of(t)
    den = complex(_a_rho(lam.n).evaluate(angles))
    if abs(den) < _DEGENERATE:
        return complex(char_values(lam, angles))
    return complex(alternating_sum(lam + rho_check(lam.n)).evaluate(angles)) / den


def sato_tate_density(t, n: int | None = None) -> np.ndarray | float:
    """|A_ρ(t)|²/|W|（T̂_c の正規化 Haar 測度に関する密度）"""
    angles = _angles_of(t)
    n = angles.shape[-1] if n is None else n
    value = np.abs(_a_rho(n).evaluate(angles)) ** 2 / len(weyl_group(n))
    return float(value) if value.ndim == 0 else value


def weyl_denominator_product(t, n: int | None = None) -> np.ndarray | float:
    """∏_{α>0}|1 − α(t)|²（正ルートは正余ルートの二倍 x 座標で与える）"""
    angles = _angles_of(t)
    n = angles.shape[-1] if n is None else n
    value = np.ones(angles.shape[:-1])
    for cor in positive_coroots(n):
        phase = angles @ np.array(cor.doubled, dtype=float)
        value = value * np.abs(1 - np.exp(1j * phase)) ** 2
    return float(value) if np.ndim(value) == 0 else value


def torus_grid(n: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    """[0, 2π)ⁿ の一様テンソル格子と重み（次数 < size の三角多項式に対して厳密）"""
    axis = 2 * np.pi * np.arange(size) / size
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    points = np.stack([g.ravel() for g in mesh], axis=-1)
    weights = np.full(len(points), 1.0 / size**n)
    return points, weights


def orthonormality_check(lam: Coweight, mu: Coweight, grid: int = 64) -> complex:
    """∫ F_λ·conj(F_μ) dμ_ST（≈ δ_{λμ}）"""
    points, weights = torus_grid(lam.n, grid)
    integrand = char_values(lam, points) * np.conj(char_values(mu, points))
    return complex(np.sum(weights * integrand * sato_tate_density(points, lam.n)))


def gram_matrix(lams: list[Coweight], grid: int = 64) -> np.ndarray:
    points, weights = torus_grid(lams[0].n, grid)
    density = sato_tate_density(points, lams[0].n) * weights
    values = np.array([char_values(lam, points) for lam in lams])
    return (values * density) @ np.conj(values).T


def sato_tate_moments(lam: Coweight, grid: int = 64) -> complex:
    """∫ F_λ dμ_ST（λ = 0 のときだけ 1）"""
    return orthonormality_check(lam, Coweight.zero(lam.n), grid)


# --- Kostant 分割関数と Kazhdan–Lusztig 多項式 ---


@lru_cache(maxsize=None)
def _coroot_vectors(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(c // 2 for c in cor.doubled) for cor in positive_coroots(n))


def _x_height(xs: tuple[int, ...]) -> int:
    n = len(xs)
    return sum((k - n) * c for k, c in enumerate(xs))


@lru_cache(maxsize=500_000)
def _kostant(xs: tuple[int, ...], start: int, p: int) -> Fraction:
    coroots = _coroot_vectors(len(xs))
    if start == len(coroots):
        return Fraction(1) if not any(xs) else Fraction(0)
    a = coroots[start]
    total = Fraction(0)
    k = 0
    cur = xs
    while _x_height(cur) >= 0:
        total += _kostant(cur, start + 1, p) / p**k
        cur = tuple(c - d for c, d in zip(cur, a))
        k += 1
    return total


def kostant_phat(mu: Coweight, p: int) -> Fraction:
    """P̂(μ) = Σ p^{−Σn(α∨)}（μ = Σ n(α∨)α∨ の表し方すべて）"""
    xs = mu.doubled
    if any(c % 2 for c in xs):
        return Fraction(0)
    return _kostant(tuple(c // 2 for c in xs), 0, p)


@lru_cache(maxsize=None)
def kl_poly(mu: Coweight, lam: Coweight, p: int) -> Fraction:
    """P_{μ,λ}(p) = p^{⟨λ−μ,ρ⟩}Σ_w sgn(w)P̂(w(λ+ρ∨) − (μ+ρ∨))"""
    if not leq(mu, lam):
        raise ValueError(f"μ ≤ λ ではありません: μ={mu}, λ={lam}")
    rc = rho_check(lam.n)
    shifted = lam + rc
    base = mu + rc
    total = sum(
        (w.sign * kostant_phat(weyl_apply(w, shifted) - base, p) for w in weyl_group(lam.n)),
        start=Fraction(0),
    )
    exponent = height(lam - mu)
    if exponent.denominator != 1:
        raise InvariantViolation(f"⟨λ−μ, ρ⟩ が整数になりません: {exponent}")
    return total * Fraction(p) ** int(exponent)


@dataclass(frozen=True)
class KLData:
    mu: Coweight
    lam: Coweight
    p: int
    value: Fraction

    def __post_init__(self) -> None:
        if self.mu == self.lam and self.value != 1:
            raise InvariantViolation(f"P_{{λ,λ}}({self.p}) = {self.value} ≠ 1")


def kl_table(lam: Coweight, p: int) -> list[KLData]:
    return [KLData(mu, lam, p, kl_poly(mu, lam, p)) for mu in dominant_below(lam)]


def kato_lusztig_expand(lam: Coweight, p: int) -> dict[Coweight, float]:
    """F_λ = p^{−⟨λ,ρ⟩}Σ_{μ≤λ}P_{μ,λ}(p)𝒮(c_μ) の係数"""
    if not lam.is_dominant:
        raise ValueError(f"支配的でない余指標です: {lam}")
    scale = float(p) ** -float(height(lam))
    return {row.mu: scale * float(row.value) for row in kl_table(lam, p)}


def _down_closure(lams: Iterable[Coweight]) -> list[Coweight]:
    closed = set()
    for lam in lams:
        closed.update(dominant_below(lam))
    return sorted(closed, key=lambda m: (height(m), m))


def kl_inverse(lams: Iterable[Coweight], p: int) -> dict[Coweight, dict[Coweight, Fraction]]:
    """単三角行列 K[λ][μ] = P_{μ,λ}(p) の逆行列（λ の集合は下に閉じるまで広げる）

    𝒮(c_λ) = Σ_μ K⁻¹[λ][μ]·p^{⟨μ,ρ⟩}F_μ。
    """
    order = _down_closure(lams)
    inverse: dict[Coweight, dict[Coweight, Fraction]] = {}
    for lam in order:
        row: dict[Coweight, Fraction] = {lam: Fraction(1)}
        below = [nu for nu in order if nu != lam and leq(nu, lam)]
        for mu in below:
            acc = Fraction(0)
            for nu in below:
                if mu in inverse[nu]:
                    acc += kl_poly(nu, lam, p) * inverse[nu][mu]
            if acc:
                row[mu] = -acc
        inverse[lam] = row
    return inverse


# --- 𝓛(F) と密度展開 ---


def _canonical_spec(mus: Mapping[int, Coweight]) -> SimilitudeSpec:
    return SimilitudeSpec(tuple(sorted((p, mu) for p, mu in mus.items() if any(mu.ell))))


def _normalized_value(sigma, spec, kappa, cache, margin, max_cells) -> Fraction:
    if cache is not None:
        hit = cache.get(sigma, spec, kappa)
        if hit is not None:
            return hit
    value = normalized_L(sigma, spec, kappa, margin=margin, max_cells=max_cells)
    if cache is not None:
        cache.put(sigma, spec, kappa, value)
    return value


def L_of_F(
    lams: Mapping[int, Coweight],
    sigma: HalfIntegralSymMat,
    kappa: int | None = None,
    *,
    cache=None,
    margin: int = 0,
    max_cells: int = 200_000_000,
) -> float:
    """𝓛(F_λ̲) = Σ_{μ̲≤λ̲}(∏_p p^{−⟨λ_p,ρ⟩}P_{μ_p,λ_p}(p))·𝓛(∏_p 𝒮(c_{μ_p}))

    cache は get(σ, spec, κ) / put(σ, spec, κ, value) を持つオブジェクト（LValueCache など）。
    """
    primes = sorted(lams)
    expansions = [list(kato_lusztig_expand(lams[p], p).items()) for p in primes]
    total = 0.0
    for combo in itertools.product(*expansions):
        coeff = math.prod(c for _, c in combo)
        spec = _canonical_spec({p: mu for p, (mu, _) in zip(primes, combo)})
        total += coeff * float(_normalized_value(sigma, spec, kappa, cache, margin, max_cells))
    return total


def tail_bound(p: int, truncation: int, epsilon: float = CONJ_EPSILON, n: int = 2) -> float:
    """Σ_{ℓ₀>Λ}(ℓ₀/2+1)^{n−1}p^{−εnℓ₀/2}"""
    q = mpmath.power(p, -epsilon * n / 2)
    value = mpmath.nsum(lambda l0: (l0 / 2 + 1) ** (n - 1) * q**l0, [truncation + 1, mpmath.inf])
    return float(value)


@dataclass
class MeasureExpansion:
    sigma: HalfIntegralSymMat
    kappa: int | None
    primes: tuple[int, ...]
    truncation: int
    coeffs: dict[tuple[Coweight, ...], float]
    tail_bound: float

    def __post_init__(self) -> None:
        zero = tuple(Coweight.zero(self.sigma.n) for _ in self.primes)
        if self.coeffs.get(zero) != 1.0:
            raise InvariantViolation(f"λ̲ = 0 の係数が 1 ではありません: {self.coeffs.get(zero)}")

    def density(self, angles: np.ndarray) -> np.ndarray:
        """angles の形は (m, |𝕊|, n)。μ_ST の直積に関する密度（複素数のまま返す）"""
        out = np.zeros(angles.shape[0], dtype=complex)
        for lams, coeff in self.coeffs.items():
            term = np.full(angles.shape[0], coeff, dtype=complex)
            for j, lam in enumerate(lams):
                term *= np.conj(char_values(lam, angles[:, j, :]))
            out += term
        return out

    def to_json(self) -> dict:
        return {
            "sigma": [list(row) for row in self.sigma.two_sigma],
            "kappa": self.kappa,
            "primes": list(self.primes),
            "truncation": self.truncation,
            "coeffs": [
                {"lam": [list(l.ell) for l in lams], "value": value}
                for lams, value in sorted(self.coeffs.items())
            ],
            "tail_bound": self.tail_bound,
        }


def measure_expansion(
    sigma: HalfIntegralSymMat,
    kappa: int | None,
    primes: Iterable[int],
    truncation: int,
    *,
    epsilon: float = CONJ_EPSILON,
    cache=None,
    margin: int = 0,
    max_cells: int = 200_000_000,
) -> MeasureExpansion:
    """ℓ₀ ≤ Λ の λ̲ すべてについて 𝓛(F_λ̲) を求める"""
    primes = tuple(sorted(set(primes)))
    n = sigma.n
    per_prime = dominant_coweights(n, truncation)
    coeffs = {}
    for lams in itertools.product(per_prime, repeat=len(primes)):
        coeffs[lams] = L_of_F(
            dict(zip(primes, lams)), sigma, kappa, cache=cache, margin=margin, max_cells=max_cells
        )
    log.detail(f"密度展開: 𝕊={list(primes)}, Λ={truncation}, 係数 {len(coeffs)} 個")
    return MeasureExpansion(
        sigma=sigma,
        kappa=kappa,
        primes=primes,
        truncation=truncation,
        coeffs=coeffs,
        tail_bound=sum(tail_bound(p, truncation, epsilon, n) for p in primes),
    )


@dataclass
class DensitySamples:
    expansion: MeasureExpansion
    angles: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return self.values.real

    @property
    def max_imag(self) -> float:
        return float(np.max(np.abs(self.values.imag))) if self.values.size else 0.0

    @property
    def max_deviation(self) -> float:
        """max|density − 1|"""
        return float(np.max(np.abs(self.values - 1.0)))

    def total_mass(self) -> float:
        """∫ density dμ_ST（格子求積）"""
        st = np.ones(len(self.angles))
        for j in range(self.angles.shape[1]):
            st = st * sato_tate_density(self.angles[:, j, :])
        return float(np.sum(self.weights * st * self.density))

    def rows(self) -> list[dict]:
        rows = []
        for ang, value in zip(self.angles, self.values):
            row = {f"theta_{j}_{i}": float(a) for j, pt in enumerate(ang) for i, a in enumerate(pt)}
            row["density"] = float(value.real)
            row["tail_bound"] = self.expansion.tail_bound
            rows.append(row)
        return rows


def density_samples(
    sigma: HalfIntegralSymMat,
    kappa: int | None,
    primes: Iterable[int],
    truncation: int = 6,
    grid: int = 200,
    *,
    epsilon: float = CONJ_EPSILON,
    cache=None,
    margin: int = 0,
    max_cells: int = 200_000_000,
) -> DensitySamples:
    """切断した展開 Σ 𝓛(F_λ̲)·conj(F_λ̲(t)) を T̂_c^𝕊 の格子上で評価する

    負の値もそのまま返す。
    """
    expansion = measure_expansion(
        sigma, kappa, primes, truncation, epsilon=epsilon, cache=cache, margin=margin, max_cells=max_cells
    )
    k = max(1, len(expansion.primes))
    points, weights = torus_grid(sigma.n * k, grid)
    angles = points.reshape(len(points), k, sigma.n)
    if not expansion.primes:
        values = np.ones(len(points), dtype=complex)
    else:
        values = expansion.density(angles)
    samples = DensitySamples(expansion, angles, weights, values)
    if samples.max_imag > 1e-9:
        log.warn(f"密度の虚部が大きすぎます: {samples.max_imag:.3g}")
    return samples


def deviation_by_prime(
    sigma: HalfIntegralSymMat,
    kappa: int | None,
    primes: Iterable[int],
    truncation: int,
    grid: int = 48,
    *,
    cache=None,
) -> dict[int, float]:
    """素数ごとに単独の 𝕊 = {p} で max|density − 1| を求める"""
    return {
        p: density_samples(sigma, kappa, [p], truncation, grid, cache=cache).max_deviation
        for p in primes
    }


def dimension_check(lam: Coweight) -> bool:
    """恒等元での指標値が Weyl 次元公式と一致するか"""
    value = char_eval(lam, TorusPoint.identity(lam.n))
    return abs(value - weyl_dimension(lam)) < 1e-9

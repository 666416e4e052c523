"""GSp(2n) / PGSp(2n) のルートデータ：指標・余指標・ペアリング・Weyl 群

座標の約束:
  - 指標 k = (k₀,…,kₙ)。PGSp の指標は 2k₀+k₁+⋯+kₙ = 0 を満たす。
  - 余指標 ℓ = (ℓ₀,…,ℓₙ) は関係ベクトル (2,1,…,1) を法とした類で、ℓ₁ = 0 の代表で保持する。
  - 内部では「二倍 x 座標」X_i = 2ℓ_i − ℓ₀ (i ≥ 1) を使う。X は関係ベクトルで不変で、
    Weyl 群は X に符号付き置換として作用する。逆変換は ℓ₀ = −X₁, ℓ_i = (X_i − X₁)/2。
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache


def relation_vector(n: int) -> tuple[int, ...]:
    """X_*(T) から X_*(T̄) を作る関係ベクトル (2,1,…,1)"""
    return (2,) + (1,) * n


@dataclass(frozen=True)
class Character:
    """指標 χ = (k₀,…,kₙ)（ルートもこの型で表す）"""

    k: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.k) - 1

    @property
    def is_pgsp(self) -> bool:
        """PGSp の指標か（2k₀+k₁+⋯+kₙ = 0）"""
        return 2 * self.k[0] + sum(self.k[1:]) == 0

    def __neg__(self) -> Character:
        return Character(tuple(-c for c in self.k))


@dataclass(frozen=True)
class HalfWeight:
    """半整数成分を許す指標。two_chi = 2χ を整数で保持する（ρ 用）"""

    two_chi: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.two_chi) - 1


@dataclass(frozen=True, order=True)
class Coweight:
    """余指標 λ。ℓ₁ = 0 の正規代表で保持する"""

    ell: tuple[int, ...] = field()

    def __post_init__(self) -> None:
        ell = tuple(int(c) for c in self.ell)
        if len(ell) < 2:
            raise ValueError(f"余指標は (ℓ₀,…,ℓₙ), n ≥ 1 の形で与えてください: {ell}")
        shift = ell[1]
        if shift:
            rel = relation_vector(len(ell) - 1)
            ell = tuple(c - shift * r for c, r in zip(ell, rel))
        object.__setattr__(self, "ell", ell)

    @classmethod
    def from_doubled(cls, doubled: tuple[int, ...]) -> Coweight:
        """二倍 x 座標 X から正規代表を作る（X の成分はすべて同じ偶奇）"""
        parity = doubled[0] % 2
        if any(c % 2 != parity for c in doubled):
            raise ValueError(f"二倍座標の偶奇が揃っていません: {doubled}")
        x1 = doubled[0]
        return cls((-x1, 0) + tuple((c - x1) // 2 for c in doubled[1:]))

    @classmethod
    def zero(cls, n: int) -> Coweight:
        return cls((0,) * (n + 1))

    @property
    def n(self) -> int:
        return len(self.ell) - 1

    @property
    def l0(self) -> int:
        return self.ell[0]

    @property
    def doubled(self) -> tuple[int, ...]:
        """二倍 x 座標 X_i = 2ℓ_i − ℓ₀"""
        l0 = self.ell[0]
        return tuple(2 * c - l0 for c in self.ell[1:])

    @property
    def is_dominant(self) -> bool:
        """0 = ℓ₁ ≤ ℓ₂ ≤ ⋯ ≤ ℓₙ ≤ ℓ₀/2 を満たすか"""
        xs = self.doubled
        return all(a <= b for a, b in zip(xs, xs[1:])) and xs[-1] <= 0

    def __add__(self, other: Coweight) -> Coweight:
        return Coweight(tuple(a + b for a, b in zip(self.ell, other.ell)))

    def __sub__(self, other: Coweight) -> Coweight:
        return Coweight(tuple(a - b for a, b in zip(self.ell, other.ell)))

    def __neg__(self) -> Coweight:
        return Coweight(tuple(-a for a in self.ell))

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.ell) + ")"


@dataclass(frozen=True)
class WeylElement:
    """W ≅ Sₙ ⋉ (ℤ/2)ⁿ の元。符号反転のあと置換を施す

    perm[i] は座標 i（0 始まり）の行き先、signs[i] = 1 なら座標 i を反転する。
    """

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"置換ではありません: {self.perm}")
        if len(self.signs) != len(self.perm) or any(s not in (0, 1) for s in self.signs):
            raise ValueError(f"符号ベクトルが不正です: {self.signs}")

    @classmethod
    def identity(cls, n: int) -> WeylElement:
        return cls(tuple(range(n)), (0,) * n)

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def sign(self) -> int:
        """sgn(w) = (−1)^{反転数 + 置換の転倒数}"""
        inversions = sum(
            1 for i, j in itertools.combinations(range(self.n), 2) if self.perm[i] > self.perm[j]
        )
        return -1 if (inversions + sum(self.signs)) % 2 else 1

    def act_on_vector(self, v: tuple[int, ...]) -> tuple[int, ...]:
        """x 座標（あるいは二倍 x 座標）への符号付き置換"""
        out = [0] * self.n
        for i, c in enumerate(v):
            out[self.perm[i]] = -c if self.signs[i] else c
        return tuple(out)

    def compose(self, other: WeylElement) -> WeylElement:
        """self ∘ other（先に other を作用させる）"""
        perm = tuple(self.perm[other.perm[i]] for i in range(self.n))
        signs = tuple(other.signs[i] ^ self.signs[other.perm[i]] for i in range(self.n))
        return WeylElement(perm, signs)

    def inverse(self) -> WeylElement:
        perm = [0] * self.n
        signs = [0] * self.n
        for i, j in enumerate(self.perm):
            perm[j] = i
            signs[j] = self.signs[i]
        return WeylElement(tuple(perm), tuple(signs))


def generators(n: int) -> list[WeylElement]:
    """隣接互換と符号反転からなる生成元"""
    gens = []
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append(WeylElement(tuple(perm), (0,) * n))
    for i in range(n):
        gens.append(WeylElement(tuple(range(n)), tuple(1 if j == i else 0 for j in range(n))))
    return gens


@lru_cache(maxsize=None)
def weyl_group(n: int) -> tuple[WeylElement, ...]:
    """W の全元（位数 2ⁿ·n!）"""
    return tuple(
        WeylElement(perm, signs)
        for perm in itertools.permutations(range(n))
        for signs in itertools.product((0, 1), repeat=n)
    )


def _check_length(chi: Character | HalfWeight, lam: Coweight) -> None:
    if chi.n != lam.n:
        raise ValueError(f"長さが一致しません: 指標 n={chi.n}, 余指標 n={lam.n}")


def pair(chi: Character | HalfWeight, lam: Coweight) -> Fraction:
    """自然なペアリング k₀ℓ₀+⋯+kₙℓₙ（HalfWeight なら 1/2 倍）"""
    _check_length(chi, lam)
    if isinstance(chi, HalfWeight):
        return Fraction(sum(a * b for a, b in zip(chi.two_chi, lam.ell)), 2)
    return Fraction(sum(a * b for a, b in zip(chi.k, lam.ell)))


def bilinear_form(chi: Character, other: Character) -> int:
    """W 不変な内積 (χ, χ') = Σ_{i≥1} kᵢk'ᵢ"""
    return sum(a * b for a, b in zip(chi.k[1:], other.k[1:]))


def _act_on_character_coords(w: WeylElement, k: tuple[int, ...]) -> tuple[int, ...]:
    k0 = k[0]
    ks = list(k[1:])
    for i, s in enumerate(w.signs):
        if s:
            k0 += ks[i]
            ks[i] = -ks[i]
    out = [0] * w.n
    for i, c in enumerate(ks):
        out[w.perm[i]] = c
    return (k0, *out)


def weyl_apply(w: WeylElement, x: Character | HalfWeight | Coweight):
    """生成元の作用公式を合成した作用。余指標は ℓ₁ = 0 の代表に正規化して返す"""
    if w.n != x.n:
        raise ValueError(f"階数が一致しません: w は n={w.n}, 引数は n={x.n}")
    if isinstance(x, Coweight):
        return Coweight.from_doubled(w.act_on_vector(x.doubled))
    if isinstance(x, HalfWeight):
        return HalfWeight(_act_on_character_coords(w, x.two_chi))
    return Character(_act_on_character_coords(w, x.k))


def dominant_rep(lam: Coweight) -> tuple[Coweight, WeylElement]:
    """Weyl 軌道の支配的代表と、入力をそれへ写す Weyl 元"""
    xs = lam.doubled
    n = lam.n
    signs = tuple(1 if c > 0 else 0 for c in xs)
    folded = [-abs(c) for c in xs]
    order = sorted(range(n), key=lambda i: (folded[i], i))
    perm = [0] * n
    for pos, i in enumerate(order):
        perm[i] = pos
    w = WeylElement(tuple(perm), signs)
    return Coweight.from_doubled(tuple(folded[i] for i in order)), w


def rho(n: int) -> HalfWeight:
    """正ルートの和の半分 ρ = n(n+1)/4·e₀ − n e₁ − ⋯ − 1·eₙ"""
    return HalfWeight((n * (n + 1) // 2,) + tuple(-2 * (n - i) for i in range(n)))


def rho_check(n: int) -> Coweight:
    """正余ルートの和の半分 ρ∨（Spin(2n+1) では整の余指標）"""
    return Coweight.from_doubled(tuple(2 * k - 2 * n - 1 for k in range(1, n + 1)))


@lru_cache(maxsize=None)
def positive_roots(n: int) -> tuple[Character, ...]:
    """Φ⁺: e_j − e_i (i<j), e₀ − e_i − e_j (i<j), e₀ − 2e_i"""
    roots = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        k = [0] * (n + 1)
        k[j], k[i] = 1, -1
        roots.append(Character(tuple(k)))
    for i, j in itertools.combinations(range(1, n + 1), 2):
        k = [0] * (n + 1)
        k[0], k[i], k[j] = 1, -1, -1
        roots.append(Character(tuple(k)))
    for i in range(1, n + 1):
        k = [0] * (n + 1)
        k[0], k[i] = 1, -2
        roots.append(Character(tuple(k)))
    return tuple(roots)


def all_roots(n: int) -> tuple[Character, ...]:
    pos = positive_roots(n)
    return pos + tuple(-a for a in pos)


@lru_cache(maxsize=None)
def positive_coroots(n: int) -> tuple[Coweight, ...]:
    """Φ⁺ と同じ順に並べた余ルート: f_j − f_i, −f_i − f_j, −f_i"""
    coroots = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        ell = [0] * (n + 1)
        ell[j], ell[i] = 1, -1
        coroots.append(Coweight(tuple(ell)))
    for i, j in itertools.combinations(range(1, n + 1), 2):
        ell = [0] * (n + 1)
        ell[i], ell[j] = -1, -1
        coroots.append(Coweight(tuple(ell)))
    for i in range(1, n + 1):
        ell = [0] * (n + 1)
        ell[i] = -1
        coroots.append(Coweight(tuple(ell)))
    return tuple(coroots)


def coroot_of(alpha: Character) -> Coweight:
    """ルート α に対応する余ルート α∨"""
    n = alpha.n
    pos = positive_roots(n)
    cor = positive_coroots(n)
    if alpha in pos:
        return cor[pos.index(alpha)]
    if -alpha in pos:
        return -cor[pos.index(-alpha)]
    raise ValueError(f"ルートではありません: {alpha.k}")


def height(nu: Coweight) -> Fraction:
    """⟨ρ, ν⟩。正余ルートはすべて高さ 1 以上"""
    return pair(rho(nu.n), nu)


def simple_coordinates(nu: Coweight) -> tuple[int, ...]:
    """単純余ルート f₂−f₁, …, fₙ−fₙ₋₁, −fₙ に関する座標（x 座標の部分和の符号反転）"""
    xs = nu.doubled
    if any(c % 2 for c in xs):
        raise ValueError(f"余ルート格子に属しません: {nu}")
    coords = []
    acc = 0
    for c in xs:
        acc += c // 2
        coords.append(-acc)
    return tuple(coords)


@lru_cache(maxsize=200_000)
def _coroot_feasible(xs: tuple[int, ...], start: int) -> bool:
    # xs は x 座標（整数）、start 以降の余ルートだけを使う
    if not any(xs):
        return True
    n = len(xs)
    h = sum((k - n) * c for k, c in enumerate(xs))  # (k+1) − n − 1 = k − n
    if h <= 0:
        return False
    coroots = _coroot_x_vectors(n)
    for idx in range(start, len(coroots)):
        a = coroots[idx]
        nxt = tuple(c - d for c, d in zip(xs, a))
        if _coroot_feasible(nxt, idx):
            return True
    return False


@lru_cache(maxsize=None)
def _coroot_x_vectors(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(c // 2 for c in cor.doubled) for cor in positive_coroots(n))


def in_coroot_cone(nu: Coweight) -> bool:
    """ν が正余ルートの非負整数結合か（深さ優先探索）"""
    xs = nu.doubled
    if any(c % 2 for c in xs):
        return False
    return _coroot_feasible(tuple(c // 2 for c in xs), 0)


def leq(mu: Coweight, lam: Coweight) -> bool:
    """μ ≤ λ ⟺ λ − μ が正余ルートの非負整数結合"""
    if not (mu.is_dominant and lam.is_dominant):
        raise ValueError(f"μ ≤ λ は支配的な余指標に対してのみ定義します: {mu}, {lam}")
    return in_coroot_cone(lam - mu)


def weyl_dimension(lam: Coweight) -> int:
    """Weyl 次元公式 ∏_{α>0} ⟨α, λ+ρ∨⟩/⟨α, ρ∨⟩"""
    if not lam.is_dominant:
        raise ValueError(f"支配的でない余指標です: {lam}")
    rc = rho_check(lam.n)
    shifted = lam + rc
    value = Fraction(1)
    for alpha in positive_roots(lam.n):
        value *= pair(alpha, shifted) / pair(alpha, rc)
    if value.denominator != 1:
        raise ArithmeticError(f"次元が整数になりません: {value}")
    return int(value)


def dominant_coweights(n: int, max_l0: int) -> list[Coweight]:
    """ℓ₀ ≤ max_l0 の支配的余指標を (ℓ₀, ℓ₂, …) の辞書順で列挙"""
    out = []
    for l0 in range(max_l0 + 1):
        for tail in itertools.combinations_with_replacement(range(l0 // 2 + 1), n - 1):
            out.append(Coweight((l0, 0) + tail))
    return out


def dominant_below(lam: Coweight) -> list[Coweight]:
    """μ ≤ λ を満たす支配的 μ の全体（高さで有界な領域を列挙して篩う）"""
    h = height(lam)
    n = lam.n
    parity = lam.doubled[0] % 2
    # 支配的なら高さ ≥ n·|x₁| = n·|X₁|/2
    bound = int(2 * h / n) + 2
    out = []
    for xs in itertools.combinations_with_replacement(range(-bound, 1), n):
        if any(c % 2 != parity for c in xs):
            continue
        mu = Coweight.from_doubled(xs)
        if leq(mu, lam):
            out.append(mu)
    return sorted(out)

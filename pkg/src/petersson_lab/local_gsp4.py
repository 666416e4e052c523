"""n=2 の局所積分 I_{A,p}：対角化・明示公式の場合分け・剰余和オラクル・上界

記号:
  λ(p) = diag(1, p^t, p^τ, p^{τ−t})、A の Smith 形 diag(p^α, p^β)（α ≤ β）、
  σ_U = ᵗUσ₁U = (a, b/2; b/2, c)。
  変数 x = p^{α−τ}x′, y = p^{β−τ}y′, z = p^{β−τ}z′ で台の条件を整数 x′, y′, z′ の
  付値条件に直す。α+β = τ のときは x′ = p^β x, y′ = p^α y, z′ = p^α z。
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from . import logger as log
from .errors import InvariantViolation, NotCovered, UnsupportedRegime
from .padic_cartan import IntMat, p_adic_valuation, smith_normal_form
from .quadform import HalfIntegralSymMat
from .root_data import Coweight

# 全格子（y も含めた p^{3M} 点）で剰余ごとの個数を保持する上限
_FULL_GRID_LIMIT = 2_000_000
# z′ 軸を分割するときの 1 ブロックあたりの要素数
_CHUNK_ELEMENTS = 1 << 22

CONJ_EPSILON = 0.01

PROVENANCES = (
    "unramified",
    "support-vanish",
    "det-order-vanish",
    "shift-a-vanish",
    "shift-b-vanish",
    "gap1-vanish",
    "gap2-vanish",
    "equal-sum",
    "offset-sum",
    "oracle",
)


@dataclass(frozen=True)
class LocalSpec:
    """素数 p と λ = (τ, 0, t)"""

    p: int
    tau: int
    t: int

    def __post_init__(self) -> None:
        if not sympy.isprime(self.p):
            raise ValueError(f"p は素数である必要があります: {self.p}")
        if self.tau < 0 or not 0 <= 2 * self.t <= self.tau:
            raise ValueError(f"0 ≤ t ≤ τ/2 を満たしません: τ={self.tau}, t={self.t}")

    @classmethod
    def from_coweight(cls, lam: Coweight, p: int) -> LocalSpec:
        if lam.n != 2 or not lam.is_dominant:
            raise UnsupportedRegime(
                f"局所積分は n=2 の支配的な λ のみ扱います: {lam}", hypothesis="n=2, λ dominant"
            )
        return cls(p=p, tau=lam.ell[0], t=lam.ell[2])

    @property
    def lam(self) -> Coweight:
        return Coweight((self.tau, 0, self.t))


@dataclass(frozen=True)
class DiagData:
    """A = U·diag(p^α w₁, p^β w₂)·V の対角化データ（w₁, w₂ は p と素）

    equal_det_order は ord_p detσ₁ = ord_p detσ₂ の場合を表す。このとき α+β ≠ τ なら積分は 0。
    """

    alpha: int
    beta: int
    sigma_u: HalfIntegralSymMat
    equal_det_order: bool = True
    twist: tuple[int, int] = (1, 1)

    def __post_init__(self) -> None:
        if not 0 <= self.alpha <= self.beta:
            raise InvariantViolation(f"0 ≤ α ≤ β を満たしません: α={self.alpha}, β={self.beta}")
        if self.sigma_u.n != 2:
            raise UnsupportedRegime("局所積分は n=2 のみ扱います", hypothesis="n=2")

    @property
    def coefficients(self) -> tuple[int, int, int]:
        """単数 w を吸収した (a, b, c)"""
        a, b, c = self.sigma_u.abc
        w1, w2 = self.twist
        return a * w1 * w1, b * w1 * w2, c * w2 * w2


@dataclass(frozen=True)
class LocalIntegralValue:
    value: Fraction
    provenance: str
    detail: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"未知の由来タグです: {self.provenance}")

    def to_json(self, spec: LocalSpec, d: DiagData) -> dict:
        return {
            "p": spec.p,
            "tau": spec.tau,
            "t": spec.t,
            "alpha": d.alpha,
            "beta": d.beta,
            "sigmaU": [list(row) for row in d.sigma_u.two_sigma],
            "value": {"num": self.value.numerator, "den": self.value.denominator},
            "provenance": self.provenance,
        }


def _require_coprime(p: int, sigma: HalfIntegralSymMat) -> None:
    if p == 2 or sigma.det_two % p == 0:
        raise UnsupportedRegime(
            f"p={p} が 4·detσ = {sigma.det_two} を割ります", hypothesis="p ∤ 4detσ"
        )


def reduce_to_diagonal(
    A: IntMat,
    sigma1: HalfIntegralSymMat,
    p: int,
    tau: int,
    equal_det_order: bool = True,
) -> DiagData:
    """A の Smith 分解から (α, β, σ_U) を取り出す"""
    if sigma1.n != 2:
        raise UnsupportedRegime("局所積分は n=2 のみ扱います", hypothesis="n=2")
    _require_coprime(p, sigma1)
    snf = smith_normal_form(A)
    d1, d2 = snf.diagonal
    alpha = p_adic_valuation(d1, p)
    beta = p_adic_valuation(d2, p)
    sigma_u = sigma1.transform(snf.U)
    if sigma_u.det != sigma1.det:
        raise InvariantViolation("ᵗUσ₁U の行列式が σ₁ と一致しません")
    if beta > tau or (equal_det_order and alpha + beta != tau):
        log.detail(f"p={p}: α={alpha}, β={beta}, τ={tau} は台の外（積分は 0）")
    return DiagData(
        alpha=alpha,
        beta=beta,
        sigma_u=sigma_u,
        equal_det_order=equal_det_order,
        twist=(d1 // p**alpha, d2 // p**beta),
    )


def ramanujan_sum(ell: int, p: int, m: int) -> int:
    """c_{p^m}(ℓ) = Σ_{y ∈ (ℤ/p^m)^×} e(yℓ/p^m)"""
    if m < 1:
        raise ValueError(f"m ≥ 1 が必要です: {m}")
    if ell % p**m == 0:
        return p**m - p ** (m - 1)
    if ell % p ** (m - 1) == 0:
        return -(p ** (m - 1))
    return 0


def _unit_count(p: int, m: int) -> int:
    return p**m - p ** (m - 1) if m else 1


def _class_sum(p: int, m: int) -> int:
    # 付値 m0−m の剰余類上の指標和
    return ramanujan_sum(1, p, m) if m else 1


def _vcap(arr: np.ndarray, p: int, cap: int) -> np.ndarray:
    """min(v_p(arr), cap)（0 の付値は cap）"""
    v = np.zeros(arr.shape, dtype=np.int64)
    pe = 1
    for _ in range(cap):
        pe *= p
        v += arr % pe == 0
    return v


def support_mask(x, y, z, p: int, tau: int, t: int, alpha: int, beta: int) -> np.ndarray:
    """(x′, y′, z′) が λ(p) の両側剰余類の台に入るか（一般の 0 ≤ α ≤ β ≤ τ）

    すべての成分の最大公約が単位イデアルで、2×2 小行列式の最大公約が (p^t) になる条件を、
    付値を t+1 で打ち切って判定する。
    """
    x, y, z = np.broadcast_arrays(
        np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64), np.asarray(z, dtype=np.int64)
    )
    cap = t + 1
    mod = p**cap
    vx = _vcap(x, p, cap)
    vy = _vcap(y, p, cap)
    vz = _vcap(z, p, cap)
    if alpha == 0 or tau == beta:
        first = np.ones(x.shape, dtype=bool)
    else:
        first = (vx == 0) | (vy == 0) | (vz == 0)
    const = min(alpha + beta, tau, alpha + tau - beta, beta + tau - alpha, 2 * tau - alpha - beta)
    lift = p ** (beta - alpha) % mod
    det = ((x % mod) * (z % mod) - lift * ((y % mod) * (y % mod) % mod)) % mod
    second = np.minimum.reduce(
        [
            np.full(x.shape, const, dtype=np.int64),
            beta + vy,
            tau - alpha + vy,
            alpha + vz,
            tau - alpha + vz,
            beta + vx,
            tau - beta + vx,
            _vcap(det, p, cap),
        ]
    )
    return first & (second == t)


def _zero(detail: str) -> LocalIntegralValue:
    return LocalIntegralValue(Fraction(0), "oracle", detail)


def local_integral_oracle(
    spec: LocalSpec,
    d: DiagData,
    margin: int = 0,
    *,
    full: bool | None = None,
    max_cells: int = 200_000_000,
) -> LocalIntegralValue:
    """剰余環上の有限和として I_{A,p} を厳密に計算する

    台は x′, y′, z′ の p^{t+1} を法とする剰余だけで決まるので、格子の法は p^{t+1+margin}。
    格子より細かい方向の指標は完全な等比和になり、非自明なら積分全体が 0 になる。
    単数倍 (x′,y′,z′) ↦ u(x′,y′,z′) で台は不変なので、指標の引数 k は付値ごとに数えれば足りる。
    full=True なら剰余ごとの個数を持ち、付値類の上で一定であること（実数性）を検査する。
    β > τ と、行列式の位数が等しく α+β ≠ τ の場合は数え上げずに 0 を返す。
    この 2 つは明示公式の det-order-vanish と同じ判定なので、オラクルによる独立な確認にはならない。
    """
    p, tau, t = spec.p, spec.tau, spec.t
    alpha, beta = d.alpha, d.beta
    if beta > tau:
        return _zero("β > τ")
    if d.equal_det_order and alpha + beta != tau:
        return _zero("α+β ≠ τ")
    a, b, c = d.coefficients
    m0 = tau - alpha
    level = t + 1 + margin
    if m0 > level and a % p ** (m0 - level):
        return _zero("x′ 方向の指標和が消える")
    fine = tau - beta - level
    if fine > 0 and (b % p**fine or c % p**fine):
        return _zero("y′/z′ 方向の指標和が消える")

    size = p**level
    if full is None:
        full = size**3 <= _FULL_GRID_LIMIT
    cells = size**3 if full else (level + 1) * size**2
    if cells > max_cells:
        raise UnsupportedRegime(
            f"オラクルの格子点数 {cells} が上限 {max_cells} を超えます（p={p}, 法 p^{level}）",
            hypothesis="oracle feasibility",
        )
    log.detail(f"オラクル: p={p}, τ={tau}, t={t}, α={alpha}, β={beta}, 法 p^{level}, 格子点 {cells}")

    mod_k = p**m0
    lift = p ** (beta - alpha)
    ax = (a % mod_k) * np.arange(size, dtype=np.int64)[:, None] % mod_k
    coef_z = lift * c % mod_k
    xs = np.arange(size, dtype=np.int64)[:, None]
    chunk = max(1, _CHUNK_ELEMENTS // size)

    def sweep_y(y: int):
        y_term = lift * b * y % mod_k
        for start in range(0, size, chunk):
            zs = np.arange(start, min(size, start + chunk), dtype=np.int64)[None, :]
            mask = support_mask(xs, y, zs, p, tau, t, alpha, beta)
            k = (ax + y_term + coef_z * zs) % mod_k
            yield k[mask]

    vol = Fraction(p) ** ((tau - alpha - level) + 2 * (tau - beta - level))
    total = Fraction(0)
    if full:
        counts = np.zeros(mod_k, dtype=np.int64)
        for y in range(size):
            for ks in sweep_y(y):
                counts += np.bincount(ks, minlength=mod_k)
        residues = np.arange(mod_k, dtype=np.int64)
        vals = _vcap(residues, p, m0) if m0 else np.zeros(1, dtype=np.int64)
        for j in range(m0 + 1):
            cls = counts[vals == j]
            if cls.size and np.any(cls != cls[0]):
                raise InvariantViolation(
                    f"付値 {j} の剰余類で個数が一定でありません（実数性が崩れる）"
                )
            if cls.size:
                total += int(cls[0]) * _class_sum(p, m0 - j)
    else:
        by_valuation = np.zeros(m0 + 1, dtype=np.int64)
        for j in range(level + 1):
            y = p**j % size
            mult = _unit_count(p, level - j) if j < level else 1
            for ks in sweep_y(y):
                vk = _vcap(ks, p, m0) if m0 else np.zeros(ks.shape, dtype=np.int64)
                by_valuation += np.bincount(vk, minlength=m0 + 1) * mult
        for j in range(m0 + 1):
            count = int(by_valuation[j])
            if count:
                total += Fraction(count * _class_sum(p, m0 - j), _unit_count(p, m0 - j))
    return LocalIntegralValue(vol * total, "oracle", f"法 p^{level}")


def _case_sum(p: int, tau1: int, a: int, b: int, c: int, hs: Iterable[int]) -> Fraction:
    mod = p**tau1
    total = 0
    for x in range(mod):
        if x % p == 0:
            continue
        inv = pow(x, -1, mod)
        for h in hs:
            z = inv * (1 + h * p ** (tau1 - 1)) % mod
            total += ramanujan_sum(a * x + c * z + b, p, tau1)
    return Fraction(total)


def equal_exponent_sum(spec: LocalSpec, d: DiagData) -> Fraction:
    """α = β = t = τ′: Σ_{xz ≡ 1 (p^{τ′})} c_{p^{τ′}}(ax + cz + b)"""
    tau1 = spec.tau // 2
    a, b, c = d.coefficients
    return _case_sum(spec.p, tau1, a, b, c, (0,))


def offset_sum(spec: LocalSpec, d: DiagData) -> Fraction:
    """α = β = τ′, t = τ′−1: xz ≡ 1 + hp^{τ′−1} (h = 1, …, p−1) にわたる和"""
    tau1 = spec.tau // 2
    a, b, c = d.coefficients
    return _case_sum(spec.p, tau1, a, b, c, range(1, spec.p))


def offset_sum_relaxed(spec: LocalSpec, d: DiagData) -> Fraction:
    """xz ≡ 1 (mod p^{τ′−1}) だけを課した和（offset-sum = この値 − equal-sum）"""
    tau1 = spec.tau // 2
    a, b, c = d.coefficients
    return _case_sum(spec.p, tau1, a, b, c, range(spec.p))


def local_integral_explicit(
    spec: LocalSpec, d: DiagData, require_explicit: bool = False
) -> LocalIntegralValue | NotCovered:
    """明示公式による場合分け。扱えない隅は NotCovered を返す（require_explicit なら送出）"""
    _require_coprime(spec.p, d.sigma_u)
    result = _dispatch(spec, d)
    if isinstance(result, NotCovered) and require_explicit:
        raise result
    return result


def _dispatch(spec: LocalSpec, d: DiagData) -> LocalIntegralValue | NotCovered:
    p, tau, t = spec.p, spec.tau, spec.t
    alpha, beta = d.alpha, d.beta
    a, b, c = d.coefficients
    if alpha + beta != tau or beta > tau:
        if d.equal_det_order or beta > tau:
            return LocalIntegralValue(Fraction(0), "det-order-vanish")
        return NotCovered(f"α+β={alpha + beta} ≠ τ={tau}（行列式の位数が異なる）")
    if tau == 0:
        return LocalIntegralValue(Fraction(1), "unramified")
    if t > 2 * alpha:
        return LocalIntegralValue(Fraction(0), "support-vanish")

    if beta - 1 >= t + 1:
        if a % p and beta >= 2 and tau - 1 >= t + 1:
            return LocalIntegralValue(Fraction(0), "shift-a-vanish")
        if b % p and alpha >= 2 and tau - 2 >= t + 1:
            return LocalIntegralValue(Fraction(0), "shift-b-vanish")
        return NotCovered(f"β−1 ≥ t+1 だが p | a かつ (p | b または α ≤ 1): α={alpha}, t={t}")

    # β−1 ≤ t のとき β−α ∈ {0, 1, 2} の 4 通り
    gap = beta - alpha
    if gap == 1 and t == alpha:
        tau1 = alpha
        if tau1 >= 2:
            return LocalIntegralValue(Fraction(0), "gap1-vanish")
        return NotCovered(f"τ={tau} 奇数, τ′={tau1} ≤ 1")
    if gap == 2 and t == alpha + 1:
        tau1 = alpha + 1
        if tau1 >= 3 or (tau1 >= 2 and a % p and c % p):
            return LocalIntegralValue(Fraction(0), "gap2-vanish")
        return NotCovered(f"α=τ′−1, β=τ′+1, τ′={tau1}（p | ac または τ′ ≤ 1）")
    if gap == 0 and t == alpha:
        if alpha >= 2:
            return LocalIntegralValue(equal_exponent_sum(spec, d), "equal-sum")
        return NotCovered("α=β=t=τ′ で τ′ ≤ 1")
    if gap == 0 and t == alpha - 1:
        if alpha >= 2:
            return LocalIntegralValue(offset_sum(spec, d), "offset-sum")
        return NotCovered("α=β=τ′, t=τ′−1 で τ′ ≤ 1")
    raise InvariantViolation(f"場合分けから漏れたパラメータです: τ={tau}, t={t}, α={alpha}, β={beta}")


def local_integral(
    spec: LocalSpec, d: DiagData, margin: int = 0, max_cells: int = 200_000_000
) -> LocalIntegralValue:
    """明示公式が使えればそれを、だめならオラクルで計算する"""
    result = local_integral_explicit(spec, d)
    if isinstance(result, NotCovered):
        log.detail(f"明示公式の対象外（{result.reason}）→ オラクルで計算")
        return local_integral_oracle(spec, d, margin, max_cells=max_cells)
    return result


def trivial_bound_general(p: int, tau: int, alphas: tuple[int, ...]) -> Fraction:
    """∏_j p^{j(τ−α_j)}"""
    return Fraction(p) ** sum((j + 1) * (tau - a) for j, a in enumerate(alphas))


def trivial_bound(spec: LocalSpec, d: DiagData) -> Fraction:
    """p^{(τ−α)+2(τ−β)}"""
    return trivial_bound_general(spec.p, spec.tau, (d.alpha, d.beta))


def root_count_bound(spec: LocalSpec, p: int | None = None) -> float:
    """β−1 ≤ t の場合の上界 2p²·p^{3τ/4}"""
    p = spec.p if p is None else p
    return 2 * p**2 * p ** (0.75 * spec.tau)


def conj_exponent(spec: LocalSpec, epsilon: float = CONJ_EPSILON) -> float:
    """(1−ε)⟨λ,ρ⟩ − ετ、⟨λ,ρ⟩ = 3τ/2 − t"""
    return (1 - epsilon) * (1.5 * spec.tau - spec.t) - epsilon * spec.tau


def admissible_triples(tau: int) -> list[tuple[int, int, int]]:
    """α+β = τ, α ≤ β, 0 ≤ t ≤ ⌊τ/2⌋ を満たす (t, α, β)"""
    return [(t, alpha, tau - alpha) for t in range(tau // 2 + 1) for alpha in range(tau // 2 + 1)]


def forms_for_prime(p: int) -> tuple[HalfIntegralSymMat, ...]:
    """p ∤ 4detσ を満たす検証用の 4 つの σ_U（p | a となる形を 1 つ含む）"""
    candidates = [(1, 0, 1), (p, 1, 1), (1, 1, 1), (1, 0, 2), (2, 1, 3), (1, 1, 2)]
    forms = [HalfIntegralSymMat.from_abc(*abc) for abc in candidates]
    return tuple(f for f in forms if f.det_two % p)[:4]


def _minors_attain_t(spec: LocalSpec, d: DiagData) -> bool:
    """台の全点で (p^{2α}, p^α x′, p^β y′, p^α z′) = (p^t) が成り立つことが保証されるか"""
    tau, t = spec.tau, spec.t
    alpha, beta = d.alpha, d.beta
    if 2 * alpha == t:
        return True
    if _xz_coprime(spec, d):
        return True
    # τ = 2τ′, α = τ′−1, β = τ′+1, t = τ′ ≥ 3 では x′ の付値がちょうど 1
    return tau % 2 == 0 and t == tau // 2 >= 3 and alpha == t - 1 and beta == t + 1


def _xz_coprime(spec: LocalSpec, d: DiagData) -> bool:
    """台の全点で x′, z′ の一方が単数になることが保証されるか（このとき α = t）"""
    alpha, beta = d.alpha, d.beta
    if alpha != spec.t or alpha < 1:
        return False
    return beta == alpha or (beta == alpha + 1 and alpha >= 2)


def shift_invariant_vanishing(spec: LocalSpec, d: DiagData) -> frozenset[str]:
    """台全体が ±E/p の平行移動で閉じ、対応する係数が単数になる方向

    返り値が空でなければ、指標が平行移動で非自明な定数倍になるので I_{A,p} = 0。
    台の上では p^α x′, p^β y′, p^α z′ ∈ (p^t) なので x′, y′, z′ の付値には下限がある。
    "-weak" は (p^{2α}, p^α x′, p^β y′, p^α z′) = (p^t) が全点で成り立つときの、
    整除条件を p^{t+1} から p^t に、y 方向では τ−2 ≥ t+1 を τ−2 ≥ t に緩めた形。
    "y-shift-variant" は全点で (x′, z′) = 1 かつ α = t のとき α ≥ 1 で足りる形。
    """
    p, tau, t = spec.p, spec.tau, spec.t
    alpha, beta = d.alpha, d.beta
    a, b, c = d.coefficients
    vx = vz = max(0, t - alpha)
    vy = max(0, t - beta)
    tags = set()
    if a % p and beta >= 2 and tau - 1 >= t + 1:
        if beta - 1 + vz >= t + 1:
            tags.add("x-shift")
        elif beta - 1 + vz >= t and _minors_attain_t(spec, d):
            tags.add("x-shift-weak")
    if b % p and beta - 1 + vy >= t:
        if alpha >= 2 and tau - 2 >= t + 1 and beta - 1 + vy >= t + 1:
            tags.add("y-shift")
        elif alpha >= 2 and tau - 2 >= t and _minors_attain_t(spec, d):
            tags.add("y-shift-weak")
        if alpha >= 1 and tau - 2 >= t and _xz_coprime(spec, d):
            tags.add("y-shift-variant")
    if c % p and alpha >= 2 and 2 * alpha - 1 >= t + 1:
        if alpha - 1 + vx >= t + 1:
            tags.add("z-shift")
        elif alpha - 1 + vx >= t and _minors_attain_t(spec, d):
            tags.add("z-shift-weak")
    return frozenset(tags)


@dataclass
class SweepRecord:
    """1 つのパラメータ点での明示公式とオラクルの比較結果"""

    spec: LocalSpec
    diag: DiagData
    explicit: LocalIntegralValue | NotCovered
    oracle: LocalIntegralValue

    @property
    def covered(self) -> bool:
        return not isinstance(self.explicit, NotCovered)

    @property
    def match(self) -> bool:
        return (not self.covered) or self.explicit.value == self.oracle.value

    @property
    def within_trivial_bound(self) -> bool:
        return abs(self.oracle.value) <= trivial_bound(self.spec, self.diag)

    def to_json(self) -> dict:
        row = self.oracle.to_json(self.spec, self.diag)
        row["explicit"] = (
            None
            if not self.covered
            else {
                "num": self.explicit.value.numerator,
                "den": self.explicit.value.denominator,
                "provenance": self.explicit.provenance,
            }
        )
        row["match"] = self.match
        return row


def sweep(
    primes: Iterable[int],
    taus: Iterable[int],
    forms: Iterable[HalfIntegralSymMat] | None = None,
    margin: int = 0,
    max_cells: int = 200_000_000,
) -> Iterator[SweepRecord]:
    """(p, τ, t, α, β, σ_U) を走査して明示公式とオラクルを並べる"""
    taus = list(taus)
    given = None if forms is None else tuple(forms)
    for p in primes:
        for form in given if given is not None else forms_for_prime(p):
            if form.det_two % p == 0:
                log.warn(f"p={p} は 4detσ を割るので {form} を飛ばします")
                continue
            for tau in taus:
                for t, alpha, beta in admissible_triples(tau):
                    spec = LocalSpec(p=p, tau=tau, t=t)
                    d = DiagData(alpha=alpha, beta=beta, sigma_u=form)
                    yield SweepRecord(
                        spec=spec,
                        diag=d,
                        explicit=local_integral_explicit(spec, d),
                        oracle=local_integral_oracle(spec, d, margin, max_cells=max_cells),
                    )


@lru_cache(maxsize=None)
def _calibrate(p: int, forms: tuple[HalfIntegralSymMat, ...], max_tau: int) -> float:
    best = 1.0
    for tau in range(max_tau + 1):
        for t, alpha, beta in admissible_triples(tau):
            spec = LocalSpec(p=p, tau=tau, t=t)
            for form in forms:
                value = local_integral(spec, DiagData(alpha=alpha, beta=beta, sigma_u=form))
                if value.value:
                    best = max(best, abs(float(value.value)) / p ** conj_exponent(spec))
    log.detail(f"C({p}) = {best:.6g}（τ ≤ {max_tau} で較正）")
    return best


def calibrate_conj_constant(
    p: int, forms: Iterable[HalfIntegralSymMat] | None = None, max_tau: int = 6
) -> float:
    """|I| ≤ C(p)·p^{0.99⟨λ,ρ⟩ − 0.01τ} の定数 C(p)（1 以上）"""
    forms = forms_for_prime(p) if forms is None else tuple(forms)
    return _calibrate(p, forms, max_tau)


def conj_bound_check(
    spec: LocalSpec, d: DiagData, value: Fraction, constant: float | None = None
) -> bool:
    """ε = 0.01 での上界 |I| ≤ C(p)·p^{(1−ε)(3τ/2−t) − ετ} を満たすか"""
    _require_coprime(spec.p, d.sigma_u)
    if value == 0:
        return True
    if constant is None:
        constant = calibrate_conj_constant(spec.p)
    exponent = conj_exponent(spec)
    lhs = math.log(abs(value.numerator)) - math.log(value.denominator)
    rhs = math.log(constant) + exponent * math.log(spec.p)
    return lhs <= rhs + 1e-12

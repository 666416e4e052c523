"""GSp(2n, ℝ) の正則離散系列：行列係数・L^ℓ ノルム・形式次数・Harish-Chandra 分解

閉じた式の値はすべて Fraction で返す。浮動小数点を使うのは行列係数の評価と
L^ℓ ノルムの求積オラクルだけ。
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import expm
from scipy.stats import unitary_group

from . import logger as log
from .cubature import adaptive_cubature
from .errors import DivergentIntegral, InvariantViolation, NotSymplectic, UnsupportedRegime

SIMILITUDE_RTOL = 1e-10


def _j_matrix(n: int) -> np.ndarray:
    z = np.zeros((n, n))
    eye = np.eye(n)
    return np.block([[z, eye], [-eye, z]])


@dataclass(frozen=True)
class GspRealElement:
    """M = (A B; C D) ∈ GSp(2n, ℝ) と相似係数 r(M)"""

    entries: np.ndarray
    r: float = field(init=False)

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise NotSymplectic(f"2n×2n 行列ではありません: {m.shape}")
        n = m.shape[0] // 2
        J = _j_matrix(n)
        prod = m.T @ J @ m
        r = prod[0, n]
        scale = max(1.0, float(np.max(np.abs(prod))))
        if r == 0 or np.max(np.abs(prod - r * J)) > SIMILITUDE_RTOL * scale:
            raise NotSymplectic("ᵗMJM が J の定数倍になりません")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "r", float(r))

    @property
    def n(self) -> int:
        return self.entries.shape[0] // 2

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        n = self.n
        m = self.entries
        return m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]

    def __matmul__(self, other: GspRealElement) -> GspRealElement:
        return GspRealElement(self.entries @ other.entries)

    def scaled(self, z: float) -> GspRealElement:
        """中心元 z·I との積"""
        return GspRealElement(z * self.entries)


@dataclass(frozen=True)
class CoeffParams:
    n: int
    kappa: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n ≥ 1 が必要です: {self.n}")
        if self.kappa <= self.n:
            raise UnsupportedRegime(
                f"κ={self.kappa} ≤ n={self.n} では離散系列になりません", hypothesis="κ > n"
            )

    @property
    def integrable(self) -> bool:
        return self.kappa > 2 * self.n


def _check_rank(g: GspRealElement, params: CoeffParams) -> None:
    if g.n != params.n:
        raise ValueError(f"行列のサイズ 2n={2 * g.n} と n={params.n} が一致しません")


def matrix_coeff(g: GspRealElement, params: CoeffParams) -> complex:
    """r^{nκ/2}·2^{nκ}/det(A+D+i(B−C))^κ（r(g) < 0 なら 0）"""
    _check_rank(g, params)
    if g.r < 0:
        return 0j
    A, B, C, D = g.blocks
    n, k = params.n, params.kappa
    sign, logabs = np.linalg.slogdet(A + D + 1j * (B - C))
    magnitude = math.exp(n * k / 2 * math.log(g.r) + n * k * math.log(2) - k * logabs)
    return complex(magnitude * np.conj(sign) ** k)


def _gram_log_det(g: GspRealElement) -> float:
    # |det(A+D+i(B−C))|² = det(2rI + AᵗA + BᵗB + CᵗC + DᵗD + i(AᵗC − CᵗA + BᵗD − DᵗB))、ここで XᵗY = X·ᵗY
    A, B, C, D = g.blocks
    n = g.n
    real = 2 * g.r * np.eye(n) + A @ A.T + B @ B.T + C @ C.T + D @ D.T
    imag = A @ C.T - C @ A.T + B @ D.T - D @ B.T
    _, logabs = np.linalg.slogdet(real + 1j * imag)
    return float(logabs)


def matrix_coeff_abs(g: GspRealElement, params: CoeffParams) -> float:
    """|f(g)| をエルミート行列の行列式から求める"""
    _check_rank(g, params)
    if g.r <= 0:
        raise ValueError(f"r(g) > 0 が必要です: r={g.r}")
    n, k = params.n, params.kappa
    return math.exp(n * k / 2 * math.log(g.r) + n * k * math.log(2) - k / 2 * _gram_log_det(g))


def degen_terms(rows) -> tuple[object, object, tuple]:
    """4×4 行列の 2 本の 8 成分ベクトルの二乗和と、Degen の 8 平方恒等式の X₁, …, X₈

    成分が int なら厳密に計算される。
    """
    m = [list(row) for row in rows]
    if len(m) != 4 or any(len(row) != 4 for row in m):
        raise ValueError("n=2（4×4 行列）のみ扱います")
    A11, A12, B11, B12 = m[0]
    A21, A22, B21, B22 = m[1]
    C11, C12, D11, D12 = m[2]
    C21, C22, D21, D22 = m[3]
    first = A11**2 + A12**2 + B11**2 + B12**2 + C11**2 + C12**2 + D11**2 + D12**2
    second = A21**2 + A22**2 + B21**2 + B22**2 + C21**2 + C22**2 + D21**2 + D22**2
    X = (
        A11 * A21 + A12 * A22 + B11 * B21 + B12 * B22 + C11 * C21 + C12 * C22 + D11 * D21 + D12 * D22,
        A11 * C21 + A12 * C22 + B11 * D21 + B12 * D22 - C11 * A21 - C12 * A22 - D11 * B21 - D12 * B22,
        A11 * A22 - A12 * A21 + B11 * D22 - B12 * D21 - C11 * C22 + C12 * C21 - D12 * B21 + D11 * B22,
        A11 * C22 - A12 * C21 + B11 * B22 - B12 * B21 - C12 * A21 + C11 * A22 - D11 * D22 + D12 * D21,
        A11 * B21 - A12 * D22 - B11 * A21 + B12 * C22 - C11 * D21 - C12 * B22 + D12 * A22 + D11 * C21,
        A11 * D21 - A12 * B22 - B11 * C21 + B12 * A22 + C11 * B21 + C12 * D22 - D11 * A21 - D12 * C22,
        A11 * D22 + A12 * B21 - B11 * A22 - B12 * C21 + C11 * B22 - C12 * D21 + D11 * C22 - D12 * A21,
        A11 * B22 + A12 * D21 - B11 * C22 - B12 * A21 - C11 * D22 + C12 * B21 - D11 * A22 + C21 * D12,
    )
    return first, second, X


def degen_abs_n2(g: GspRealElement, kappa: int) -> tuple[float, float]:
    """n=2 の |f(g)| の厳密値と上界 (8r)^{κ/2}/(2r + Σg²)^{κ/2}"""
    if g.n != 2:
        raise UnsupportedRegime("Degen の恒等式による評価は n=2 のみです", hypothesis="n=2")
    if g.r <= 0:
        raise ValueError(f"r(g) > 0 が必要です: r={g.r}")
    r = g.r
    first, second, X = degen_terms(g.entries.tolist())
    total_sq = first + second
    denom = 4 * r * r + 2 * r * total_sq + sum(x * x for x in X[2:])
    exact = math.exp(kappa * math.log(4 * r) - kappa / 2 * math.log(denom))
    bound = math.exp(kappa / 2 * (math.log(8 * r) - math.log(2 * r + total_sq)))
    return exact, bound


def formal_degree_constant(n: int) -> Fraction:
    """Haar 測度の正規化定数 a = (2^{n(n+1)}∏_{j≤n} j!)^{-1}"""
    return Fraction(1, 2 ** (n * (n + 1)) * math.prod(math.factorial(j) for j in range(1, n + 1)))


def _pairs(n: int):
    return ((i, j) for i in range(1, n + 1) for j in range(i, n + 1))


def formal_degree(kappa: int, n: int, constant: Fraction | None = None) -> Fraction:
    """d_κ = a·∏_{1≤i≤j≤n}(2κ − (i+j))"""
    if kappa <= 2 * n:
        raise DivergentIntegral(f"κ={kappa} ≤ 2n={2 * n} では形式次数の積分が発散します")
    a = formal_degree_constant(n) if constant is None else Fraction(constant)
    return a * math.prod(2 * kappa - (i + j) for i, j in _pairs(n))


def lp_norm_closed(kappa: int, ell: int | Fraction, n: int) -> Fraction:
    """‖f‖_ℓ^ℓ = 2^{n(n+1)}∏j!/∏_{i≤j}(ℓκ − (i+j))"""
    k = Fraction(ell) * kappa
    if k <= 2 * n:
        raise DivergentIntegral(f"ℓκ={k} ≤ 2n={2 * n} では L^ℓ ノルムが発散します")
    value = 1 / formal_degree_constant(n)
    for i, j in _pairs(n):
        value /= k - (i + j)
    return value


def _radial_tail(K: float, U: float) -> float:
    # u₁ > U の部分（厳密）と u₂ − u₁ > U − 4 の部分（上から評価）
    s = K / 2
    log_first = (3 - K) * math.log(U) - math.log((K - 3) * (s - 1) * (s - 2))
    log_second = (1 - s) * math.log(4) + (2 - s) * math.log(U - 4) - math.log((s - 1) * (s - 2))
    return math.exp((2 * K - 1) * math.log(2) + log_first) + math.exp(
        (2 * K - 1) * math.log(2) + log_second
    )


def lp_norm_quadrature_n2(kappa: int, ell: int | Fraction, rtol: float = 1e-8) -> float:
    """n=2 の 2^{2K−2}∫_{[4,∞)²}(u₁u₂)^{−K/2}|u₁−u₂| du（K = ℓκ）を数値積分する

    対称性で u₁ < u₂ に制限し、u₁ = 4eᵃ, u₂ − u₁ = 4(eᵇ − 1) と置いて [0, L]² 上で積分する。
    """
    K = float(Fraction(ell) * kappa)
    if K <= 4:
        raise DivergentIntegral(f"ℓκ={K} ≤ 4 では積分が発散します")
    s = K / 2

    def integrand(pts: np.ndarray) -> np.ndarray:
        a, b = pts[..., 0], pts[..., 1]
        u1 = 4 * np.exp(a)
        v = 4 * np.expm1(b)
        logs = (2 * K - 1) * math.log(2) - s * (np.log(u1) + np.log(u1 + v)) + np.log(u1) + math.log(4) + b
        return np.exp(logs) * v

    def rectangle(U: float) -> float:
        L = math.log(U / 4)
        return adaptive_cubature(integrand, [0.0, 0.0], [L, L], rtol=rtol * 1e-2, initial_splits=4).real

    U = 64.0
    base = rectangle(U)
    while _radial_tail(K, U) > rtol * base:
        U *= 2
        if U > 1e300:
            raise DivergentIntegral(f"ℓκ={K}: 裾の評価が許容誤差まで下がりません")
    value = rectangle(U)
    log.detail(f"L^ℓ ノルム求積: K={K}, U={U:.3g}, 値 {value:.12g}")
    return value


def lemma_sn_sides(b) -> tuple[Fraction, Fraction]:
    """Σ_σ sgn(σ)/∏_k(b_{σ(1)}+⋯+b_{σ(k)}) と 2ⁿ∏_{i<j}(b_j−b_i)/∏_{i≤j}(b_i+b_j)"""
    bs = [Fraction(x) for x in b]
    n = len(bs)
    lhs = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i, j in itertools.combinations(range(n), 2) if perm[i] > perm[j])
        denom = Fraction(1)
        partial = Fraction(0)
        for idx in perm:
            partial += bs[idx]
            denom *= partial
        if denom == 0:
            raise ValueError(f"部分和が 0 になります: {perm}")
        lhs += (-1) ** inversions / denom
    num = Fraction(2) ** n
    for i, j in itertools.combinations(range(n), 2):
        num *= bs[j] - bs[i]
    den = Fraction(1)
    for i, j in _pairs(n):
        den *= bs[i - 1] + bs[j - 1]
    if den == 0:
        raise ValueError("b_i + b_j = 0 となる組があります")
    return lhs, num / den


def cayley_image(g: GspRealElement) -> np.ndarray:
    """g′ = τ⁻¹gτ, τ = (I iI; iI I)"""
    n = g.n
    eye = np.eye(n)
    tau = np.block([[eye, 1j * eye], [1j * eye, eye]])
    tau_inv = 0.5 * np.block([[eye, -1j * eye], [-1j * eye, eye]])
    return tau_inv @ g.entries @ tau


@dataclass(frozen=True)
class HarishChandraFactors:
    """g′ = (I 0; β̄α⁻¹ I)·diag(α, ᵗα⁻¹)·(I α⁻¹β; 0 I)"""

    lower: np.ndarray
    middle: np.ndarray
    upper: np.ndarray
    alpha: np.ndarray

    def product(self) -> np.ndarray:
        return self.lower @ self.middle @ self.upper


def hc_decompose(g: GspRealElement) -> HarishChandraFactors:
    """r^{−1/2}g ∈ Sp(2n, ℝ) の Cayley 像を P⁺K_ℂP⁻ に分解する"""
    if g.r <= 0:
        raise ValueError(f"r(g) > 0 が必要です: r={g.r}")
    n = g.n
    h = g.scaled(1 / math.sqrt(g.r))
    gp = cayley_image(h)
    alpha, beta = gp[:n, :n], gp[:n, n:]
    if abs(np.linalg.det(alpha)) < 1e-12:
        raise ValueError("α が特異です")
    alpha_inv = np.linalg.inv(alpha)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    lower = np.block([[eye, zero], [gp[n:, :n] @ alpha_inv, eye]])
    middle = np.block([[alpha, zero], [zero, np.linalg.inv(alpha.T)]])
    upper = np.block([[eye, alpha_inv @ beta], [zero, eye]])
    factors = HarishChandraFactors(lower, middle, upper, alpha)
    if not np.allclose(factors.product(), gp, rtol=1e-10, atol=1e-10):
        raise InvariantViolation("Harish-Chandra 分解の積が g′ を再構成しません")
    return factors


def hc_matrix_coeff(g: GspRealElement, params: CoeffParams) -> complex:
    """中央因子から求めた行列係数 det(α)^{−κ}（matrix_coeff との照合用）"""
    factors = hc_decompose(g)
    return complex(np.linalg.det(factors.alpha) ** (-params.kappa))


def holomorphic_hc_parameter(kappa: int, n: int) -> tuple[int, ...]:
    """λ_κ + δ_G = (1−κ, 2−κ, …, n−κ)"""
    return tuple(j - kappa for j in range(1, n + 1))


def _positive_roots_sp(n: int) -> list[tuple[int, ...]]:
    # e_j − e_i (i<j) はコンパクト、e_i + e_j (i ≤ j) は非コンパクト
    roots = []
    for i, j in itertools.combinations(range(n), 2):
        v = [0] * n
        v[j], v[i] = 1, -1
        roots.append(tuple(v))
    for i in range(n):
        for j in range(i, n):
            v = [0] * n
            v[i] += 1
            v[j] += 1
            roots.append(tuple(v))
    return roots


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def _noncompact(root: tuple[int, ...]) -> bool:
    return all(c >= 0 for c in root)


def tvhs_integrable(kappa: int, n: int) -> bool:
    """|⟨λ, β⟩| > ½Σ_{α>0}|⟨α, β⟩| がすべての非コンパクトルート β で成り立つか"""
    lam = holomorphic_hc_parameter(kappa, n)
    roots = _positive_roots_sp(n)
    return all(
        2 * abs(_dot(lam, beta)) > sum(abs(_dot(alpha, beta)) for alpha in roots)
        for beta in roots
        if _noncompact(beta)
    )


def integrability_predicate(kappa: int, n: int) -> bool:
    """π_κ が可積分か（κ > 2n）。TVHS 判定と食い違えば InvariantViolation"""
    CoeffParams(n=n, kappa=kappa)
    result = kappa > 2 * n
    if tvhs_integrable(kappa, n) != result:
        raise InvariantViolation(f"κ={kappa}, n={n}: 可積分性の 2 つの判定が一致しません")
    return result


def hc_formal_degree_ratio(kappa: int, n: int) -> Fraction:
    """∏_{β>0}|⟨λ+δ, β⟩|/|⟨δ, β⟩|（d_κ に比例する）"""
    lam = holomorphic_hc_parameter(kappa, n)
    delta = tuple(range(1, n + 1))
    value = Fraction(1)
    for beta in _positive_roots_sp(n):
        value *= Fraction(abs(_dot(lam, beta)), abs(_dot(delta, beta)))
    return value


def central_character_sign(z: float, kappa: int, n: int) -> int:
    """中心指標 sgn(z)^{nκ}"""
    if z == 0:
        raise ValueError("z = 0 は中心元ではありません")
    if z > 0 or (n * kappa) % 2 == 0:
        return 1
    return -1


def random_sp_lie(n: int, rng: np.random.Generator, scale: float = 2.0) -> np.ndarray:
    """sp(2n, ℝ) の元 (a b; c −ᵗa)（b, c 対称）で Frobenius ノルム ≤ scale のもの"""
    a = rng.normal(size=(n, n))
    b = rng.normal(size=(n, n))
    c = rng.normal(size=(n, n))
    b = (b + b.T) / 2
    c = (c + c.T) / 2
    X = np.block([[a, b], [c, -a.T]])
    return X * (scale * rng.uniform(0.0, 1.0) / np.linalg.norm(X))


def random_gsp_real(
    n: int, rng: np.random.Generator, scale: float = 2.0, negative: bool = False
) -> GspRealElement:
    """exp(ランダムな Lie 環元) × 正の中心スカラー（negative なら diag(I, −I) も掛ける）"""
    g = expm(random_sp_lie(n, rng, scale)) * math.exp(rng.normal(scale=0.5))
    if negative:
        g = g @ np.diag([1.0] * n + [-1.0] * n)
    return GspRealElement(g)


def random_compact(n: int, rng: np.random.Generator) -> GspRealElement:
    """K_∞ ≅ U(n) の Haar ランダムな元を (A B; −B A) として埋め込む"""
    u = unitary_group.rvs(n, random_state=rng) if n > 1 else np.array([[np.exp(2j * np.pi * rng.uniform())]])
    A, B = u.real, u.imag
    return GspRealElement(np.block([[A, B], [-B, A]]))

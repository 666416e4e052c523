"""幾何側の有限和：A 行列の列挙・アルキメデス因子・局所因子の組み立て

ᵗAσ₁A = rσ₂ かつ r·ᵗA⁻¹ が整数行列となる A を ±1 を法として列挙し、
各 A について I_∞·∏_p I_{A,p} を足し合わせる。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
import sympy

from . import logger as log
from .arch_coeff import formal_degree
from .cubature import adaptive_cubature
from .errors import UnsupportedRegime
from .local_gsp4 import LocalIntegralValue, LocalSpec, local_integral, reduce_to_diagonal
from .padic_cartan import p_adic_valuation
from .quadform import HalfIntegralSymMat
from .root_data import Coweight

__all__ = [
    "AMatrixSolution",
    "GeomResult",
    "GeomTerm",
    "HalfIntegralSymMat",
    "SimilitudeSpec",
    "arch_factor",
    "arch_factor_quadrature_n2",
    "enumerate_A",
    "enumerate_A_bruteforce",
    "gamma_n",
    "geometric_side",
    "herz_integral",
    "n1_count",
    "normalized_L",
    "solution_count_sanity",
]

MP_DPS = 40


@dataclass(frozen=True)
class SimilitudeSpec:
    """有限集合 𝕊 の各素数 p と λ_p（ℓ₀ = r_p）"""

    primes: tuple[tuple[int, Coweight], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for p, lam in self.primes:
            if not sympy.isprime(p):
                raise ValueError(f"p は素数である必要があります: {p}")
            if p in seen:
                raise ValueError(f"素数 {p} が重複しています")
            if not lam.is_dominant:
                raise ValueError(f"λ_{p} = {lam} が支配的ではありません")
            seen.add(p)

    @classmethod
    def from_pairs(cls, pairs) -> SimilitudeSpec:
        """[(p, (ℓ₀, ℓ₁, …)), …] から作る"""
        return cls(tuple(sorted((int(p), Coweight(tuple(lam))) for p, lam in pairs)))

    @property
    def r(self) -> int:
        """大域相似係数 r = ∏ p^{r_p}"""
        return math.prod(p**lam.l0 for p, lam in self.primes)

    @property
    def n(self) -> int | None:
        return self.primes[0][1].n if self.primes else None

    def key(self) -> str:
        return ";".join(f"{p}:{lam}" for p, lam in self.primes)


@dataclass(frozen=True, order=True)
class AMatrixSolution:
    """±1 を法とした代表（行優先で最初の非零成分が正）"""

    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def normalized(cls, rows) -> AMatrixSolution:
        rows = tuple(tuple(int(c) for c in row) for row in rows)
        first = next((c for row in rows for c in row if c), 0)
        if first < 0:
            rows = tuple(tuple(-c for c in row) for row in rows)
        return cls(rows)

    @property
    def matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.rows)

    @property
    def det(self) -> int:
        return int(self.matrix.det())

    def dual(self, r: int) -> AMatrixSolution:
        """r·A⁻¹ の正規代表（σ₁ = σ₂ のとき解集合の対合）"""
        inv = self.matrix.inv() * r
        return AMatrixSolution.normalized(inv.tolist())

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.rows]


def _quadratic_value(two_sigma: tuple[tuple[int, ...], ...], v: tuple[int, ...]) -> int:
    return sum(two_sigma[i][j] * v[i] * v[j] for i in range(len(v)) for j in range(len(v)))


def _bilinear(two_sigma, u, v) -> int:
    return sum(two_sigma[i][j] * u[i] * v[j] for i in range(len(u)) for j in range(len(v)))


def _vectors_of_norm(sigma: HalfIntegralSymMat, target: int) -> list[tuple[int, ...]]:
    """ᵗv(2σ)v = target を満たす整数ベクトル（|v_i| ≤ ⌊√(target·(2σ)⁻¹_ii)⌋ の箱で探す）"""
    inv = sigma.two_matrix.inv()
    bounds = []
    for i in range(sigma.n):
        q = sympy.Rational(target) * inv[i, i]
        bounds.append(math.isqrt(int(sympy.floor(q))))
    grids = np.meshgrid(*[np.arange(-b, b + 1, dtype=np.int64) for b in bounds], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    two = np.array(sigma.two_sigma, dtype=np.int64)
    values = np.einsum("ki,ij,kj->k", pts, two, pts)
    return [tuple(int(c) for c in row) for row in pts[values == target]]


def _integral_dual(A: sympy.Matrix, r: int) -> bool:
    # r·A⁻¹ = r·adj(A)/det(A)
    det = int(A.det())
    return det != 0 and all(int(c) % det == 0 for c in A.adjugate() * r)


def enumerate_A(
    sigma1: HalfIntegralSymMat, sigma2: HalfIntegralSymMat, r: int
) -> list[AMatrixSolution]:
    """ᵗAσ₁A = rσ₂, r·ᵗA⁻¹ ∈ Mₙ(ℤ) を満たす A の ±1 類（列ごとの楕円体内の格子点から組み立てる）"""
    if sigma1.n != sigma2.n:
        raise ValueError(f"σ₁ と σ₂ のサイズが違います: {sigma1.n}, {sigma2.n}")
    if r < 1:
        raise ValueError(f"r は正の整数である必要があります: {r}")
    n = sigma1.n
    two1 = sigma1.two_sigma
    two2 = sigma2.two_sigma
    columns = [_vectors_of_norm(sigma1, r * two2[j][j]) for j in range(n)]
    log.detail(f"列の候補数: {[len(c) for c in columns]}（r={r}）")

    found: set[AMatrixSolution] = set()

    def extend(chosen: list[tuple[int, ...]]) -> None:
        j = len(chosen)
        if j == n:
            A = sympy.Matrix(n, n, lambda i, k: chosen[k][i])
            if _integral_dual(A, r):
                found.add(AMatrixSolution.normalized(A.tolist()))
            return
        for v in columns[j]:
            if all(_bilinear(two1, chosen[i], v) == r * two2[i][j] for i in range(j)):
                extend(chosen + [v])

    extend([])
    return sorted(found)


def enumerate_A_bruteforce(
    sigma1: HalfIntegralSymMat, sigma2: HalfIntegralSymMat, r: int
) -> list[AMatrixSolution]:
    """全成分の箱 |A_ij| ≤ √(r·max(σ₂)_ii/λ_min(σ₁)) を総当たりする照合用の列挙"""
    n = sigma1.n
    lam_min = float(np.linalg.eigvalsh(np.array(sigma1.two_sigma, dtype=float) / 2).min())
    max_diag = max(sigma2.two_sigma[i][i] for i in range(n)) / 2
    bound = math.isqrt(math.ceil(r * max_diag / lam_min)) + 1
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * (n * n)), indexing="ij")
    mats = np.stack([g.ravel() for g in grids], axis=-1).reshape(-1, n, n)
    two1 = np.array(sigma1.two_sigma, dtype=np.int64)
    target = r * np.array(sigma2.two_sigma, dtype=np.int64)
    forms = np.einsum("kij,il,klm->kjm", mats, two1, mats)
    hits = mats[np.all(forms == target, axis=(1, 2))]
    found = set()
    for m in hits:
        A = sympy.Matrix(m.tolist())
        if _integral_dual(A, r):
            found.add(AMatrixSolution.normalized(A.tolist()))
    return sorted(found)


def n1_count(sigma: HalfIntegralSymMat) -> int:
    """ᵗAσA = σ を満たす A ∈ GLₙ(ℤ) の ±1 類の個数"""
    return len(enumerate_A(sigma, sigma, 1))


def solution_count_sanity(sigma: HalfIntegralSymMat, r: int, constant: float = 1.0) -> bool:
    """#{A} ≤ C·n₁·r を確かめる（破れたら警告して False）"""
    count = len(enumerate_A(sigma, sigma, r))
    bound = constant * n1_count(sigma) * r
    if count > bound:
        log.warn(f"{sigma}, r={r}: 解の個数 {count} が目安 {bound:g} を超えました")
        return False
    return True


def gamma_n(a, n: int) -> mpmath.mpf:
    """Siegel のガンマ関数 Γₙ(a) = π^{n(n−1)/4}∏_{j=1}^n Γ(a − (j−1)/2)"""
    with mpmath.workdps(MP_DPS):
        a = mpmath.mpf(a)
        return mpmath.pi ** (mpmath.mpf(n * (n - 1)) / 4) * mpmath.fprod(
            mpmath.gamma(a - mpmath.mpf(j - 1) / 2) for j in range(1, n + 1)
        )


def herz_integral(Lambda, X0, delta, n: int) -> mpmath.mpf:
    """∫_{Sₙ(ℝ)} e^{i tr ΛY} det(X₀+iY)^{−(δ+(n+1)/2)} dY の閉じた式（dY は j ≤ k の成分の積）"""
    if delta <= mpmath.mpf(n - 1) / 2:
        raise ValueError(f"δ > (n−1)/2 が必要です: δ={delta}")
    with mpmath.workdps(MP_DPS):
        L = mpmath.matrix(np.asarray(Lambda, dtype=float).tolist())
        X = mpmath.matrix(np.asarray(X0, dtype=float).tolist())
        trace = sum((L * X)[i, i] for i in range(n))
        return (
            2**n
            * mpmath.pi ** (mpmath.mpf(n * (n + 1)) / 2)
            * mpmath.det(L) ** mpmath.mpf(delta)
            * mpmath.exp(-trace)
            / gamma_n(mpmath.mpf(delta) + mpmath.mpf(n + 1) / 2, n)
        )


def _require_integrable(kappa: int, n: int) -> None:
    if kappa <= 2 * n:
        raise UnsupportedRegime(
            f"κ={kappa} ≤ 2n={2 * n} では f_∞ が可積分になりません", hypothesis="κ > 2n"
        )


def arch_factor(
    sigma1: HalfIntegralSymMat,
    sigma2: HalfIntegralSymMat,
    kappa: int,
    n: int | None = None,
    fd_constant: Fraction | None = None,
) -> mpmath.mpf:
    """I_∞ = d_κ 2^{−n(n−1)/2}(4π)^{nκ}(detσ₂/detσ₁)^{κ/2}(detσ₁)^{κ−(n+1)/2}e^{−2πtr(σ₁+σ₂)}/Γₙ(κ)

    A によらない。対数空間で計算して最後に指数をとる。
    """
    n = sigma1.n if n is None else n
    if sigma1.n != n or sigma2.n != n:
        raise ValueError(f"σ のサイズが n={n} と一致しません")
    _require_integrable(kappa, n)
    d = formal_degree(kappa, n, fd_constant)
    with mpmath.workdps(MP_DPS):
        det1 = mpmath.mpf(sigma1.det.numerator) / sigma1.det.denominator
        det2 = mpmath.mpf(sigma2.det.numerator) / sigma2.det.denominator
        trace = mpmath.mpf((sigma1.trace + sigma2.trace).numerator) / (sigma1.trace + sigma2.trace).denominator
        log_value = (
            mpmath.log(mpmath.mpf(d.numerator) / d.denominator)
            - mpmath.mpf(n * (n - 1)) / 2 * mpmath.log(2)
            + n * kappa * mpmath.log(4 * mpmath.pi)
            + mpmath.mpf(kappa) / 2 * (mpmath.log(det2) - mpmath.log(det1))
            + (kappa - mpmath.mpf(n + 1) / 2) * mpmath.log(det1)
            - 2 * mpmath.pi * trace
            - mpmath.log(gamma_n(kappa, n))
        )
        return mpmath.exp(log_value)


def arch_truncation_radius(X0: np.ndarray, kappa: int, ratio: float = 1e-12) -> float:
    """max|S_ij| > R なら |det(X₀+iS)|^{−κ} < ratio·det(X₀)^{−κ} となる R"""
    lam_max = float(np.linalg.eigvalsh(X0).max())
    return lam_max * math.sqrt(ratio ** (-2.0 / kappa) - 1.0)


def arch_factor_quadrature_n2(
    sigma1: HalfIntegralSymMat,
    sigma2: HalfIntegralSymMat,
    A: AMatrixSolution,
    r: int,
    kappa: int,
    *,
    rtol: float = 1e-6,
    max_cells: int = 400_000,
) -> complex:
    """d_κ 2^{2κ}(det A)^κ r^{−κ}∫_{S₂(ℝ)} e^{2πi tr σ₁S}/det(r⁻¹AᵗA + I + iS)^κ dS を直接数値積分する"""
    if sigma1.n != 2:
        raise UnsupportedRegime("3 次元求積は n=2 のみです", hypothesis="n=2")
    if kappa < 8:
        raise UnsupportedRegime(f"求積は κ ≥ 8 を想定しています: κ={kappa}", hypothesis="κ ≥ 8")
    Am = np.array(A.rows, dtype=float)
    X0 = np.eye(2) + Am @ Am.T / r
    s = np.array(sigma1.two_sigma, dtype=float) / 2
    R = arch_truncation_radius(X0, kappa)
    log.detail(f"I_∞ の求積: 箱 [−{R:.3g}, {R:.3g}]³")

    def integrand(pts: np.ndarray) -> np.ndarray:
        x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
        det = (X0[0, 0] + 1j * x) * (X0[1, 1] + 1j * z) - (X0[0, 1] + 1j * y) ** 2
        phase = np.exp(2j * np.pi * (s[0, 0] * x + 2 * s[0, 1] * y + s[1, 1] * z))
        return phase / det**kappa

    result = adaptive_cubature(
        integrand, [-R, -R, -R], [R, R, R], rtol=rtol, initial_splits=8, max_cells=max_cells
    )
    d = formal_degree(kappa, 2)
    det_a = A.det
    prefactor = float(d) * 4.0**kappa * float(det_a) ** kappa / float(r) ** kappa
    value = prefactor * result.value
    log.detail(f"I_∞ 求積値: {value:.12g}（セル {result.cells}）")
    return complex(value)


@dataclass
class GeomTerm:
    A: AMatrixSolution
    arch: mpmath.mpf
    sign: int
    locals: dict[int, LocalIntegralValue] = field(default_factory=dict)

    @property
    def local_product(self) -> Fraction:
        return math.prod((v.value for v in self.locals.values()), start=Fraction(1))

    @property
    def value(self) -> mpmath.mpf:
        lp = self.local_product
        return self.sign * self.arch * mpmath.mpf(lp.numerator) / lp.denominator

    def to_json(self) -> dict:
        return {
            "A": self.A.to_json(),
            "I_inf": float(self.sign * self.arch),
            "locals": {
                str(p): {"num": v.value.numerator, "den": v.value.denominator, "provenance": v.provenance}
                for p, v in sorted(self.locals.items())
            },
        }


@dataclass
class GeomResult:
    sigma1: HalfIntegralSymMat
    sigma2: HalfIntegralSymMat
    r: int
    kappa: int
    terms: list[GeomTerm]

    @property
    def total(self) -> mpmath.mpf:
        with mpmath.workdps(MP_DPS):
            return mpmath.fsum(term.value for term in self.terms)

    def to_json(self) -> dict:
        return {
            "sigma1": [list(row) for row in self.sigma1.two_sigma],
            "sigma2": [list(row) for row in self.sigma2.two_sigma],
            "r": self.r,
            "kappa": self.kappa,
            "terms": [t.to_json() for t in self.terms],
            "total": float(self.total),
        }


def _local_values(
    A: AMatrixSolution,
    sigma1: HalfIntegralSymMat,
    sigma2: HalfIntegralSymMat,
    spec: SimilitudeSpec,
    margin: int,
    max_cells: int,
) -> dict[int, LocalIntegralValue]:
    out = {}
    for p, lam in spec.primes:
        local = LocalSpec.from_coweight(lam, p)
        equal = p_adic_valuation(sigma1.det, p) == p_adic_valuation(sigma2.det, p)
        d = reduce_to_diagonal(A.matrix, sigma1, p, local.tau, equal_det_order=equal)
        out[p] = local_integral(local, d, margin, max_cells=max_cells)
    return out


def _check_local_regime(sigma: HalfIntegralSymMat, spec: SimilitudeSpec) -> None:
    if spec.primes and sigma.n != 2:
        raise UnsupportedRegime(
            f"局所積分は n=2 のみ実装しています（n={sigma.n}）", hypothesis="n=2 when 𝕊 ≠ ∅"
        )
    if spec.n is not None and spec.n != sigma.n:
        raise ValueError(f"λ の階数 n={spec.n} と σ のサイズ {sigma.n} が一致しません")


def geometric_side(
    sigma1: HalfIntegralSymMat,
    sigma2: HalfIntegralSymMat,
    spec: SimilitudeSpec,
    kappa: int,
    *,
    margin: int = 0,
    fd_constant: Fraction | None = None,
    max_cells: int = 200_000_000,
) -> GeomResult:
    """Σ_A I_∞·∏_{p∈𝕊} I_{A,p}。𝕊 の外の素数の因子は 1

    I_∞ には (det A)^κ の符号 sgn(det A)^κ が掛かる。
    """
    _check_local_regime(sigma1, spec)
    n = sigma1.n
    _require_integrable(kappa, n)
    r = spec.r
    arch = arch_factor(sigma1, sigma2, kappa, n, fd_constant)
    solutions = enumerate_A(sigma1, sigma2, r)
    log.step(f"幾何側: r={r}, A の個数 {len(solutions)}")
    terms = [
        GeomTerm(
            A=A,
            arch=arch,
            sign=1 if A.det > 0 or kappa % 2 == 0 else -1,
            locals=_local_values(A, sigma1, sigma2, spec, margin, max_cells),
        )
        for A in solutions
    ]
    return GeomResult(sigma1=sigma1, sigma2=sigma2, r=r, kappa=kappa, terms=terms)


def normalized_L(
    sigma: HalfIntegralSymMat,
    spec: SimilitudeSpec,
    kappa: int | None = None,
    *,
    margin: int = 0,
    max_cells: int = 200_000_000,
) -> Fraction:
    """𝓛(∏_p 𝒮(c_{λ_p})) = (1/n₁)Σ_A ∏_p I_{A,p}（I_∞ は打ち消し合うので評価しない）"""
    _check_local_regime(sigma, spec)
    if kappa is not None:
        _require_integrable(kappa, sigma.n)
    if not spec.primes:
        return Fraction(1)
    n1 = n1_count(sigma)
    solutions = enumerate_A(sigma, sigma, spec.r)
    total = Fraction(0)
    for A in solutions:
        total += math.prod(
            (v.value for v in _local_values(A, sigma, sigma, spec, margin, max_cells).values()),
            start=Fraction(1),
        )
    log.detail(f"正規化 L 値: {spec.key()} → {total}/{n1}")
    return total / n1

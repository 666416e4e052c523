"""固定レベル N での非対角項の評価（n=2）

|E(f)| ≪ κ^{21/2}(8r)^{κ/2}/N^{κ−12}。絶対定数は与えられていないので設定値 C を掛けて返す。
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import logger as log
from .errors import UnsupportedRegime
from .geom_side import SimilitudeSpec, geometric_side
from .quadform import HalfIntegralSymMat

MIN_KAPPA = 17


@dataclass(frozen=True)
class ErrorParams:
    kappa: int
    r: int = 1
    N: int = 1

    def __post_init__(self) -> None:
        if self.kappa < MIN_KAPPA:
            raise UnsupportedRegime(
                f"非対角項の評価には κ ≥ {MIN_KAPPA} が必要です（κ={self.kappa}）",
                hypothesis="κ ≥ 17",
            )
        if self.r < 1 or self.N < 1:
            raise ValueError(f"r, N は正の整数である必要があります: r={self.r}, N={self.N}")


def log_off_diagonal_bound(params: ErrorParams, constant: float = 1.0) -> float:
    k = params.kappa
    return (
        math.log(constant)
        + 10.5 * math.log(k)
        + k / 2 * math.log(8 * params.r)
        - (k - 12) * math.log(params.N)
    )


def off_diagonal_bound(params: ErrorParams, constant: float = 1.0) -> float:
    """C·κ^{21/2}(8r)^{κ/2}/N^{κ−12}（対数で計算して戻す。範囲外なら inf）"""
    if constant <= 0:
        raise ValueError(f"定数 C は正である必要があります: {constant}")
    value = log_off_diagonal_bound(params, constant)
    return math.exp(value) if value < 709.0 else math.inf


def line_integral(Delta: float, kappa: float) -> float:
    """∫_ℝ (x²+Δ²)^{−κ/2} dx = Δ^{1−κ}B(1/2, (κ−1)/2)"""
    return math.exp((1 - kappa) * math.log(Delta) + special.betaln(0.5, (kappa - 1) / 2))


def lattice_sum_bound(Delta: float, kappa: float) -> float:
    """Σ_n ((n+a)²+Δ²)^{−κ/2} の a によらない上界 ((κ+Δ)/Δ)∫_ℝ(x²+Δ²)^{−κ/2}dx"""
    if Delta <= 0:
        raise ValueError(f"Δ > 0 が必要です: {Delta}")
    if kappa < 2:
        raise ValueError(f"κ ≥ 2 が必要です: {kappa}")
    return (kappa + Delta) / Delta * line_integral(Delta, kappa)


def tail_integral(c: float, Delta: float, kappa: float) -> float:
    """∫_c^∞ (x²+Δ²)^{−κ/2} dx = ½Δ^{1−κ}B((κ−1)/2, 1/2)·I_{Δ²/(Δ²+c²)}((κ−1)/2, 1/2)（c ≥ 0）"""
    t = Delta**2 / (Delta**2 + c**2)
    return 0.5 * line_integral(Delta, kappa) * float(special.betainc((kappa - 1) / 2, 0.5, t))


def euler_sum_check(
    a: float, Delta: float, kappa: float, truncation: int = 20_000
) -> tuple[float, float]:
    """(左辺, 右辺)。左辺は |n| ≤ T の部分和に裾 ∫_{T±a}^∞ を足した上からの評価"""
    if kappa < 2:
        raise ValueError(f"κ ≥ 2 が必要です: {kappa}")
    if Delta <= 0:
        raise ValueError(f"Δ > 0 が必要です: {Delta}")
    if truncation <= abs(a) + 1:
        raise ValueError(f"切断 T は |a|+1 より大きくしてください: T={truncation}, a={a}")
    ns = np.arange(-truncation, truncation + 1, dtype=float)
    partial = float(np.sum(((ns + a) ** 2 + Delta**2) ** (-kappa / 2)))
    tail = tail_integral(truncation + a, Delta, kappa) + tail_integral(truncation - a, Delta, kappa)
    lhs = partial + tail
    rhs = lattice_sum_bound(Delta, kappa)
    if lhs > rhs:
        log.warn(f"a={a}, Δ={Delta}, κ={kappa}: 左辺 {lhs:.6g} が右辺 {rhs:.6g} を超えました")
    return lhs, rhs


def beta_tail_integral(kappa: int) -> float:
    """∫_0^∞ ρ²(1+ρ²)^{−(κ/2−6)} dρ = ½B(3/2, (κ−15)/2)"""
    if kappa < MIN_KAPPA:
        raise UnsupportedRegime(f"κ ≥ {MIN_KAPPA} で収束します（κ={kappa}）", hypothesis="κ ≥ 17")
    return 0.5 * float(special.beta(1.5, (kappa - 15) / 2))


def sphere_integral(kappa: int) -> float:
    """∫_0^∞ ρ¹¹(1+ρ²)^{−κ/2} dρ = ½B(6, κ/2−6)"""
    if kappa < 13:
        raise UnsupportedRegime(f"κ ≥ 13 で収束します（κ={kappa}）", hypothesis="κ ≥ 13")
    return 0.5 * float(special.beta(6, kappa / 2 - 6))


def level_sum(kappa: int) -> float:
    """Σ_{c≠0}|c|^{−(κ−15)} = 2ζ(κ−15)"""
    if kappa < MIN_KAPPA:
        raise UnsupportedRegime(f"κ ≥ {MIN_KAPPA} で収束します（κ={kappa}）", hypothesis="κ ≥ 17")
    return 2.0 * float(special.zeta(kappa - 15))


def kappa_exponent_profile(kappas) -> list[dict]:
    """κ⁶·½B(6,κ/2−6) と κ^{3/2}·½B(3/2,(κ−15)/2) がκ について有界に留まるかを見る表"""
    rows = []
    for k in kappas:
        rows.append(
            {
                "kappa": int(k),
                "sphere_scaled": sphere_integral(k) * k**6,
                "beta_scaled": beta_tail_integral(k) * k**1.5,
            }
        )
    return rows


@dataclass(frozen=True)
class QuantitativeResult:
    main: float
    error_bound: float
    kappa: int
    r: int
    N: int
    constant: float = 1.0
    constant_caveat: bool = True

    @property
    def window(self) -> tuple[float, float]:
        return self.main - self.error_bound, self.main + self.error_bound

    def contains(self, value: float) -> bool:
        lo, hi = self.window
        return lo <= value <= hi

    def to_json(self) -> dict:
        return {
            "main": self.main,
            "error_bound": self.error_bound,
            "kappa": self.kappa,
            "r": self.r,
            "N": self.N,
            "constant": self.constant,
            "constant_caveat": self.constant_caveat,
        }


def quantitative_formula(
    sigma1: HalfIntegralSymMat,
    sigma2: HalfIntegralSymMat,
    spec: SimilitudeSpec,
    kappa: int,
    N: int,
    *,
    constant: float = 1.0,
    margin: int = 0,
) -> QuantitativeResult:
    """スペクトル側 = M(f) + E(f)。M(f) は幾何側の有限和、|E(f)| は上の評価（定数 C 倍）"""
    if sigma1.n != 2:
        raise UnsupportedRegime(f"n=2 のみ扱います（n={sigma1.n}）", hypothesis="n=2")
    params = ErrorParams(kappa=kappa, r=spec.r, N=N)
    shared = [p for p, _ in spec.primes if math.gcd(N, p) != 1]
    if shared:
        raise UnsupportedRegime(
            f"レベル N={N} が 𝕊 の素数 {shared} と互いに素ではありません", hypothesis="gcd(N, 𝕊) = 1"
        )
    main = float(geometric_side(sigma1, sigma2, spec, kappa, margin=margin).total)
    bound = off_diagonal_bound(params, constant)
    log.detail(f"M(f)={main:.12g}, |E(f)| ≤ {bound:.6g}（N={N}）")
    return QuantitativeResult(main, bound, kappa, spec.r, N, constant)

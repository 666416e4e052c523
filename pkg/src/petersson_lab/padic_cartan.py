"""Cartan 分解の分類：Smith 標準形・小行列式の付値・両側剰余類ラベル

p 進行列は「整数行列 / p^e」の形で扱う（denom_exp = e）。浮動小数点は一切使わない。
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

import numpy as np
import sympy

from .errors import InvariantViolation, NotSymplectic
from .root_data import Coweight

IntMat = sympy.Matrix


@total_ordering
class _Infinity:
    """付値 +∞ の番兵。どの整数よりも大きい"""

    _instance: _Infinity | None = None

    def __new__(cls) -> _Infinity:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other: object) -> bool:
        return other is self

    def __lt__(self, other: object) -> bool:
        return False

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __add__(self, other: object) -> _Infinity:
        return self

    __radd__ = __add__

    def __sub__(self, other: object) -> _Infinity:
        if other is self:
            raise ArithmeticError("∞ − ∞ は定義されません")
        return self

    def __hash__(self) -> int:
        return hash("petersson_lab.INF")

    def __repr__(self) -> str:
        return "INF"


INF = _Infinity()


def p_adic_valuation(x: int | Fraction, p: int) -> int | _Infinity:
    """v_p(x)。x = 0 なら INF"""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def as_int_matrix(rows) -> IntMat:
    """整数成分の sympy 行列に変換（非整数成分はエラー）"""
    m = sympy.Matrix(rows)
    if any(not c.is_Integer for c in m):
        raise ValueError(f"整数行列ではありません: {m.tolist()}")
    return m


def _block(a: IntMat, b: IntMat, c: IntMat, d: IntMat) -> IntMat:
    return sympy.Matrix.vstack(sympy.Matrix.hstack(a, b), sympy.Matrix.hstack(c, d))


def symplectic_form(n: int) -> IntMat:
    """J = (0 Iₙ; −Iₙ 0)"""
    z = sympy.zeros(n)
    eye = sympy.eye(n)
    return _block(z, eye, -eye, z)


@dataclass(frozen=True)
class SnfDecomposition:
    """A = U·D·V。U, V はユニモジュラ、D は d₁ | d₂ | ⋯ の対角"""

    U: IntMat
    D: IntMat
    V: IntMat

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(int(self.D[i, i]) for i in range(self.D.rows))


@dataclass(frozen=True)
class CosetLabel:
    """K λ(p) K のラベル。lam は PGSp の正規代表、r_exponent は g の相似係数の指数"""

    lam: Coweight
    r_exponent: int


def smith_normal_form(A: IntMat) -> SnfDecomposition:
    """正方整数行列の Smith 標準形を行・列基本変形で求める"""
    A = as_int_matrix(A)
    if not A.is_square:
        raise ValueError(f"正方行列ではありません: {A.shape}")
    if A.det() == 0:
        raise ValueError("特異な行列には Smith 分解を定義しません")
    size = A.rows
    m = [[int(c) for c in A.row(i)] for i in range(size)]
    left = [[int(i == j) for j in range(size)] for i in range(size)]
    right = [[int(i == j) for j in range(size)] for i in range(size)]

    def swap_rows(i: int, j: int) -> None:
        m[i], m[j] = m[j], m[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i: int, j: int) -> None:
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q·row_src
        m[dst] = [a + q * b for a, b in zip(m[dst], m[src])]
        left[dst] = [a + q * b for a, b in zip(left[dst], left[src])]

    def add_col(dst: int, src: int, q: int) -> None:
        for row in m:
            row[dst] += q * row[src]
        for row in right:
            row[dst] += q * row[src]

    for k in range(size):
        while True:
            pivot = min(
                ((abs(m[i][j]), i, j) for i in range(k, size) for j in range(k, size) if m[i][j]),
                default=None,
            )
            if pivot is None:
                raise InvariantViolation("Smith 分解の途中でピボットが見つかりません")
            _, i0, j0 = pivot
            swap_rows(k, i0)
            swap_cols(k, j0)
            clean = True
            for i in range(k + 1, size):
                q = m[i][k] // m[k][k]
                if q:
                    add_row(i, k, -q)
                clean &= m[i][k] == 0
            for j in range(k + 1, size):
                q = m[k][j] // m[k][k]
                if q:
                    add_col(j, k, -q)
                clean &= m[k][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(k + 1, size) for j in range(k + 1, size) if m[i][j] % m[k][k]),
                None,
            )
            if bad is None:
                break
            add_row(k, bad, 1)
        if m[k][k] < 0:
            m[k] = [-c for c in m[k]]
            left[k] = [-c for c in left[k]]

    D = sympy.Matrix(m)
    U = sympy.Matrix(left).inv()
    V = sympy.Matrix(right).inv()
    if U * D * V != A:
        raise InvariantViolation("Smith 分解の再構成に失敗しました")
    return SnfDecomposition(U=as_int_matrix(U), D=D, V=as_int_matrix(V))


def minor_valuation(g: IntMat, m: int, p: int, denom_exp: int = 0) -> int | _Infinity:
    """m×m 小行列式の p 進付値の最小値（g/p^denom_exp として）"""
    g = as_int_matrix(g)
    size = g.rows
    if not 1 <= m <= size:
        raise ValueError(f"m は 1 ≤ m ≤ {size} の範囲で指定してください: {m}")
    floor = -m * denom_exp
    best: int | _Infinity = INF
    for rows in itertools.combinations(range(size), m):
        for cols in itertools.combinations(range(size), m):
            det = g.extract(list(rows), list(cols)).det(method="bareiss")
            v = p_adic_valuation(int(det), p)
            if v is INF:
                continue
            v -= m * denom_exp
            if best is INF or v < best:
                best = v
            if best == floor:
                return best
    return best


def similitude(g: IntMat, denom_exp: int = 0, p: int | None = None) -> Fraction:
    """ᵗgJg = r(g)J を満たす r(g)。相似でなければ NotSymplectic"""
    g = as_int_matrix(g)
    if g.rows != g.cols or g.rows % 2:
        raise NotSymplectic(f"2n×2n 行列ではありません: {g.shape}")
    n = g.rows // 2
    J = symplectic_form(n)
    prod = g.T * J * g
    r = prod[0, n]
    if r == 0 or prod != r * J:
        raise NotSymplectic("ᵗgJg が J の定数倍になりません")
    scale = Fraction(1)
    if denom_exp:
        if p is None:
            raise ValueError("denom_exp を指定するときは p も指定してください")
        scale = Fraction(1, p ** (2 * denom_exp))
    return Fraction(int(r)) * scale


def is_symplectic_similitude(g: IntMat) -> bool:
    try:
        similitude(g)
    except NotSymplectic:
        return False
    return True


def lambda_matrix(lam: Coweight | tuple[int, ...], p: int) -> IntMat:
    """λ(p) = diag(p^{ℓ₁},…,p^{ℓₙ}, p^{ℓ₀−ℓ₁},…,p^{ℓ₀−ℓₙ})"""
    ell = lam.ell if isinstance(lam, Coweight) else tuple(lam)
    l0, tail = ell[0], ell[1:]
    exps = list(tail) + [l0 - c for c in tail]
    if min(exps) < 0:
        raise ValueError(f"λ(p) が整数行列になりません: {ell}")
    return sympy.diag(*[p**e for e in exps])


def classify_coset_gsp(g: IntMat, p: int, denom_exp: int = 0) -> tuple[int, ...]:
    """ℓ₁ ≤ ⋯ ≤ ℓₙ ≤ ℓ₀ − ℓₙ を満たす正規化前の λ = (ℓ₀, ℓ₁, …, ℓₙ)"""
    r = similitude(g, denom_exp, p)
    l0 = p_adic_valuation(r, p)
    if r != Fraction(p) ** l0:
        raise NotSymplectic(f"相似係数 {r} が {p} の冪ではありません")
    n = as_int_matrix(g).rows // 2
    ds = [0]
    for m in range(1, n + 1):
        v = minor_valuation(g, m, p, denom_exp)
        if v is INF:
            raise InvariantViolation("可逆な相似の小行列式がすべて 0 になりました")
        ds.append(v)
    ell = tuple(ds[m] - ds[m - 1] for m in range(1, n + 1))
    if any(a > b for a, b in zip(ell, ell[1:])) or ell[-1] > l0 - ell[-1]:
        raise InvariantViolation(f"分類結果が支配的になりません: ℓ₀={l0}, ℓ={ell}")
    return (l0,) + ell


def classify_coset(g: IntMat, p: int, denom_exp: int = 0) -> CosetLabel:
    """g ∈ K λ(p) K となる支配的 λ（PGSp の正規代表）"""
    raw = classify_coset_gsp(g, p, denom_exp)
    return CosetLabel(lam=Coweight(raw), r_exponent=raw[0])


def _elementary_symplectic(n: int, rng: np.random.Generator) -> IntMat:
    kind = int(rng.integers(4))
    sign = 1 if rng.integers(2) else -1
    eye = sympy.eye(n)
    z = sympy.zeros(n)
    if kind == 3:
        return symplectic_form(n)
    i, j = (int(c) for c in rng.integers(n, size=2))
    if kind == 2:
        # Levi 部分 diag(U, ᵗU⁻¹)
        U = sympy.eye(n)
        if i != j:
            U[i, j] = sign
        return _block(U, z, z, U.T.inv())
    S = sympy.zeros(n)
    S[i, j] = sign
    S[j, i] = sign
    block = [[eye, S], [z, eye]] if kind == 0 else [[eye, z], [S, eye]]
    return _block(*block[0], *block[1])


def random_integral_symplectic(n: int, seed: int | np.random.Generator, word_length: int) -> IntMat:
    """基本シンプレクティック生成元のランダムな積（Sp(2n, ℤ) の元）"""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = sympy.eye(2 * n)
    for _ in range(word_length):
        g = g * _elementary_symplectic(n, rng)
    return as_int_matrix(g)

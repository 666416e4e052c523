"""半整数正定値対称行列 σ（Fourier 係数の添字集合）"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy


@dataclass(frozen=True)
class HalfIntegralSymMat:
    """σ を整数行列 two_sigma = 2σ で保持する（対角は偶数）"""

    two_sigma: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(c) for c in row) for row in self.two_sigma)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ValueError(f"2σ は正方行列で与えてください: {rows}")
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise ValueError(f"2σ が対称ではありません: {rows}")
        if any(rows[i][i] % 2 for i in range(n)):
            raise ValueError(f"2σ の対角成分は偶数である必要があります: {rows}")
        m = sympy.Matrix(rows)
        if any(m[:k, :k].det() <= 0 for k in range(1, n + 1)):
            raise ValueError(f"σ が正定値ではありません: {rows}")
        object.__setattr__(self, "two_sigma", rows)

    @classmethod
    def identity(cls, n: int) -> HalfIntegralSymMat:
        return cls(tuple(tuple(2 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def from_abc(cls, a: int, b: int, c: int) -> HalfIntegralSymMat:
        """σ = (a, b/2; b/2, c)"""
        return cls(((2 * a, b), (b, 2 * c)))

    @property
    def n(self) -> int:
        return len(self.two_sigma)

    @property
    def matrix(self) -> sympy.Matrix:
        """σ 自身（有理数成分）"""
        return sympy.Matrix(self.two_sigma) / 2

    @property
    def two_matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.two_sigma)

    @property
    def det(self) -> Fraction:
        value = sympy.Matrix(self.two_sigma).det() / 2**self.n
        return Fraction(int(value.p), int(value.q))

    @property
    def det_two(self) -> int:
        """det(2σ)（n=2 では 4·detσ）"""
        return int(sympy.Matrix(self.two_sigma).det())

    @property
    def trace(self) -> Fraction:
        return Fraction(sum(self.two_sigma[i][i] for i in range(self.n)), 2)

    @property
    def abc(self) -> tuple[int, int, int]:
        """n=2 のとき σ = (a, b/2; b/2, c) の (a, b, c)"""
        if self.n != 2:
            raise ValueError("(a, b, c) は n=2 のときのみ定義されます")
        return self.two_sigma[0][0] // 2, self.two_sigma[0][1], self.two_sigma[1][1] // 2

    def transform(self, U: sympy.Matrix) -> HalfIntegralSymMat:
        """ᵗUσU（U は整数行列）"""
        m = U.T * self.two_matrix * U
        return HalfIntegralSymMat(tuple(tuple(int(c) for c in m.row(i)) for i in range(m.rows)))

    def key(self) -> str:
        """キャッシュ用の正規文字列"""
        return ";".join(",".join(str(c) for c in row) for row in self.two_sigma)

    def __str__(self) -> str:
        return "2σ=[" + self.key() + "]"

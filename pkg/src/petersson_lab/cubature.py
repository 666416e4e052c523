"""直方体上の適応テンソル Gauss–Legendre 求積

被積分関数は形状 (セル数, 節点数, 次元) の点配列を受け取り (セル数, 節点数) を返す
ベクトル化関数とする。各セルの推定値と 2^d 個の子セルの和の差が許容誤差の体積配分
以下になったセルを確定させ、それ以外だけを再分割する。
"""

from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import logger as log

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CubatureResult:
    value: complex
    error: float
    cells: int
    evaluations: int
    converged: bool

    @property
    def real(self) -> float:
        return float(np.real(self.value))

    @property
    def imag(self) -> float:
        return float(np.imag(self.value))


def reference_rule(order: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """[0,1]^dim 上のテンソル積 Gauss–Legendre 節点と重み"""
    x, w = np.polynomial.legendre.leggauss(order)
    x = (x + 1.0) / 2.0
    w = w / 2.0
    node_axes = np.meshgrid(*([x] * dim), indexing="ij")
    weight_axes = np.meshgrid(*([w] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in node_axes], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in weight_axes], axis=-1), axis=-1)
    return nodes, weights


def _estimates(
    func: Integrand,
    lo: np.ndarray,
    hi: np.ndarray,
    nodes: np.ndarray,
    weights: np.ndarray,
    chunk: int,
) -> np.ndarray:
    out = []
    for start in range(0, len(lo), chunk):
        l = lo[start : start + chunk]
        span = hi[start : start + chunk] - l
        pts = l[:, None, :] + span[:, None, :] * nodes[None, :, :]
        vals = np.asarray(func(pts))
        out.append(np.prod(span, axis=1) * (vals @ weights))
    return np.concatenate(out)


def _split(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """各セルを 2^d 個に等分（子は親ごとに連続して並ぶ）"""
    dim = lo.shape[1]
    mid = (lo + hi) / 2.0
    child_lo, child_hi = [], []
    for bits in itertools.product((False, True), repeat=dim):
        b = np.array(bits)
        child_lo.append(np.where(b, mid, lo))
        child_hi.append(np.where(b, hi, mid))
    return (
        np.stack(child_lo, axis=1).reshape(-1, dim),
        np.stack(child_hi, axis=1).reshape(-1, dim),
    )


def _initial_grid(lower: np.ndarray, upper: np.ndarray, splits: int) -> tuple[np.ndarray, np.ndarray]:
    edges = [np.linspace(lower[k], upper[k], splits + 1) for k in range(len(lower))]
    lo, hi = [], []
    for idx in itertools.product(range(splits), repeat=len(lower)):
        lo.append([edges[k][i] for k, i in enumerate(idx)])
        hi.append([edges[k][i + 1] for k, i in enumerate(idx)])
    return np.array(lo, dtype=float), np.array(hi, dtype=float)


def adaptive_cubature(
    func: Integrand,
    lower,
    upper,
    *,
    rtol: float = 1e-8,
    atol: float = 0.0,
    order: int = 7,
    initial_splits: int = 2,
    max_cells: int = 400_000,
    chunk: int = 2048,
) -> CubatureResult:
    """∫_{[lower, upper]} func を適応細分で求める

    許容誤差 tol = max(atol, rtol·|現在の推定値|) を体積比で各セルに配分する。
    max_cells に達したら未確定セルの細かい推定値をそのまま足し、converged=False で返す。
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.shape != upper.shape or lower.ndim != 1:
        raise ValueError(f"積分範囲の形が不正です: {lower.shape}, {upper.shape}")
    if np.any(upper <= lower):
        raise ValueError("上端は下端より大きくしてください")
    dim = len(lower)
    nodes, weights = reference_rule(order, dim)
    total_volume = float(np.prod(upper - lower))

    lo, hi = _initial_grid(lower, upper, initial_splits)
    coarse = _estimates(func, lo, hi, nodes, weights, chunk)
    cells = len(lo)
    accepted = coarse.dtype.type(0)
    error = 0.0

    while len(lo):
        child_lo, child_hi = _split(lo, hi)
        child = _estimates(func, child_lo, child_hi, nodes, weights, chunk)
        cells += len(child_lo)
        fine = child.reshape(len(lo), -1).sum(axis=1)
        diff = np.abs(fine - coarse)
        tol = max(atol, rtol * abs(accepted + fine.sum()))
        share = np.prod(hi - lo, axis=1) / total_volume
        ok = diff <= tol * share
        accepted += fine[ok].sum()
        error += float(diff[ok].sum())
        if cells >= max_cells and not ok.all():
            rest = ~ok
            accepted += fine[rest].sum()
            error += float(diff[rest].sum())
            log.warn(f"求積がセル上限 {max_cells} に達しました（推定誤差 {error:.3g}）")
            return CubatureResult(complex(accepted), error, cells, cells * len(weights), False)
        keep = np.repeat(~ok, 2**dim)
        lo, hi, coarse = child_lo[keep], child_hi[keep], child[keep]

    log.detail(f"求積完了: セル {cells}, 推定誤差 {error:.3g}")
    return CubatureResult(complex(accepted), error, cells, cells * len(weights), True)

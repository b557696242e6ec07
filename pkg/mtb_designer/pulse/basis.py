"""
時間制限集中基底モジュール

サポート [-t_p/2, t_p/2] 上の離散長球 (Slepian) 系列を用いて、正規直交な時間制限基底と
各ベクトルの帯域内 (|f| <= w) エネルギー集中度 λ を構成します。
離散長球系列は帯域内エネルギーの二次形式を対角化するため、帯域制約は
Σ λ_k a_k^2 >= (1-eps) Σ a_k^2 という重み付き二乗和になります。
"""

import math
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.linalg import toeplitz
from scipy.signal.windows import dpss

from ..shared.errors import BasisError
from ..shared.logging import get_logger
from .models import SampledSignal, TimeGrid

logger = get_logger(__name__, scope="Basis")

BASIS_MARGIN = 8


class BasisSet(BaseModel):
    """正規直交な時間制限基底と帯域内集中度"""

    t_p: float
    w: float
    grid: TimeGrid
    support: np.ndarray  # サポート内サンプルのインデックス
    vectors: np.ndarray  # (n_funcs, n_samples), 実数, dt 重みで正規直交
    lambdas: np.ndarray  # (n_funcs,), 狭義単調減少
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("support", "vectors", "lambdas", mode="before")
    @classmethod
    def freeze(cls, v: Any) -> np.ndarray:
        arr = np.array(v, copy=True)
        arr.setflags(write=False)
        return arr

    @property
    def n_funcs(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def support_vectors(self) -> np.ndarray:
        """サポート上に制限したベクトル (n_funcs, M)"""
        return self.vectors[:, self.support]


def default_n_funcs(t_p: float, w: float) -> int:
    """Slepian 次元 2wt_p に余裕を加えた既定の関数数"""
    return int(math.ceil(2 * w * t_p)) + BASIS_MARGIN


def build_basis(t_p: float, w: float, n_funcs: Optional[int], grid: TimeGrid) -> BasisSet:
    """
    サポート幅 t_p、集中帯域 w の時間制限基底を構成します。

    Args:
        t_p: サポート幅 [s]
        w: 集中帯域 (片側) [Hz]
        n_funcs: 基底関数の数 (None なら default_n_funcs)
        grid: サンプリンググリッド (サンプリングレート >= 4w)

    Raises:
        BasisError: グリッドが w を解像しない、サポートが窓を超える、関数数がサポートのサンプル数を超える
    """
    if t_p <= 0 or w <= 0:
        raise ValueError(f"t_p and w must be positive, got t_p={t_p}, w={w}")
    if 1.0 / grid.dt < 4 * w:
        raise BasisError(f"grid under-resolves the band: sampling rate {1 / grid.dt:.4g} Hz < 4 * {w:.4g} Hz")
    if t_p > grid.window:
        raise BasisError(f"support {t_p:.4g} s exceeds grid window {grid.window:.4g} s")

    if n_funcs is None:
        n_funcs = default_n_funcs(t_p, w)
    if n_funcs < 1:
        raise ValueError(f"n_funcs must be >= 1, got {n_funcs}")

    support = np.nonzero(grid.support_mask(t_p))[0]
    m = support.size
    if n_funcs > m:
        raise BasisError(f"n_funcs={n_funcs} exceeds the {m} samples inside the support")

    half_bandwidth = w * grid.dt  # cycles/sample
    tapers, ratios = dpss(m, m * half_bandwidth, Kmax=n_funcs, sym=True, norm=2, return_ratios=True)
    tapers = np.atleast_2d(tapers)
    ratios = np.atleast_1d(ratios)

    if n_funcs > 1 and not np.all(np.diff(ratios) < 0):
        raise BasisError("concentration eigenvalues are not strictly decreasing; reduce n_funcs")

    vectors = np.zeros((n_funcs, grid.n_samples))
    vectors[:, support] = tapers / math.sqrt(grid.dt)

    logger.debug(f"Built basis: t_p={t_p:.4g} s, w={w:.4g} Hz, samples={m}, n_funcs={n_funcs}, lambda0={ratios[0]:.12f}")
    return BasisSet(t_p=t_p, w=w, grid=grid, support=support, vectors=vectors, lambdas=np.clip(ratios, 0.0, 1.0))


def synthesize(basis: BasisSet, coeffs: np.ndarray) -> SampledSignal:
    """p = Σ a_k v_k"""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (basis.n_funcs,):
        raise ValueError(f"expected {basis.n_funcs} coefficients, got shape {coeffs.shape}")
    return SampledSignal(grid=basis.grid, samples=coeffs @ basis.vectors)


def synthesize_batch(basis: BasisSet, coeffs: np.ndarray) -> np.ndarray:
    """行ごとの係数ベクトルから波形配列 (B, n_samples) を合成します。"""
    return np.atleast_2d(coeffs) @ basis.vectors


def project(basis: BasisSet, signal: SampledSignal) -> np.ndarray:
    """信号 (実部) の基底への直交射影係数"""
    if signal.grid != basis.grid:
        raise ValueError("signal and basis live on different grids")
    return basis.vectors @ signal.samples.real * basis.grid.dt


def _direct_inband(basis: BasisSet, coeffs: np.ndarray) -> float:
    """サポート上の sinc 核による帯域内エネルギー比の直接積分"""
    dt = basis.grid.dt
    p = coeffs @ basis.support_vectors
    lags = np.arange(p.size) * dt
    kernel = toeplitz(2 * basis.w * np.sinc(2 * basis.w * lags)) * dt * dt
    return float(p @ kernel @ p / (np.sum(p * p) * dt))


def inband_fraction(basis: BasisSet, coeffs: np.ndarray, method: str = "eigen") -> float:
    """
    合成波形の |f| <= w に含まれるエネルギー比を返します。

    method="eigen" は Σλa^2/Σa^2、method="direct" は sinc 核による直接積分です。
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (basis.n_funcs,):
        raise ValueError(f"expected {basis.n_funcs} coefficients, got shape {coeffs.shape}")
    norm2 = float(np.sum(coeffs**2))
    if norm2 == 0:
        raise ValueError("inband fraction of the zero vector is undefined")

    if method == "eigen":
        return float(np.sum(basis.lambdas * coeffs**2) / norm2)
    if method == "direct":
        return _direct_inband(basis, coeffs)
    raise ValueError(f"unknown method: {method}")

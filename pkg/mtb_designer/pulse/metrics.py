"""
信号計量モジュール

エネルギー、ユニタリ DFT スペクトル、実効時間幅 (中心対称窓に 1-eps のエネルギーを含む
最小幅) と実効帯域幅を計算します。幅の計算は各サンプルを一様密度のセルとみなし、
累積エネルギーをセル内で線形補間するため、係数に対して連続な値になります。
"""

import numpy as np

from .models import SampledSignal, Spectrum


def energy(s: SampledSignal) -> float:
    """矩形則によるエネルギー Σ|s_k|^2 dt [J]"""
    return float(np.sum(np.abs(s.samples) ** 2) * s.grid.dt)


def energy_of(samples: np.ndarray, dt: float) -> np.ndarray:
    """配列版。最後の軸に沿ってエネルギーを返します。"""
    return np.sum(np.abs(samples) ** 2, axis=-1) * dt


def to_spectrum(samples: np.ndarray, dt: float) -> np.ndarray:
    """中心化された時間サンプルを、中心化された連続フーリエ変換の近似に変換します。"""
    shifted = np.fft.ifftshift(samples, axes=-1)
    return np.fft.fftshift(np.fft.fft(shifted, axis=-1), axes=-1) * dt


def from_spectrum(spec: np.ndarray, dt: float) -> np.ndarray:
    shifted = np.fft.ifftshift(spec, axes=-1)
    return np.fft.fftshift(np.fft.ifft(shifted, axis=-1), axes=-1) / dt


def spectrum(s: SampledSignal) -> Spectrum:
    return Spectrum(grid=s.grid, samples=to_spectrum(s.samples, s.grid.dt))


def inverse_spectrum(p: Spectrum) -> SampledSignal:
    return SampledSignal(grid=p.grid, samples=from_spectrum(p.samples, p.grid.dt))


def centered_half_width(density: np.ndarray, spacing: float, eps: float) -> np.ndarray:
    """
    中心 (インデックス N/2) から外側へ累積したエネルギーが全体の 1-eps に達する半幅を返します。

    density は最後の軸が長さ N (偶数) の非負配列。エネルギーが 0 の行は 0 を返します。
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")

    d = np.atleast_2d(np.asarray(density, dtype=float))
    n = d.shape[-1]
    c = n // 2

    # リング j は中心からの距離 [(j-1/2), (j+1/2)] * spacing を占める (j=0 は [0, 1/2])
    rings = np.zeros(d.shape[:-1] + (c + 1,))
    rings[..., 0] = d[..., c]
    j = np.arange(1, c)
    rings[..., 1:c] = d[..., c + j] + d[..., c - j]
    rings[..., c] = d[..., 0]

    lo = np.concatenate(([0.0], (np.arange(1, c + 1) - 0.5) * spacing))
    hi = (np.arange(c + 1) + 0.5) * spacing

    cumulative = np.cumsum(rings, axis=-1)
    total = cumulative[..., -1]
    target = (1.0 - eps) * total

    idx = np.argmax(cumulative >= target[..., None], axis=-1)
    rows = np.arange(d.shape[0])
    before = np.where(idx > 0, cumulative[rows, np.maximum(idx - 1, 0)], 0.0)
    mass = rings[rows, idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(mass > 0, (target - before) / mass, 0.0)
    frac = np.clip(frac, 0.0, 1.0)
    half = lo[idx] + frac * (hi[idx] - lo[idx])
    half = np.where(total > 0, half, 0.0)

    if np.ndim(density) == 1:
        return half[0]
    return half


def effective_duration_of(samples: np.ndarray, dt: float, eps: float) -> np.ndarray:
    """配列版の実効時間幅 [s]"""
    return 2.0 * centered_half_width(np.abs(samples) ** 2, dt, eps)


def effective_bandwidth_of(samples: np.ndarray, dt: float, eps: float) -> np.ndarray:
    """配列版の実効帯域幅 [Hz] (帯域 [-W, W] の W)"""
    n = np.shape(samples)[-1]
    spec = to_spectrum(samples, dt)
    return centered_half_width(np.abs(spec) ** 2, 1.0 / (n * dt), eps)


def effective_duration(s: SampledSignal, eps: float) -> float:
    """
    中心対称な窓 [-T/2, T/2] に (1-eps)E を含む最小の T を返します。
    エネルギー 0 の信号は 0 を返します。
    """
    return float(effective_duration_of(s.samples, s.grid.dt, eps))


def effective_bandwidth(s: SampledSignal, eps: float) -> float:
    """中心対称な帯域 [-W, W] に (1-eps)E を含む最小の W を返します。"""
    return float(effective_bandwidth_of(s.samples, s.grid.dt, eps))


def central_fraction(samples: np.ndarray) -> np.ndarray:
    """窓の中央半分 [N/4, 3N/4) に含まれるエネルギー比。エネルギー 0 の行は 1。"""
    p = np.abs(np.atleast_2d(samples)) ** 2
    n = p.shape[-1]
    total = p.sum(axis=-1)
    inner = p[..., n // 4 : 3 * n // 4].sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(total > 0, inner / total, 1.0)
    return frac


def support_width(s: SampledSignal, atol: float = 0.0) -> float:
    """
    非ゼロサンプルを含む最小の中心対称窓の幅 (セル幅込み) を返します。
    ゼロ信号は 0 を返します。
    """
    nz = np.nonzero(np.abs(s.samples) > atol)[0]
    if nz.size == 0:
        return 0.0
    offset = np.max(np.abs(nz - s.grid.center))
    return float((2 * offset + 1) * s.grid.dt)

"""
基本ソリトン基準モジュール

sech 型基本ソリトンの閉形式 (エネルギー・実効時間幅・実効帯域幅・時間帯域幅積)、
実効時間幅への打ち切り、帯域制約下での最大エネルギー、および孤立ソリトンを用いた
M 値エネルギー変調の伝送レート上界を提供します。

β2 は ps^2/km、γ は 1/(W km) で受け取り、内部で s^2/km に換算します。
"""

import math

import numpy as np

from ..shared.constants import (
    DEFAULT_BETA2_PS2_PER_KM,
    DEFAULT_GAMMA_PER_W_KM,
    PS2_PER_KM_TO_S2_PER_KM,
    is_power_of_two,
    log_ratio,
)
from ..shared.errors import GridOverflowError
from .models import SampledSignal, TimeGrid


def sech(x: np.ndarray) -> np.ndarray:
    """オーバーフローしない sech"""
    ax = np.abs(np.asarray(x, dtype=float))
    e = np.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


def soliton_scale(beta2: float = DEFAULT_BETA2_PS2_PER_KM, gamma: float = DEFAULT_GAMMA_PER_W_KM) -> float:
    """√(|β2|/γ) [s·√W]"""
    if gamma <= 0:
        raise ValueError(f"fundamental solitons need gamma > 0, got {gamma}")
    if beta2 == 0:
        raise ValueError("fundamental solitons need beta2 != 0")
    return math.sqrt(abs(beta2) * PS2_PER_KM_TO_S2_PER_KM / gamma)


def soliton_energy(
    amplitude: float, beta2: float = DEFAULT_BETA2_PS2_PER_KM, gamma: float = DEFAULT_GAMMA_PER_W_KM
) -> float:
    """E_s = 2A√(|β2|/γ)"""
    return 2.0 * amplitude * soliton_scale(beta2, gamma)


def soliton_amplitude_for_energy(
    energy: float, beta2: float = DEFAULT_BETA2_PS2_PER_KM, gamma: float = DEFAULT_GAMMA_PER_W_KM
) -> float:
    """エネルギー E を持つ基本ソリトンの振幅 A = E / (2√(|β2|/γ))"""
    if energy <= 0:
        raise ValueError(f"energy must be positive, got {energy}")
    return energy / (2.0 * soliton_scale(beta2, gamma))


def soliton_duration(
    amplitude: float,
    eps: float,
    beta2: float = DEFAULT_BETA2_PS2_PER_KM,
    gamma: float = DEFAULT_GAMMA_PER_W_KM,
) -> float:
    """T_s = √|β2| / (A√γ) · ln((2-eps)/eps)"""
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    return soliton_scale(beta2, gamma) / amplitude * log_ratio(eps)


def soliton_bandwidth(
    amplitude: float,
    eps: float,
    beta2: float = DEFAULT_BETA2_PS2_PER_KM,
    gamma: float = DEFAULT_GAMMA_PER_W_KM,
) -> float:
    """W_s = A√γ / (π^2 √|β2|) · ln((2-eps)/eps)"""
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    return amplitude / (math.pi**2 * soliton_scale(beta2, gamma)) * log_ratio(eps)


def soliton_tbp(eps: float) -> float:
    """c_s = ln^2((2-eps)/eps) / π^2 (振幅に依存しない)"""
    return log_ratio(eps) ** 2 / math.pi**2


def max_soliton_energy(
    w_max: float,
    eps: float,
    beta2: float = DEFAULT_BETA2_PS2_PER_KM,
    gamma: float = DEFAULT_GAMMA_PER_W_KM,
) -> float:
    """実効帯域幅が w_max となるソリトンのエネルギー 2π^2|β2|W/(γ ln((2-eps)/eps))"""
    if w_max <= 0:
        raise ValueError(f"w_max must be positive, got {w_max}")
    scale = soliton_scale(beta2, gamma)
    return 2.0 * math.pi**2 * scale**2 * w_max / log_ratio(eps)


def soliton_pulse(
    amplitude: float,
    grid: TimeGrid,
    beta2: float = DEFAULT_BETA2_PS2_PER_KM,
    gamma: float = DEFAULT_GAMMA_PER_W_KM,
) -> SampledSignal:
    """打ち切りのない s(t) = A sech(A√(γ/|β2|) t) をグリッド上にサンプルします。"""
    samples = amplitude * sech(amplitude * grid.t / soliton_scale(beta2, gamma))
    return SampledSignal(grid=grid, samples=samples)


def soliton_spectrum(
    amplitude: float,
    f: np.ndarray,
    beta2: float = DEFAULT_BETA2_PS2_PER_KM,
    gamma: float = DEFAULT_GAMMA_PER_W_KM,
) -> np.ndarray:
    """S(f) = π√(|β2|/γ) sech(π^2√(|β2|/γ) f / A)"""
    scale = soliton_scale(beta2, gamma)
    return math.pi * scale * sech(math.pi**2 * scale * np.asarray(f) / amplitude)


def truncated_soliton(
    energy: float,
    eps: float,
    grid: TimeGrid,
    beta2: float = DEFAULT_BETA2_PS2_PER_KM,
    gamma: float = DEFAULT_GAMMA_PER_W_KM,
) -> SampledSignal:
    """
    エネルギー E のソリトンを実効時間幅 T_s に打ち切った波形を返します。

    [-T_s/2, T_s/2] の外側のサンプルを 0 にします (テーパーなし)。
    打ち切りにより eps·E が失われます。
    """
    amplitude = soliton_amplitude_for_energy(energy, beta2, gamma)
    t_s = soliton_duration(amplitude, eps, beta2, gamma)
    if grid.window < t_s:
        raise GridOverflowError(f"grid window {grid.window:.4g} s is shorter than soliton duration {t_s:.4g} s")

    full = soliton_pulse(amplitude, grid, beta2, gamma).samples
    samples = np.where(np.abs(grid.t) <= t_s / 2, full, 0.0)
    return SampledSignal(grid=grid, samples=samples)


def soliton_em_rate_bound(m_levels: int, w_max: float, eps: float) -> float:
    """
    孤立ソリトンの M 値エネルギー変調の伝送レート上界 [bit/s]

    R <= π^2 W_max log2 M / ((M-1)^2 ln^2((2-eps)/eps))
    """
    if m_levels < 2 or not is_power_of_two(m_levels):
        raise ValueError(f"M must be a power of two >= 2, got {m_levels}")
    return math.log2(m_levels) / soliton_min_interval(m_levels, w_max, eps)


def soliton_min_interval(m_levels: int, w_max: float, eps: float) -> float:
    """上界に対応する変調間隔の下限 T >= (M-1)^2 ln^2((2-eps)/eps) / (π^2 W_max)"""
    if w_max <= 0:
        raise ValueError(f"w_max must be positive, got {w_max}")
    return (m_levels - 1) ** 2 * soliton_tbp(eps) / w_max

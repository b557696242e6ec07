"""
エネルギー変調リンクのデータモデル定義モジュール

M 値エネルギー変調方式 (EmScheme)、パルス列のグリッド配置 (TrainLayout)、
リンク評価結果 (LinkReport) を定義します。
"""

import math
from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..pulse.models import SampledSignal, TimeGrid
from ..shared.constants import is_power_of_two

# 有限精度での比較に用いる相対許容誤差
_REL_TOL = 1e-12


def _frozen_float_array(v: Any) -> np.ndarray:
    arr = np.array(v, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


class EmScheme(BaseModel):
    """
    M 値エネルギー変調方式。

    energies[m-1] = ((m-1)/(M-1))^2 e_max (m = 1..M) で、レベル 1 はゼロ信号です。
    pulses・各時間幅・各帯域幅は非ゼロのレベル (m = 2..M) ごとに並びます。
    """

    family: str
    m_levels: int
    e_max: float = Field(gt=0.0)
    energies: np.ndarray
    pulses: List[SampledSignal]
    tx_durations: List[float]
    rx_durations: List[float]
    tx_bandwidths: List[float]
    rx_bandwidths: List[float]
    t_mod: float = Field(gt=0.0)
    w_eff: float = Field(gt=0.0)
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("energies", mode="before")
    @classmethod
    def freeze(cls, v: Any) -> np.ndarray:
        return _frozen_float_array(v)

    @field_validator("m_levels")
    @classmethod
    def check_m_levels(cls, v: int) -> int:
        if v < 2 or not is_power_of_two(v):
            raise ValueError(f"M must be a power of two >= 2, got {v}")
        return v

    @model_validator(mode="after")
    def check_consistency(self) -> "EmScheme":
        m = self.m_levels
        expected = np.arange(m) ** 2 * self.e_max / (m - 1) ** 2
        if self.energies.shape != (m,) or not np.allclose(self.energies, expected, rtol=_REL_TOL, atol=0.0):
            raise ValueError("energies must follow ((m-1)/(M-1))^2 * e_max")
        for name in ("pulses", "tx_durations", "rx_durations", "tx_bandwidths", "rx_bandwidths"):
            if len(getattr(self, name)) != m - 1:
                raise ValueError(f"{name} must have one entry per nonzero level ({m - 1}), got {len(getattr(self, name))}")
        longest = max(self.tx_durations + self.rx_durations)
        if self.t_mod < longest * (1 - _REL_TOL):
            raise ValueError(f"t_mod={self.t_mod:.6g} s is shorter than the longest pulse duration {longest:.6g} s")
        return self

    @property
    def rate(self) -> float:
        """伝送レート log2(M)/T [bit/s]"""
        return math.log2(self.m_levels) / self.t_mod

    @property
    def spectral_efficiency(self) -> float:
        """スペクトル効率 log2(M)/(W T) [bit/s/Hz]"""
        return self.rate / self.w_eff

    @property
    def time_bandwidth_product(self) -> float:
        return self.w_eff * self.t_mod

    def pulse_for(self, level: int) -> SampledSignal:
        """レベル level (2..M) のパルス"""
        if not 2 <= level <= self.m_levels:
            raise ValueError(f"level must be in 2..{self.m_levels}, got {level}")
        return self.pulses[level - 2]

    def is_scaled_family(self, rtol: float = 1e-6) -> bool:
        """
        すべてのパルスが最大エネルギーのパルスのスカラー倍かどうか (PAM と等価な場合)。

        グリッドの異なるパルスを含む場合は False を返します。
        """
        reference = self.pulses[-1]
        ref_shape = reference.samples / math.sqrt(self.energies[-1])
        for level, pulse in enumerate(self.pulses[:-1], start=2):
            if pulse.grid != reference.grid:
                return False
            shape = pulse.samples / math.sqrt(self.energies[level - 1])
            if not np.allclose(shape, ref_shape, rtol=rtol, atol=rtol * float(np.max(np.abs(ref_shape)))):
                return False
        return True


class TrainLayout(BaseModel):
    """
    パルス列のグリッド配置。

    スロット幅 T は奇数個 (slot_samples) のサンプルでちょうど覆われ、スロット k の中心
    first_center + k * slot_samples はサンプル上に乗ります。前後に guard_slots 個の空スロットを置きます。
    """

    n_symbols: int = Field(ge=1)
    slot_samples: int = Field(ge=1)
    guard_slots: int = Field(ge=0)
    grid: TimeGrid
    first_center: int
    model_config = ConfigDict(frozen=True)

    @field_validator("slot_samples")
    @classmethod
    def check_odd(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError(f"slot_samples must be odd, got {v}")
        return v

    @property
    def t_mod(self) -> float:
        return self.slot_samples * self.grid.dt

    @property
    def centers(self) -> np.ndarray:
        return self.first_center + np.arange(self.n_symbols) * self.slot_samples

    def slot_slice(self, k: int) -> slice:
        """スロット k の窓 [kT - T/2, kT + T/2] に含まれるサンプル"""
        half = self.slot_samples // 2
        c = self.first_center + k * self.slot_samples
        return slice(c - half, c + half + 1)


class LinkReport(BaseModel):
    """evaluate_link の結果"""

    family: str
    m_levels: int
    fiber_kind: str
    e_max: float
    n_symbols: int
    n_errors: int
    t_mod: float
    w_eff: float
    rate: float
    spectral_efficiency: float
    time_bandwidth_product: float
    slot_energies: np.ndarray
    expected_energies: np.ndarray
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("slot_energies", "expected_energies", mode="before")
    @classmethod
    def freeze(cls, v: Any) -> np.ndarray:
        return _frozen_float_array(v)

    @property
    def symbol_error_rate(self) -> float:
        return self.n_errors / self.n_symbols

    @property
    def max_leakage(self) -> float:
        """孤立パルスのエネルギーからのスロットエネルギーの最大偏差 [J]"""
        return float(np.max(np.abs(self.slot_energies - self.expected_energies)))

    def to_row(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "fiber": self.fiber_kind,
            "m_levels": self.m_levels,
            "e_max_J": self.e_max,
            "t_mod_s": self.t_mod,
            "w_eff_Hz": self.w_eff,
            "rate_bps": self.rate,
            "spectral_efficiency_bps_per_Hz": self.spectral_efficiency,
            "tbp": self.time_bandwidth_product,
            "n_symbols": self.n_symbols,
            "n_errors": self.n_errors,
            "max_leakage_J": self.max_leakage,
        }

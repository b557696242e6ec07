"""
信号データモデル定義モジュール

一様時間グリッド (TimeGrid)、サンプル化された複素波形 (SampledSignal)、
ユニタリ正規化されたスペクトル (Spectrum) を pydantic モデルとして定義します。
いずれも生成後は不変です。
"""

import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..shared.constants import is_power_of_two


def _frozen_complex(v: Any) -> np.ndarray:
    arr = np.array(v, dtype=np.complex128, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"samples must be one-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


class TimeGrid(BaseModel):
    """
    t = 0 を中心とする一様時間グリッド。

    サンプル k は t_k = (k - n_samples/2) * dt に対応します。
    """

    n_samples: int
    dt: float
    model_config = ConfigDict(frozen=True)

    @field_validator("n_samples")
    @classmethod
    def check_n_samples(cls, v: int) -> int:
        if v < 2 or not is_power_of_two(v):
            raise ValueError(f"n_samples must be a power of two >= 2, got {v}")
        return v

    @field_validator("dt")
    @classmethod
    def check_dt(cls, v: float) -> float:
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"dt must be positive, got {v}")
        return v

    @classmethod
    def covering(cls, window: float, dt: float) -> "TimeGrid":
        """窓幅 window 以上を刻み dt で覆う最小の 2 冪グリッドを返します。"""
        n = max(2, int(math.ceil(window / dt - 1e-9)))
        return cls(n_samples=1 << (n - 1).bit_length(), dt=dt)

    @property
    def center(self) -> int:
        return self.n_samples // 2

    @property
    def window(self) -> float:
        return self.n_samples * self.dt

    @property
    def t(self) -> np.ndarray:
        return (np.arange(self.n_samples) - self.center) * self.dt

    @property
    def df(self) -> float:
        return 1.0 / self.window

    @property
    def f(self) -> np.ndarray:
        """中央 (インデックス n_samples/2) が f = 0 となる周波数軸"""
        return (np.arange(self.n_samples) - self.center) * self.df

    def support_mask(self, width: float) -> np.ndarray:
        """[-width/2, width/2] に中心を持つサンプルのマスク"""
        return np.abs(self.t) <= width / 2 * (1 + 1e-12)


class SampledSignal(BaseModel):
    """グリッド上の複素振幅 (単位 √W)。|q|^2 が瞬時パワー [W] になります。"""

    grid: TimeGrid
    samples: np.ndarray
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("samples", mode="before")
    @classmethod
    def convert_samples(cls, v: Any) -> np.ndarray:
        return _frozen_complex(v)

    @model_validator(mode="after")
    def check_length(self) -> "SampledSignal":
        if self.samples.shape[0] != self.grid.n_samples:
            raise ValueError(f"samples length {self.samples.shape[0]} != grid.n_samples {self.grid.n_samples}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")
        return self

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "SampledSignal":
        return cls(grid=grid, samples=np.zeros(grid.n_samples, dtype=np.complex128))

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def scaled(self, factor: complex) -> "SampledSignal":
        return SampledSignal(grid=self.grid, samples=self.samples * factor)

    def with_samples(self, samples: np.ndarray) -> "SampledSignal":
        return SampledSignal(grid=self.grid, samples=samples)


class Spectrum(BaseModel):
    """
    ユニタリ正規化された離散フーリエ変換。

    Σ|P|^2 df = Σ|p|^2 dt (Parseval) が成り立つようにスケーリングされ、
    周波数軸は grid.f (中央が f = 0) に対応します。
    """

    grid: TimeGrid
    samples: np.ndarray
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("samples", mode="before")
    @classmethod
    def convert_samples(cls, v: Any) -> np.ndarray:
        return _frozen_complex(v)

    @model_validator(mode="after")
    def check_length(self) -> "Spectrum":
        if self.samples.shape[0] != self.grid.n_samples:
            raise ValueError(f"samples length {self.samples.shape[0]} != grid.n_samples {self.grid.n_samples}")
        return self

    @property
    def f(self) -> np.ndarray:
        return self.grid.f

    @property
    def df(self) -> float:
        return self.grid.df

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

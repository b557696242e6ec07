"""
通信路データモデル定義モジュール

ファイバパラメータ (FiberParams) と分割ステップフーリエ法の設定 (SsfmConfig) を定義します。
"""

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..shared.constants import DEFAULT_MAX_DZ_KM, DEFAULT_MAX_NONLINEAR_PHASE, PS2_PER_KM_TO_S2_PER_KM


class FiberParams(BaseModel):
    """
    単一モードファイバ。単位は α: dB/km, β2: ps^2/km, γ: 1/(W km), L: km。

    γ = 0 かつ α = 0 で分散のみ、α = 0 かつ γ > 0 で無損失、α > 0 かつ γ > 0 で損失ありの通信路です。
    α > 0 かつ γ = 0 の線形損失ファイバは kind = "linear_lossy" です。
    """

    alpha_db_per_km: float = Field(default=0.0, ge=0.0)
    beta2: float
    gamma: float = Field(ge=0.0)
    length_km: float = Field(gt=0.0)
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def kind(self) -> str:
        if self.gamma == 0 and self.alpha_db_per_km == 0:
            return "dispersion_only"
        if self.alpha_db_per_km == 0:
            return "lossless"
        if self.gamma > 0:
            return "lossy"
        return "linear_lossy"

    @property
    def alpha_linear(self) -> float:
        """パワー減衰係数 [1/km]。電界の減衰は alpha_linear/2。"""
        return self.alpha_db_per_km * math.log(10) / 10

    @property
    def beta2_s2_per_km(self) -> float:
        return self.beta2 * PS2_PER_KM_TO_S2_PER_KM

    @property
    def is_linear(self) -> bool:
        return self.gamma == 0

    def with_length(self, length_km: float) -> "FiberParams":
        return self.model_copy(update={"length_km": length_km})


class SsfmConfig(BaseModel):
    """対称 (Strang) 分割ステップフーリエ法の設定"""

    max_nonlinear_phase_per_step: float = Field(default=DEFAULT_MAX_NONLINEAR_PHASE, gt=0.0)
    max_dz: float = Field(default=DEFAULT_MAX_DZ_KM, gt=0.0)
    scheme: Literal["symmetric"] = "symmetric"
    check_convergence: bool = False
    convergence_tol: float = Field(default=1e-6, gt=0.0)
    max_refinements: int = Field(default=3, ge=1)
    model_config = ConfigDict(frozen=True, extra="forbid")

    def refined(self) -> "SsfmConfig":
        """ステップ上限を半分にした設定"""
        return self.model_copy(
            update={
                "max_nonlinear_phase_per_step": self.max_nonlinear_phase_per_step / 2,
                "max_dz": self.max_dz / 2,
            }
        )

"""
パルス設計データモデル定義モジュール

最適化の設定 (OptimizerConfig)、設計問題 (DesignProblem)、
設計結果 (DesignResult) と MTB 固定点探索の結果 (MtbResult) を定義します。
"""

import math
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..channel.models import FiberParams, SsfmConfig
from ..channel.propagator import suggest_grid
from ..pulse.models import SampledSignal, TimeGrid
from ..shared.constants import (
    DEFAULT_MAX_DT_S,
    DEFAULT_SEARCH_MAX_DT_S,
    DEFAULT_SEARCH_MAX_DZ_KM,
    DEFAULT_SEARCH_NONLINEAR_PHASE,
    DEFAULT_WINDOW_FACTOR,
    PS,
)


class OptimizerConfig(BaseModel):
    """
    内側の制約付き最適化の設定。

    n_starts は初期値 (射影したソリトン) を含むマルチスタート数、
    perturbation は係数ノルムに対する摂動の大きさ、fd_step は単位球面上の差分幅です。

    探索は刻み search_max_dt_ps のグリッドと粗い SSFM ステップ (search_nonlinear_phase,
    search_max_dz) で行い、各スタートの最良係数を設計グリッドの基底で合成し直して
    問題の SSFM 設定で評価します。探索値が設計値より細かい場合は設計値を使います。
    """

    n_starts: int = Field(default=5, ge=1)
    perturbation: float = Field(default=0.05, ge=0.0)
    seed: int = Field(default=0, ge=0)
    penalty_weights: List[float] = Field(default_factory=lambda: [1e1, 1e3, 1e5])
    max_iter: int = Field(default=20, ge=1)
    fd_step: float = Field(default=1e-4, gt=0.0)
    n_funcs: Optional[int] = Field(default=None, ge=1)
    along_channel_snapshots: int = Field(default=0, ge=0)
    search_max_dt_ps: float = Field(default=DEFAULT_SEARCH_MAX_DT_S / PS, gt=0.0)
    search_nonlinear_phase: float = Field(default=DEFAULT_SEARCH_NONLINEAR_PHASE, gt=0.0)
    search_max_dz: float = Field(default=DEFAULT_SEARCH_MAX_DZ_KM, gt=0.0)
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def search_max_dt_s(self) -> float:
        return self.search_max_dt_ps * PS

    @field_validator("penalty_weights")
    @classmethod
    def check_weights(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("penalty_weights must not be empty")
        if any(w <= 0 for w in v):
            raise ValueError("penalty_weights must be positive")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("penalty_weights must be non-decreasing")
        return v


class DesignProblem(BaseModel):
    """送信時間幅 t_p を固定したときの受信実効時間幅最小化問題"""

    energy: float = Field(gt=0.0)
    t_p: float = Field(gt=0.0)
    w_max: float = Field(gt=0.0)
    eps: float = Field(gt=0.0, lt=1.0)
    fiber: FiberParams
    ssfm: SsfmConfig = Field(default_factory=SsfmConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    max_dt: float = Field(default=DEFAULT_MAX_DT_S, gt=0.0)
    window_factor: float = Field(default=DEFAULT_WINDOW_FACTOR, ge=2.0)
    model_config = ConfigDict(frozen=True)

    def design_grid(self) -> TimeGrid:
        """
        サポート [-t_p/2, t_p/2] がちょうど奇数個 (M 個) のセルで覆われるグリッド。

        dt = t_p / M (M は t_p / max_dt 以上の最小の奇数) とし、サポート幅が t_p に対して
        連続に変化するようにします。
        """
        return self._support_grid(self.max_dt)

    def search_grid(self) -> TimeGrid:
        """最適化の探索に使う、刻み max(max_dt, search_max_dt) の同じ構成のグリッド"""
        return self._support_grid(max(self.max_dt, self.optimizer.search_max_dt_s))

    def search_ssfm(self) -> SsfmConfig:
        """探索用の粗い SSFM 設定 (収束検査なし)"""
        return self.ssfm.model_copy(
            update={
                "max_nonlinear_phase_per_step": max(
                    self.ssfm.max_nonlinear_phase_per_step, self.optimizer.search_nonlinear_phase
                ),
                "max_dz": max(self.ssfm.max_dz, self.optimizer.search_max_dz),
                "check_convergence": False,
            }
        )

    def _support_grid(self, max_dt: float) -> TimeGrid:
        m = int(math.ceil(self.t_p / max_dt - 1e-9))
        if m % 2 == 0:
            m += 1
        dt = self.t_p / m
        return suggest_grid(self.t_p, self.w_max, self.fiber, dt, self.window_factor)


class TraceRecord(BaseModel):
    """最適化の反復ごとの記録"""

    start: int
    stage: int
    iteration: int
    objective: float
    inband: float
    step_norm: float
    model_config = ConfigDict(frozen=True)


class DesignResult(BaseModel):
    """minimize_rx_duration の結果"""

    energy: float
    t_p: float
    coeffs: np.ndarray
    pulse: SampledSignal
    rx_duration: float
    tx_duration_check: float
    tx_bandwidth: float
    rx_bandwidth: float
    inband: float
    converged: bool
    baseline_rx_duration: Optional[float] = None
    max_duration_along_channel: Optional[float] = None
    n_evaluations: int = 0
    objective_history: List[float] = Field(default_factory=list)
    trace: List[TraceRecord] = Field(default_factory=list)
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("coeffs", mode="before")
    @classmethod
    def freeze(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=float, copy=True)
        arr.setflags(write=False)
        return arr

    @property
    def modulation_interval(self) -> float:
        """このパルス単独での max{T_p, T_rx}"""
        return max(self.t_p, self.rx_duration)


class MtbResult(BaseModel):
    """find_mtb の結果。history は評価した (t_p, rx_duration) の組 (評価順)。"""

    energy: float
    t_star: float
    design: DesignResult
    history: List[Tuple[float, float]] = Field(default_factory=list)
    bracket: Tuple[float, float]
    diagnostics: List[str] = Field(default_factory=list)
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def modulation_interval(self) -> float:
        return self.design.modulation_interval

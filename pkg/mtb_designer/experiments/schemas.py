"""
実験結果テーブルのスキーマ定義モジュール

panderaを使用して各サブコマンドが出力するDataFrameのスキーマを定義します。
列名の接尾辞が単位を表します (_J, _s, _Hz, _bps, _bps_per_Hz, _W, _m)。
"""

from typing import Optional

import pandera.pandas as pa
from pandera.typing import Series


class SolitonSweepSchema(pa.DataFrameModel):
    """soliton-sweep: エネルギーごとの打ち切りソリトンの送受信時間幅・帯域幅"""

    energy_J: Series[float] = pa.Field(gt=0)
    amplitude_sqrtW: Series[float] = pa.Field(gt=0)
    tx_duration_s: Series[float] = pa.Field(gt=0)
    tx_bandwidth_Hz: Series[float] = pa.Field(gt=0)

    class Config:
        # ファイバごとの受信列 (rx_duration_<fiber>_s など) を許可
        strict = False
        coerce = True


class MtbDesignSchema(pa.DataFrameModel):
    """mtb-design: (ファイバ, エネルギー) ごとの MTB 固定点"""

    fiber: Series[str]
    energy_J: Series[float] = pa.Field(gt=0)
    t_star_s: Series[float] = pa.Field(gt=0)
    rx_duration_s: Series[float] = pa.Field(ge=0)
    inband: Series[float] = pa.Field(ge=0, le=1)
    tx_bandwidth_Hz: Series[float] = pa.Field(ge=0)
    rx_bandwidth_Hz: Series[float] = pa.Field(ge=0)
    w_eff_Hz: Series[float] = pa.Field(ge=0)
    tbp: Series[float] = pa.Field(ge=0)
    converged: Series[bool]
    n_evaluations: Series[int] = pa.Field(ge=0)
    n_diagnostics: Series[int] = pa.Field(ge=0)
    max_duration_along_channel_s: Optional[Series[float]] = pa.Field(nullable=True)

    class Config:
        strict = False
        coerce = True


class EmEvaluateSchema(pa.DataFrameModel):
    """em-evaluate: 方式・ファイバ・M ごとのリンク評価 (レート表とスペクトル効率表の行)"""

    family: Series[str] = pa.Field(isin=["soliton", "mtb"])
    fiber: Series[str]
    m_levels: Series[int] = pa.Field(ge=2)
    e_max_J: Series[float] = pa.Field(gt=0)
    t_mod_s: Series[float] = pa.Field(gt=0)
    w_eff_Hz: Series[float] = pa.Field(gt=0)
    rate_bps: Series[float] = pa.Field(gt=0)
    spectral_efficiency_bps_per_Hz: Series[float] = pa.Field(gt=0)
    tbp: Series[float] = pa.Field(gt=0)
    n_symbols: Series[int] = pa.Field(ge=1)
    n_errors: Series[int] = pa.Field(ge=0)
    max_leakage_J: Series[float] = pa.Field(ge=0)
    bound_bps: Series[float] = pa.Field(nullable=True)
    mtb_approx_bps: Series[float] = pa.Field(nullable=True)
    scaled_family: Series[bool]

    class Config:
        strict = False
        coerce = True


class PropagateSurfaceSchema(pa.DataFrameModel):
    """propagate: 時間・距離の強度面 (縦持ち)"""

    z_m: Series[float] = pa.Field(ge=0)
    t_seconds: Series[float]
    power_W: Series[float] = pa.Field(ge=0)

    class Config:
        strict = True
        coerce = True


class DurationProfileSchema(pa.DataFrameModel):
    """propagate: 距離ごとの実効時間幅・実効帯域幅"""

    z_m: Series[float] = pa.Field(ge=0)
    duration_s: Series[float] = pa.Field(ge=0)
    bandwidth_Hz: Series[float] = pa.Field(ge=0)
    energy_J: Series[float] = pa.Field(ge=0)

    class Config:
        strict = True
        coerce = True


class BoundSchema(pa.DataFrameModel):
    """bound: 孤立ソリトンの M 値エネルギー変調のレート上界"""

    m_levels: Series[int] = pa.Field(ge=2)
    bound_bps: Series[float] = pa.Field(gt=0)
    min_interval_s: Series[float] = pa.Field(gt=0)
    soliton_tbp: Series[float] = pa.Field(gt=0)
    w_max_Hz: Series[float] = pa.Field(gt=0)
    eps: Series[float] = pa.Field(gt=0, lt=1)

    class Config:
        strict = True
        coerce = True

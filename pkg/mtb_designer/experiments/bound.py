"""
レート上界実験モジュール

孤立ソリトンの M 値エネルギー変調について、帯域制約下の伝送レート上界と
対応する変調間隔の下限を出力します。伝搬計算は行いません。
"""

from typing import Type

import pandas as pd
import pandera.pandas as pa

from ..pulse.soliton import soliton_em_rate_bound, soliton_min_interval, soliton_tbp
from ..shared.settings_manager import RunConfig
from .base import ExperimentContext, ExperimentPlugin
from .schemas import BoundSchema


class BoundExperiment(ExperimentPlugin):
    @property
    def name(self) -> str:
        return "Soliton EM Rate Bound"

    @property
    def command(self) -> str:
        return "bound"

    @property
    def description(self) -> str:
        return "Closed-form rate bound of isolated-soliton energy modulation"

    @property
    def schema(self) -> Type[pa.DataFrameModel]:
        return BoundSchema

    def run(self, config: RunConfig, context: ExperimentContext) -> pd.DataFrame:
        m_levels = context.m_levels or config.bound.m_levels
        w_max, eps = config.w_max_hz, config.eps
        rows = [
            {
                "m_levels": m,
                "bound_bps": soliton_em_rate_bound(m, w_max, eps),
                "min_interval_s": soliton_min_interval(m, w_max, eps),
                "soliton_tbp": soliton_tbp(eps),
                "w_max_Hz": w_max,
                "eps": eps,
            }
            for m in m_levels
        ]
        return pd.DataFrame(rows, columns=["m_levels", "bound_bps", "min_interval_s", "soliton_tbp", "w_max_Hz", "eps"])

"""
伝搬実験モジュール

波形ファイルを読み込み、指定ファイバに沿った強度面 |q(t, z)|^2 を縦持ちのテーブルとして出力します。
距離ごとの実効時間幅・実効帯域幅の推移も別ファイルに書き出します。
"""

import os
from typing import Type

import numpy as np
import pandas as pd
import pandera.pandas as pa

from ..channel.propagator import profile_of, propagate_snapshots
from ..shared.constants import KM_TO_M
from ..shared.errors import ConfigError
from ..shared.logging import get_logger
from ..shared.settings_manager import RunConfig
from ..shared.waveform_io import read_waveform
from .base import ExperimentContext, ExperimentPlugin
from .output import write_csv
from .schemas import DurationProfileSchema, PropagateSurfaceSchema

logger = get_logger(__name__, scope="Experiment")

PROFILE_NAME = "propagate_profile.csv"


def intensity_surface(z_km: np.ndarray, t: np.ndarray, fields: np.ndarray) -> pd.DataFrame:
    """(z, t) ごとの瞬時パワーを z 優先の順に並べます。"""
    return pd.DataFrame(
        {
            "z_m": np.repeat(z_km * KM_TO_M, len(t)),
            "t_seconds": np.tile(t, len(z_km)),
            "power_W": (np.abs(fields) ** 2).ravel(),
        }
    )


class PropagateExperiment(ExperimentPlugin):
    @property
    def name(self) -> str:
        return "Propagation Surface"

    @property
    def command(self) -> str:
        return "propagate"

    @property
    def description(self) -> str:
        return "Intensity of a stored waveform along the fiber"

    @property
    def schema(self) -> Type[pa.DataFrameModel]:
        return PropagateSurfaceSchema

    def run(self, config: RunConfig, context: ExperimentContext) -> pd.DataFrame:
        if not context.waveform:
            raise ConfigError("propagate needs a waveform file")
        section = config.propagate
        fiber = config.fiber(section.fiber)
        signal = read_waveform(context.waveform)
        logger.info(f"Propagating {context.waveform} over '{section.fiber}' ({section.n_snapshots} snapshots)")

        z_km, fields = propagate_snapshots(signal, fiber, config.ssfm, section.n_snapshots)

        profile = DurationProfileSchema.validate(profile_of(z_km, fields, signal.grid.dt, config.eps))
        path = write_csv(profile, os.path.join(context.out_dir, PROFILE_NAME))
        logger.debug(f"Wrote duration profile {path}")

        return intensity_surface(z_km, signal.grid.t, fields)

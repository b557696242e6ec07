"""
MTB 設計実験モジュール

(ファイバ, エネルギー) ごとに MTB 固定点を求め、固定点時間幅・帯域内エネルギー比・
実効帯域幅・時間帯域幅積を出力します。設計したパルスは波形ファイルとしても保存できます。
"""

import os
from typing import Any, Dict, List, Tuple, Type

import pandas as pd
import pandera.pandas as pa

from ..channel.models import FiberParams, SsfmConfig
from ..design.models import MtbResult, OptimizerConfig
from ..design.optimizer import find_mtb
from ..shared.constants import PJ
from ..shared.logging import get_logger
from ..shared.settings_manager import RunConfig, energies_j
from ..shared.waveform_io import write_waveform
from .base import ExperimentContext, ExperimentPlugin, map_points
from .schemas import MtbDesignSchema

logger = get_logger(__name__, scope="Experiment")

COLUMNS = [
    "fiber",
    "energy_J",
    "t_star_s",
    "rx_duration_s",
    "inband",
    "tx_bandwidth_Hz",
    "rx_bandwidth_Hz",
    "w_eff_Hz",
    "tbp",
    "converged",
    "n_evaluations",
    "n_diagnostics",
    "max_duration_along_channel_s",
]

_Point = Tuple[str, float, float, float, FiberParams, SsfmConfig, OptimizerConfig, float, float]


def design_point(point: _Point) -> Tuple[str, MtbResult]:
    name, energy, w_max, eps, fiber, ssfm, optimizer, max_dt, window_factor = point
    return name, find_mtb(energy, w_max, eps, fiber, ssfm, optimizer, max_dt, window_factor)


def result_row(name: str, result: MtbResult) -> Dict[str, Any]:
    design = result.design
    w_eff = max(design.tx_bandwidth, design.rx_bandwidth)
    return {
        "fiber": name,
        "energy_J": result.energy,
        "t_star_s": result.t_star,
        "rx_duration_s": design.rx_duration,
        "inband": design.inband,
        "tx_bandwidth_Hz": design.tx_bandwidth,
        "rx_bandwidth_Hz": design.rx_bandwidth,
        "w_eff_Hz": w_eff,
        "tbp": design.modulation_interval * w_eff,
        "converged": design.converged,
        "n_evaluations": design.n_evaluations,
        "n_diagnostics": len(result.diagnostics),
        "max_duration_along_channel_s": design.max_duration_along_channel,
    }


def waveform_name(name: str, energy: float) -> str:
    return f"mtb_{name}_{energy / PJ:.3f}pJ.csv"


class MtbDesignExperiment(ExperimentPlugin):
    @property
    def name(self) -> str:
        return "MTB Design"

    @property
    def command(self) -> str:
        return "mtb-design"

    @property
    def description(self) -> str:
        return "Fixed-point minimum-time-broadening pulses per fiber and energy"

    @property
    def schema(self) -> Type[pa.DataFrameModel]:
        return MtbDesignSchema

    def run(self, config: RunConfig, context: ExperimentContext) -> pd.DataFrame:
        section = config.mtb_design
        optimizer = config.optimizer.model_copy(update={"seed": context.seed})
        points: List[_Point] = [
            (
                name,
                energy,
                config.w_max_hz,
                config.eps,
                config.fiber(name),
                config.ssfm,
                optimizer,
                config.grid.max_dt_s,
                config.grid.window_factor,
            )
            for name in section.fibers
            for energy in energies_j(section.energies_pj)
        ]
        logger.info(f"Designing {len(points)} MTB pulses")
        results = map_points(design_point, points, context.jobs)

        rows = []
        for name, result in results:
            rows.append(result_row(name, result))
            if section.write_waveforms:
                path = os.path.join(context.out_dir, "waveforms", waveform_name(name, result.energy))
                write_waveform(result.design.pulse, path)
                logger.debug(f"Wrote waveform {path}")
        return pd.DataFrame(rows, columns=COLUMNS)

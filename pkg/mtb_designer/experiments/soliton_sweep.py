"""
ソリトン掃引実験モジュール

エネルギーごとに、実効時間幅 T_s に打ち切ったソリトンの送信時間幅・帯域幅と、
各ファイバ通過後の受信時間幅・帯域幅、時間帯域幅積 max{T}·max{W} を求めます。
"""

from typing import Dict, List, Tuple, Type

import pandas as pd
import pandera.pandas as pa

from ..channel.models import FiberParams, SsfmConfig
from ..channel.propagator import received_magnitude, suggest_grid
from ..pulse.metrics import effective_bandwidth, effective_duration
from ..pulse.soliton import (
    soliton_amplitude_for_energy,
    soliton_bandwidth,
    soliton_duration,
    truncated_soliton,
)
from ..shared.errors import ConfigError
from ..shared.logging import get_logger
from ..shared.settings_manager import RunConfig, energies_j
from .base import ExperimentContext, ExperimentPlugin, map_points
from .schemas import SolitonSweepSchema

logger = get_logger(__name__, scope="Experiment")

_Point = Tuple[float, float, float, List[Tuple[str, FiberParams]], SsfmConfig, float, float]


def fiber_columns(name: str) -> List[str]:
    return [f"rx_duration_{name}_s", f"rx_bandwidth_{name}_Hz", f"tbp_{name}"]


def sweep_point(point: _Point) -> Dict[str, float]:
    """1 つのエネルギーについて全ファイバの受信時間幅を計算します。"""
    energy, eps, w_max, fibers, ssfm, max_dt, window_factor = point
    reference = fibers[0][1]
    amplitude = soliton_amplitude_for_energy(energy, reference.beta2, reference.gamma)
    t_s = soliton_duration(amplitude, eps, reference.beta2, reference.gamma)
    w_s = soliton_bandwidth(amplitude, eps, reference.beta2, reference.gamma)
    row: Dict[str, float] = {
        "energy_J": energy,
        "amplitude_sqrtW": amplitude,
        "tx_duration_s": t_s,
        "tx_bandwidth_Hz": w_s,
    }

    for name, fiber in fibers:
        grid = suggest_grid(t_s, w_max, fiber, max_dt, window_factor)
        pulse = truncated_soliton(energy, eps, grid, fiber.beta2, fiber.gamma)
        received = received_magnitude(pulse, fiber, ssfm)
        rx_duration = effective_duration(received, eps)
        rx_bandwidth = effective_bandwidth(received, eps)
        row[f"rx_duration_{name}_s"] = rx_duration
        row[f"rx_bandwidth_{name}_Hz"] = rx_bandwidth
        row[f"tbp_{name}"] = max(t_s, rx_duration) * max(w_s, rx_bandwidth)
    return row


class SolitonSweepExperiment(ExperimentPlugin):
    @property
    def name(self) -> str:
        return "Soliton Sweep"

    @property
    def command(self) -> str:
        return "soliton-sweep"

    @property
    def description(self) -> str:
        return "Transmit/received effective durations of truncated solitons versus energy"

    @property
    def schema(self) -> Type[pa.DataFrameModel]:
        return SolitonSweepSchema

    def run(self, config: RunConfig, context: ExperimentContext) -> pd.DataFrame:
        section = config.soliton_sweep
        fibers = [(name, config.fiber(name)) for name in section.fibers]
        if not fibers:
            raise ConfigError("soliton_sweep.fibers must name at least one fiber")
        linear = [name for name, fiber in fibers if fiber.gamma <= 0]
        if linear:
            raise ConfigError(f"soliton_sweep.fibers: solitons need gamma > 0, got linear fibers {linear}")

        columns = ["energy_J", "amplitude_sqrtW", "tx_duration_s", "tx_bandwidth_Hz"]
        for name, _ in fibers:
            columns += fiber_columns(name)

        points: List[_Point] = [
            (e, config.eps, config.w_max_hz, fibers, config.ssfm, config.grid.max_dt_s, config.grid.window_factor)
            for e in energies_j(section.energies_pj)
        ]
        logger.info(f"Sweeping {len(points)} energies over {[name for name, _ in fibers]}")
        rows = map_points(sweep_point, points, context.jobs)
        return pd.DataFrame(rows, columns=columns)

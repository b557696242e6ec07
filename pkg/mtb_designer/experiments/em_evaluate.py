"""
エネルギー変調リンク評価実験モジュール

ファイバ・パルス方式 (ソリトン / MTB)・M ごとに、エネルギーレベルを選んで方式を構成し、
雑音なしのループバックでリンクを評価します。出力の各行は伝送レート表と
スペクトル効率表の 1 セルに対応します。

エネルギーレベルの選び方:
- ソリトン OOK: 打ち切りソリトンの時間幅曲線 max{T_s, T_rx}(E) 上で T を最小化
- ソリトン M >= 4: 帯域制約下の最大エネルギー (格子上) を e_max とする (最低レベルの T_s が支配的)
- MTB: MTB 固定点の曲線 (E -> 0 で分散のみの固定点に収束) 上で T を最小化
"""

from typing import Any, Dict, List, Optional, Tuple, Type

import numpy as np
import pandas as pd
import pandera.pandas as pa

from ..channel.models import FiberParams
from ..design.models import MtbResult
from ..link.evaluator import evaluate_link, random_messages
from ..link.models import EmScheme
from ..link.scheme import (
    FAMILY_SOLITON,
    build_mtb_scheme,
    build_soliton_scheme,
    energy_grid,
    mtb_rate_approximation,
    select_energy_levels,
)
from ..pulse.soliton import max_soliton_energy, soliton_em_rate_bound
from ..shared.constants import PJ, PS
from ..shared.logging import get_logger
from ..shared.settings_manager import RunConfig, energies_j
from .base import ExperimentContext, ExperimentPlugin, map_points
from .mtb_design import design_point
from .schemas import EmEvaluateSchema
from .soliton_sweep import sweep_point

logger = get_logger(__name__, scope="Experiment")

COLUMNS = [
    "family",
    "fiber",
    "m_levels",
    "e_max_J",
    "t_mod_s",
    "w_eff_Hz",
    "rate_bps",
    "spectral_efficiency_bps_per_Hz",
    "tbp",
    "n_symbols",
    "n_errors",
    "max_leakage_J",
    "bound_bps",
    "mtb_approx_bps",
    "scaled_family",
]


def dispersion_only(fiber: FiberParams) -> FiberParams:
    """同じ β2 と長さを持つ分散のみの通信路"""
    return fiber.model_copy(update={"alpha_db_per_km": 0.0, "gamma": 0.0})


class EmEvaluateExperiment(ExperimentPlugin):
    @property
    def name(self) -> str:
        return "EM Link Evaluation"

    @property
    def command(self) -> str:
        return "em-evaluate"

    @property
    def description(self) -> str:
        return "Transmission rate and spectral efficiency of soliton and MTB energy modulation"

    @property
    def schema(self) -> Type[pa.DataFrameModel]:
        return EmEvaluateSchema

    def run(self, config: RunConfig, context: ExperimentContext) -> pd.DataFrame:
        section = config.em_evaluate
        m_levels = context.m_levels or section.m_levels
        rows: List[Dict[str, Any]] = []

        for name in section.fibers:
            fiber = config.fiber(name)
            for family in section.schemes:
                if family == FAMILY_SOLITON and fiber.gamma <= 0:
                    logger.warning(f"Skipping soliton scheme over linear fiber '{name}'")
                    continue
                if family == FAMILY_SOLITON:
                    rows += self._soliton_rows(config, context, name, fiber, m_levels)
                else:
                    rows += self._mtb_rows(config, context, name, fiber, m_levels)

        return pd.DataFrame(rows, columns=COLUMNS)

    def _row(
        self,
        scheme: EmScheme,
        name: str,
        fiber: FiberParams,
        config: RunConfig,
        context: ExperimentContext,
        bound: Optional[float],
        approx: Optional[float],
    ) -> Dict[str, Any]:
        messages = random_messages(scheme.m_levels, config.em_evaluate.n_symbols, context.seed)
        report = evaluate_link(scheme, fiber, config.ssfm, messages, config.grid.max_dt_s)
        row = report.to_row()
        row.update(
            {
                "fiber": name,
                "bound_bps": bound,
                "mtb_approx_bps": approx,
                "scaled_family": scheme.is_scaled_family(),
            }
        )
        logger.info(
            f"{scheme.family} {scheme.m_levels}-EM over {name}: T={scheme.t_mod / PS:.1f} ps "
            f"R={scheme.rate / 1e9:.3f} Gbit/s SE={scheme.spectral_efficiency:.4f} errors={report.n_errors}"
        )
        return row

    def _soliton_rows(
        self, config: RunConfig, context: ExperimentContext, name: str, fiber: FiberParams, m_levels: List[int]
    ) -> List[Dict[str, Any]]:
        section = config.em_evaluate
        step = section.energy_grid_step_pj * PJ
        e_limit = max_soliton_energy(config.w_max_hz, config.eps, fiber.beta2, fiber.gamma)
        grid_max = energy_grid(e_limit, step)[-1]

        curve: Optional[Tuple[np.ndarray, np.ndarray]] = None
        rows = []
        for m in m_levels:
            if m == 2:
                if curve is None:
                    curve = self._soliton_curve(config, context, name, fiber, e_limit)
                e_grid = energy_grid(min(e_limit, float(curve[0][-1])), step)
                e_max, _ = select_energy_levels(2, curve[0], curve[1], e_grid)
            else:
                e_max = grid_max
            scheme = build_soliton_scheme(
                m,
                e_max,
                config.eps,
                config.w_max_hz,
                fiber,
                config.ssfm,
                config.grid.max_dt_s,
                config.grid.window_factor,
            )
            bound = soliton_em_rate_bound(m, config.w_max_hz, config.eps)
            rows.append(self._row(scheme, name, fiber, config, context, bound, None))
        return rows

    def _soliton_curve(
        self, config: RunConfig, context: ExperimentContext, name: str, fiber: FiberParams, e_limit: float
    ) -> Tuple[np.ndarray, np.ndarray]:
        energies = [e for e in energies_j(config.em_evaluate.soliton_energies_pj) if e <= e_limit * (1 + 1e-12)]
        if not energies:
            raise ValueError(f"no soliton energy below the bandwidth-limited maximum {e_limit / PJ:.3f} pJ")
        points = [
            (e, config.eps, config.w_max_hz, [(name, fiber)], config.ssfm, config.grid.max_dt_s, config.grid.window_factor)
            for e in sorted(energies)
        ]
        rows = map_points(sweep_point, points, context.jobs)
        es = np.array([r["energy_J"] for r in rows])
        ts = np.array([max(r["tx_duration_s"], r[f"rx_duration_{name}_s"]) for r in rows])
        return es, ts

    def _mtb_rows(
        self, config: RunConfig, context: ExperimentContext, name: str, fiber: FiberParams, m_levels: List[int]
    ) -> List[Dict[str, Any]]:
        section = config.em_evaluate
        optimizer = config.optimizer.model_copy(update={"seed": context.seed})
        common = (config.w_max_hz, config.eps)
        tail = (config.ssfm, optimizer, config.grid.max_dt_s, config.grid.window_factor)

        energies = sorted(energies_j(section.mtb_energies_pj))
        points = [(name, e, *common, fiber, *tail) for e in energies]
        points.append(("dispersion_only", PJ, *common, dispersion_only(fiber), *tail))
        results = [result for _, result in map_points(design_point, points, context.jobs)]
        limit = results.pop()
        designs: Dict[float, MtbResult] = dict(zip(energies, results))
        t_do = limit.modulation_interval
        logger.info(f"dispersion-only limit for '{name}': T={t_do / PS:.1f} ps")

        curve_e = np.array([0.0] + energies)
        curve_t = np.array([t_do] + [r.modulation_interval for r in results])
        e_grid = energy_grid(energies[-1], section.energy_grid_step_pj * PJ)

        rows = []
        for m in m_levels:
            e_max, _ = select_energy_levels(m, curve_e, curve_t, e_grid)
            scheme = build_mtb_scheme(
                m,
                e_max,
                config.eps,
                config.w_max_hz,
                fiber,
                config.ssfm,
                optimizer,
                config.grid.max_dt_s,
                config.grid.window_factor,
                context.jobs,
                designs,
            )
            rows.append(self._row(scheme, name, fiber, config, context, None, mtb_rate_approximation(m, t_do)))
        return rows

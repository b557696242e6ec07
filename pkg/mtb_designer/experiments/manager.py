"""
実験マネージャーモジュール

組み込み実験の登録・検索と、実行 (スキーマ検証と CSV 書き出し) を行います。
"""

from __future__ import annotations

import os
import time
from typing import Dict, List, Tuple

import pandas as pd

from ..shared.i18n import _
from ..shared.logging import get_logger
from ..shared.settings_manager import RunConfig
from .base import ExperimentContext, ExperimentPlugin
from .output import write_csv

logger = get_logger(__name__, scope="Experiment")
perf_logger = get_logger(__name__ + ".perf", scope="PERF")


class ExperimentManager:
    def __init__(self):
        self.experiments: Dict[str, ExperimentPlugin] = {}

    def register(self, experiment: ExperimentPlugin) -> None:
        if experiment.command in self.experiments:
            raise ValueError(f"duplicate experiment command: {experiment.command}")
        self.experiments[experiment.command] = experiment
        logger.debug(_("Registered Experiment: {}").format(experiment.name))

    def load_builtin_experiments(self) -> None:
        """組み込み実験の読み込み"""
        # 遅延インポートで循環参照を回避
        from .bound import BoundExperiment
        from .em_evaluate import EmEvaluateExperiment
        from .mtb_design import MtbDesignExperiment
        from .propagate import PropagateExperiment
        from .soliton_sweep import SolitonSweepExperiment

        self.register(SolitonSweepExperiment())
        self.register(MtbDesignExperiment())
        self.register(EmEvaluateExperiment())
        self.register(PropagateExperiment())
        self.register(BoundExperiment())

    @property
    def commands(self) -> List[str]:
        return list(self.experiments)

    def get(self, command: str) -> ExperimentPlugin:
        if command not in self.experiments:
            raise KeyError(f"unknown experiment '{command}' (available: {', '.join(self.commands)})")
        return self.experiments[command]

    def run(self, command: str, config: RunConfig, context: ExperimentContext) -> Tuple[pd.DataFrame, str]:
        """
        実験を実行し、検証済みのテーブルを CSV に書き出します。

        Returns:
            (DataFrame, 書き出した CSV のパス)
        """
        experiment = self.get(command)
        logger.info(_("Running {}...").format(experiment.name))
        t0 = time.perf_counter()
        df = experiment.validate(experiment.run(config, context))
        path = write_csv(df, os.path.join(context.out_dir, experiment.output_name))
        perf_logger.debug(f"{command} took {time.perf_counter() - t0:.2f}s")
        logger.info(_("Wrote {} rows to {}").format(len(df), path))
        return df, path

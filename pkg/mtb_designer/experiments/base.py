"""
実験プラグイン基底クラスモジュール

すべての実験 (サブコマンド) が継承する基底クラス ExperimentPlugin と、
実行時の共通パラメータ ExperimentContext を定義します。
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, Type, TypeVar

import pandas as pd
import pandera.pandas as pa
from pydantic import BaseModel, ConfigDict, Field

from ..shared.settings_manager import RunConfig

T = TypeVar("T")
R = TypeVar("R")


class ExperimentContext(BaseModel):
    """CLI から渡される実行時パラメータ"""

    out_dir: str
    jobs: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    waveform: Optional[str] = None
    m_levels: Optional[List[int]] = None
    model_config = ConfigDict(frozen=True)


class ExperimentPlugin(ABC):
    """すべての実験の基底クラス"""

    @property
    @abstractmethod
    def name(self) -> str:
        """実験の表示名"""
        pass

    @property
    @abstractmethod
    def command(self) -> str:
        """CLI のサブコマンド名"""
        pass

    @property
    def plugin_id(self) -> str:
        """実験の一意なID (モジュール名.クラス名)"""
        return f"{self.__class__.__module__}.{self.__class__.__name__}"

    @property
    def description(self) -> str:
        return ""

    @property
    @abstractmethod
    def schema(self) -> Type[pa.DataFrameModel]:
        """run が返す DataFrame のスキーマ"""
        pass

    @property
    def output_name(self) -> str:
        """出力 CSV のファイル名"""
        return f"{self.command.replace('-', '_')}.csv"

    @abstractmethod
    def run(self, config: RunConfig, context: ExperimentContext) -> pd.DataFrame:
        """
        実験を実行して結果テーブルを返します。

        Args:
            config: 検証済みの実行設定
            context: 出力ディレクトリや並列数などの実行時パラメータ

        Returns:
            pd.DataFrame: schema に従う結果テーブル (行順は入力順)
        """
        pass

    def validate(self, df: pd.DataFrame) -> pd.DataFrame:
        return self.schema.validate(df)


def map_points(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """
    独立な掃引点を評価します。jobs > 1 ではプロセスプールで並列に実行し、結果は入力順に返します。

    func はモジュールのトップレベル関数 (pickle 可能) である必要があります。
    """
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as executor:
        return list(executor.map(func, items))

"""
ロギング設定モジュール

アプリケーション全体のロギング設定を初期化する関数と、モジュールごとのスコープ付きロガーを提供します。

環境変数:
    MTB_DEBUG: 設定されていれば DEBUG レベル (時刻とロガー名付き) で出力します
    MTB_QUIET_SCOPES: カンマ区切りのスコープ名。該当スコープのログを出力しません (例: "PERF,Channel")
"""

import logging
import os
import sys
from typing import Iterable, Optional, Union

# スコープ名と対応する処理
SCOPES = {
    "Core": "CLI 処理と終了コードへの対応づけ",
    "Config": "設定ファイルの読み込み",
    "Experiment": "実験 (サブコマンド) の実行と CSV 出力",
    "Channel": "SSFM 伝搬と収束検査",
    "Basis": "時間制限集中基底の構成",
    "Design": "MTB 最適化と固定点探索",
    "Link": "エネルギー変調方式の構成とリンク評価",
    "i18n": "国際化処理",
    "PERF": "処理時間の計測 (DEBUG のみ)",
}


class ScopedLoggerAdapter(logging.LoggerAdapter):
    """メッセージに [scope] を前置し、LogRecord に scope 属性を付けます。"""

    def process(self, msg, kwargs):
        kwargs["extra"] = {**kwargs.get("extra", {}), "scope": self.extra["scope"]}
        return "[{}] {}".format(self.extra["scope"], msg), kwargs


class ScopeFilter(logging.Filter):
    """指定したスコープのレコードを落とすフィルタ"""

    def __init__(self, quiet: Iterable[str]):
        super().__init__()
        self.quiet = frozenset(quiet)

    def filter(self, record: logging.LogRecord) -> bool:
        return getattr(record, "scope", None) not in self.quiet


def quiet_scopes() -> frozenset:
    """MTB_QUIET_SCOPES から抑制するスコープを読み取ります。未知の名前は無視します。"""
    raw = os.getenv("MTB_QUIET_SCOPES", "")
    return frozenset(s.strip() for s in raw.split(",") if s.strip() in SCOPES)


def setup_logging():
    """ロギング設定の初期化。環境変数によってレベルとスコープの抑制を切り替えます。"""
    level = logging.INFO
    format_str = "%(levelname)s: %(message)s"

    if os.getenv("MTB_DEBUG") or os.getenv("DEBUG"):
        level = logging.DEBUG
        # DEBUG時は時刻とモジュール名も表示
        format_str = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

    logging.basicConfig(level=level, format=format_str, stream=sys.stderr, datefmt="%H:%M:%S")

    quiet = quiet_scopes()
    if quiet:
        for handler in logging.getLogger().handlers:
            if not any(isinstance(f, ScopeFilter) for f in handler.filters):
                handler.addFilter(ScopeFilter(quiet))


def get_logger(name: str, scope: Optional[str] = None) -> Union[logging.Logger, ScopedLoggerAdapter]:
    """
    指定された名前とスコープでロガーを取得します。
    scopeが指定された場合、ScopedLoggerAdapterを返します。

    Raises:
        ValueError: SCOPES にないスコープ名
    """
    logger = logging.getLogger(name)
    if scope:
        if scope not in SCOPES:
            raise ValueError(f"unknown log scope {scope!r}; expected one of {', '.join(SCOPES)}")
        return ScopedLoggerAdapter(logger, {"scope": scope})
    return logger

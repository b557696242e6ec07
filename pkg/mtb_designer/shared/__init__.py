"""
共有モジュールパッケージ

CLI、実験、数値計算モジュールから共通で使用される
ユーティリティモジュール (定数・例外・ロギング・国際化) を集約します。
"""

from .constants import GHZ, PJ, PS, is_power_of_two, log_ratio
from .errors import (
    BasisError,
    BracketError,
    ConfigError,
    FixedPointError,
    GridOverflowError,
    InfeasibleDesignError,
    MonotonicityWarning,
    MtbDesignerError,
    NonConvergenceError,
    NumericalError,
)
from .i18n import _, get_translator
from .logging import get_logger, setup_logging

__all__ = [
    "setup_logging",
    "get_logger",
    "_",
    "get_translator",
    "GHZ",
    "PJ",
    "PS",
    "is_power_of_two",
    "log_ratio",
    "MtbDesignerError",
    "ConfigError",
    "NumericalError",
    "GridOverflowError",
    "NonConvergenceError",
    "BasisError",
    "InfeasibleDesignError",
    "BracketError",
    "FixedPointError",
    "MonotonicityWarning",
]

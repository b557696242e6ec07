"""
パルス設計パッケージ

固定した送信時間幅での受信実効時間幅最小化と、MTB 固定点探索を提供します。
"""

from .models import DesignProblem, DesignResult, MtbResult, OptimizerConfig, TraceRecord
from .optimizer import find_mtb, minimize_rx_duration

__all__ = [
    "DesignProblem",
    "DesignResult",
    "MtbResult",
    "OptimizerConfig",
    "TraceRecord",
    "find_mtb",
    "minimize_rx_duration",
]

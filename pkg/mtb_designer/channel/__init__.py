"""
通信路パッケージ

ファイバパラメータと、分割ステップフーリエ法による NLS 伝搬を提供します。
"""

from .models import FiberParams, SsfmConfig
from .propagator import (
    amplify_to_energy,
    duration_profile,
    propagate,
    propagate_batch,
    propagate_snapshots,
    received_magnitude,
    suggest_grid,
)

__all__ = [
    "FiberParams",
    "SsfmConfig",
    "amplify_to_energy",
    "duration_profile",
    "propagate",
    "propagate_batch",
    "propagate_snapshots",
    "received_magnitude",
    "suggest_grid",
]

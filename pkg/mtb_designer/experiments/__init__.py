from .base import ExperimentContext, ExperimentPlugin, map_points
from .manager import ExperimentManager
from .output import format_preview, write_csv

__all__ = [
    "ExperimentContext",
    "ExperimentManager",
    "ExperimentPlugin",
    "format_preview",
    "map_points",
    "write_csv",
]

"""
エネルギー変調リンクパッケージ

M 値エネルギー変調方式の構成、変調・検出、リンク評価を提供します。
"""

from .evaluator import evaluate_link, random_messages
from .models import EmScheme, LinkReport, TrainLayout
from .modem import detect, modulate, slot_energies, train_layout
from .scheme import (
    build_mtb_scheme,
    build_soliton_scheme,
    energy_levels,
    modulation_interval,
    mtb_rate_approximation,
    select_energy_levels,
    spectral_efficiency,
    time_bandwidth_product,
    transmission_rate,
)

__all__ = [
    "EmScheme",
    "LinkReport",
    "TrainLayout",
    "build_mtb_scheme",
    "build_soliton_scheme",
    "detect",
    "energy_levels",
    "evaluate_link",
    "modulate",
    "modulation_interval",
    "mtb_rate_approximation",
    "random_messages",
    "select_energy_levels",
    "slot_energies",
    "spectral_efficiency",
    "time_bandwidth_product",
    "train_layout",
    "transmission_rate",
]

"""
パルスパッケージ

時間・周波数グリッド、信号計量、ソリトン基準、時間制限集中基底を提供します。
"""

from .basis import BasisSet, build_basis, inband_fraction, project, synthesize
from .metrics import effective_bandwidth, effective_duration, energy, inverse_spectrum, spectrum
from .models import SampledSignal, Spectrum, TimeGrid

__all__ = [
    "BasisSet",
    "SampledSignal",
    "Spectrum",
    "TimeGrid",
    "build_basis",
    "effective_bandwidth",
    "effective_duration",
    "energy",
    "inband_fraction",
    "inverse_spectrum",
    "project",
    "spectrum",
    "synthesize",
]

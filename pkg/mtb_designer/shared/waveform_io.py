"""
波形ファイル入出力モジュール

波形ファイルは次の形式の CSV です (値は 17 有効桁で、読み書きは厳密な逆変換)。

    # dt=<サンプル間隔 [s]>
    # n_samples=<サンプル数>
    t_seconds,real,imag
    ...
"""

import os
from typing import Dict

import numpy as np
import pandas as pd

from ..pulse.models import SampledSignal, TimeGrid
from .errors import ConfigError

FLOAT_FORMAT = "%.17g"
COLUMNS = ["t_seconds", "real", "imag"]


def write_waveform(signal: SampledSignal, path: str) -> None:
    """SampledSignal を波形ファイルに書き出します。"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    df = pd.DataFrame(
        {
            "t_seconds": signal.grid.t,
            "real": signal.samples.real,
            "imag": signal.samples.imag,
        },
        columns=COLUMNS,
    )
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# dt={FLOAT_FORMAT % signal.grid.dt}\n")
        f.write(f"# n_samples={signal.grid.n_samples}\n")
        df.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _read_header(path: str) -> Dict[str, str]:
    header: Dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                header[key.strip()] = value.strip()
    return header


def read_waveform(path: str) -> SampledSignal:
    """
    波形ファイルを読み込みます。

    Raises:
        ConfigError: ヘッダや列が欠けている、あるいはサンプル数が一致しない
    """
    if not os.path.exists(path):
        raise ConfigError("waveform file not found", path=path)

    header = _read_header(path)
    try:
        dt = float(header["dt"])
        n_samples = int(header["n_samples"])
    except (KeyError, ValueError):
        raise ConfigError("waveform header must declare '# dt=' and '# n_samples='", path=path, line=1) from None

    df = pd.read_csv(path, comment="#", float_precision="round_trip")
    if list(df.columns) != COLUMNS:
        raise ConfigError(f"waveform columns must be {COLUMNS}, got {list(df.columns)}", path=path)
    if len(df) != n_samples:
        raise ConfigError(f"header declares {n_samples} samples but the file holds {len(df)}", path=path)

    samples = np.empty(n_samples, dtype=np.complex128)
    samples.real = df["real"].to_numpy(dtype=float)
    samples.imag = df["imag"].to_numpy(dtype=float)
    try:
        grid = TimeGrid(n_samples=n_samples, dt=dt)
        return SampledSignal(grid=grid, samples=samples)
    except ValueError as e:
        raise ConfigError(f"invalid waveform: {e}", path=path) from None

"""
エネルギー変調の変調器・検出器モジュール

メッセージ列から孤立パルス列 Σ p_{m_k}(t - kT) を合成し、受信側では
スロット窓 [kT - T/2, kT + T/2] のエネルギーを最も近いレベルへ判定します。
"""

import math
from typing import Dict, Optional, Sequence

import numpy as np

from ..pulse.metrics import energy_of
from ..pulse.models import SampledSignal, TimeGrid
from ..shared.constants import DEFAULT_MAX_DT_S
from ..shared.errors import GridOverflowError
from .models import EmScheme, TrainLayout

DEFAULT_GUARD_SLOTS = 2
SAME_DT_RTOL = 1e-12


def train_layout(
    scheme: EmScheme, n_symbols: int, max_dt: float = DEFAULT_MAX_DT_S, guard_slots: int = DEFAULT_GUARD_SLOTS
) -> TrainLayout:
    """
    スロット幅 T をちょうど奇数個のサンプルで覆うパルス列グリッドを返します。

    パルス列 (前後のガードスロットを含む) が窓の中央半分に収まるよう、
    サンプル数は 2 (K + 2 guard) S 以上の 2 冪とします。
    """
    if n_symbols < 1:
        raise ValueError(f"n_symbols must be >= 1, got {n_symbols}")
    s = int(math.ceil(scheme.t_mod / max_dt - 1e-9))
    if s % 2 == 0:
        s += 1
    dt = scheme.t_mod / s
    occupied = (n_symbols + 2 * guard_slots) * s
    grid = TimeGrid.covering(2 * occupied * dt, dt)
    first_center = grid.center - ((n_symbols - 1) * s) // 2
    return TrainLayout(
        n_symbols=n_symbols, slot_samples=s, guard_slots=guard_slots, grid=grid, first_center=first_center
    )


def _slot_shape(pulse: SampledSignal, layout: TrainLayout) -> np.ndarray:
    """
    パルスをスロット内のサンプル位置 (スロット中心からのオフセット) へ配置します。

    パルスの刻みが列グリッドと等しければサンプルをそのまま写し、
    異なれば帯域制限 (sinc) 補間 x(τ) = Σ x_n sinc((τ - t_n)/dt) で標本化し直します。
    """
    half = layout.slot_samples // 2
    src = pulse.grid
    if math.isclose(src.dt, layout.grid.dt, rel_tol=SAME_DT_RTOL):
        idx = src.center + np.arange(-half, half + 1)
        inside = (idx >= 0) & (idx < src.n_samples)
        shape = np.zeros(layout.slot_samples, dtype=np.complex128)
        shape[inside] = pulse.samples[idx[inside]]
        return shape

    nz = np.flatnonzero(pulse.samples)
    offsets = np.arange(-half, half + 1) * layout.grid.dt
    kernel = np.sinc((offsets[:, None] - src.t[nz][None, :]) / src.dt)
    return kernel @ pulse.samples[nz]


def _level_shapes(scheme: EmScheme, layout: TrainLayout) -> Dict[int, np.ndarray]:
    """レベルごとのスロット波形。エネルギーはレベルのエネルギーに合わせます。"""
    shapes: Dict[int, np.ndarray] = {}
    for level in range(2, scheme.m_levels + 1):
        shape = _slot_shape(scheme.pulse_for(level), layout)
        e = float(energy_of(shape, layout.grid.dt))
        target = float(scheme.energies[level - 1])
        shapes[level] = shape * math.sqrt(target / e) if e > 0 else shape
    return shapes


def modulate(
    messages: Sequence[int], scheme: EmScheme, layout: Optional[TrainLayout] = None
) -> SampledSignal:
    """
    メッセージ列 (各要素 1..M) を送信パルス列に変換します。

    Raises:
        ValueError: 範囲外のメッセージ、あるいは layout とメッセージ数の不一致
        GridOverflowError: パルス列がグリッドに収まらない
    """
    msgs = np.asarray(messages, dtype=int)
    if msgs.ndim != 1 or msgs.size == 0:
        raise ValueError("messages must be a non-empty one-dimensional sequence")
    if np.any(msgs < 1) or np.any(msgs > scheme.m_levels):
        raise ValueError(f"messages must be in 1..{scheme.m_levels}")

    layout = layout or train_layout(scheme, msgs.size)
    if layout.n_symbols != msgs.size:
        raise ValueError(f"layout holds {layout.n_symbols} slots but {msgs.size} messages were given")

    first = layout.slot_slice(0)
    last = layout.slot_slice(msgs.size - 1)
    if first.start < 0 or last.stop > layout.grid.n_samples:
        raise GridOverflowError("pulse train does not fit the train grid")

    shapes = _level_shapes(scheme, layout)
    samples = np.zeros(layout.grid.n_samples, dtype=np.complex128)
    for k, m in enumerate(msgs):
        if m >= 2:
            samples[layout.slot_slice(k)] += shapes[int(m)]
    return SampledSignal(grid=layout.grid, samples=samples)


def slot_energies(received: SampledSignal, layout: TrainLayout) -> np.ndarray:
    """各スロット窓のエネルギー [J]"""
    if received.grid != layout.grid:
        raise ValueError("received signal is not on the train grid")
    idx = layout.centers[:, None] + np.arange(-(layout.slot_samples // 2), layout.slot_samples // 2 + 1)[None, :]
    return energy_of(received.samples[idx], layout.grid.dt)


def nearest_levels(energies: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """最も近いレベルの番号 (1..M)。距離が等しい場合は小さい番号。"""
    distance = np.abs(np.asarray(energies)[:, None] - np.asarray(levels)[None, :])
    return np.argmin(distance, axis=1) + 1


def detect(received: SampledSignal, scheme: EmScheme, layout: TrainLayout) -> np.ndarray:
    """
    受信振幅から layout の各スロット (layout.n_symbols 個) のメッセージを判定します。
    常に 1..M のいずれかを返します。
    """
    return nearest_levels(slot_energies(received, layout), scheme.energies)

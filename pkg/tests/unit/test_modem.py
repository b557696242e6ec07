"""
変調器・検出器 (link.modem) のユニットテスト
"""

import math
import unittest

import numpy as np
import pytest
from link_helpers import PJ, PS, gaussian_scheme

from mtb_designer.link.modem import detect, modulate, nearest_levels, slot_energies, train_layout
from mtb_designer.pulse.metrics import energy
from mtb_designer.pulse.models import SampledSignal, TimeGrid
from mtb_designer.shared.constants import DEFAULT_MAX_DT_S
from mtb_designer.shared.errors import GridOverflowError


class TestTrainLayout(unittest.TestCase):
    """パルス列グリッドのテストケース"""

    def test_odd_slot_covers_interval_exactly(self):
        """スロットは奇数個のサンプルで T をちょうど覆う"""
        scheme = gaussian_scheme(t_mod=100 * PS)
        layout = train_layout(scheme, 8)

        assert layout.slot_samples % 2 == 1
        assert layout.slot_samples == 101
        assert math.isclose(layout.t_mod, 100 * PS)
        assert layout.grid.dt <= DEFAULT_MAX_DT_S

    def test_train_is_centered(self):
        """パルス列は窓の中央半分に収まる"""
        layout = train_layout(gaussian_scheme(), 9)
        n = layout.grid.n_samples

        assert layout.slot_slice(0).start >= n // 4
        assert layout.slot_slice(8).stop <= 3 * n // 4
        assert layout.centers[4] == layout.grid.center

    def test_invalid_symbol_count(self):
        """シンボル数は 1 以上"""
        with pytest.raises(ValueError):
            train_layout(gaussian_scheme(), 0)


class TestModulateDetect(unittest.TestCase):
    """変調と検出のテストケース"""

    def setUp(self):
        self.scheme = gaussian_scheme(m_levels=4, e_max=1 * PJ)
        self.messages = np.array([1, 4, 2, 3, 3, 1, 4, 2])
        self.layout = train_layout(self.scheme, self.messages.size)

    def test_loopback(self):
        """伝搬なしのループバックではメッセージがそのまま復元される"""
        signal = modulate(self.messages, self.scheme, self.layout)

        detected = detect(signal, self.scheme, self.layout)

        assert list(detected) == list(self.messages)

    def test_slot_energies_match_levels(self):
        """各スロットのエネルギーは送ったレベルのエネルギーに一致"""
        signal = modulate(self.messages, self.scheme, self.layout)

        measured = slot_energies(signal, self.layout)

        assert np.allclose(measured, self.scheme.energies[self.messages - 1], rtol=1e-9, atol=1e-9 * PJ)
        assert math.isclose(energy(signal), float(np.sum(measured)), rel_tol=1e-9)

    def test_zero_level_is_silent(self):
        """レベル 1 はゼロ信号"""
        signal = modulate([1, 1, 1], self.scheme)

        assert energy(signal) == 0.0

    def test_default_layout(self):
        """layout を省略すると train_layout の既定を使う"""
        signal = modulate(self.messages, self.scheme)

        assert signal.grid == self.layout.grid

    def test_invalid_messages(self):
        """範囲外・空のメッセージは ValueError"""
        with pytest.raises(ValueError):
            modulate([0, 1], self.scheme)
        with pytest.raises(ValueError):
            modulate([5], self.scheme)
        with pytest.raises(ValueError):
            modulate([], self.scheme)

    def test_layout_size_mismatch(self):
        """layout のスロット数とメッセージ数が合わなければ ValueError"""
        with pytest.raises(ValueError, match="slots"):
            modulate(self.messages[:3], self.scheme, self.layout)

    def test_train_must_fit_grid(self):
        """窓に収まらないパルス列は GridOverflowError"""
        cramped = self.layout.model_copy(update={"first_center": 3})

        with pytest.raises(GridOverflowError):
            modulate(self.messages, self.scheme, cramped)

    def test_detect_requires_train_grid(self):
        """受信信号が列グリッド上になければ ValueError"""
        other = SampledSignal.zeros(TimeGrid(n_samples=64, dt=1 * PS))

        with pytest.raises(ValueError):
            detect(other, self.scheme, self.layout)


class TestPulsePlacement(unittest.TestCase):
    """スロットへのパルス配置のテストケース"""

    def test_matching_step_copies_samples(self):
        """パルスの刻みと列グリッドの刻みが等しければスロットは設計パルスそのもの"""
        scheme = gaussian_scheme(m_levels=2, t_mod=101 * PS)
        layout = train_layout(scheme, 1)
        pulse = scheme.pulse_for(2)
        half = layout.slot_samples // 2

        signal = modulate([2], scheme, layout)
        slot = signal.samples[layout.slot_slice(0)]
        expected = pulse.samples[pulse.grid.center - half : pulse.grid.center + half + 1]

        assert math.isclose(layout.grid.dt, pulse.grid.dt, rel_tol=1e-12)
        assert np.max(np.abs(slot - expected)) <= 1e-9 * np.max(np.abs(expected))

    def test_different_step_is_band_limited_interpolation(self):
        """刻みが異なれば帯域制限補間で標本化し直し、ガウス波形の解析値と一致する"""
        scheme = gaussian_scheme(m_levels=2, t_mod=100 * PS)
        layout = train_layout(scheme, 1)
        pulse = scheme.pulse_for(2)
        half = layout.slot_samples // 2
        offsets = np.arange(-half, half + 1) * layout.grid.dt

        slot = modulate([2], scheme, layout).samples[layout.slot_slice(0)]
        peak = float(np.max(np.abs(pulse.samples)))
        expected = peak * np.exp(-(offsets**2) / (2 * (5 * PS) ** 2))

        assert not math.isclose(layout.grid.dt, pulse.grid.dt, rel_tol=1e-6)
        assert np.max(np.abs(slot - expected)) <= 1e-9 * peak


class TestNearestLevels(unittest.TestCase):
    """最近傍判定のテストケース"""

    def test_nearest(self):
        """最も近いレベルの番号 (1 始まり) を返す"""
        levels = np.array([0.0, 1.0, 4.0, 9.0])

        assert list(nearest_levels(np.array([0.1, 1.4, 7.0, 20.0]), levels)) == [1, 2, 4, 4]

    def test_ties_go_to_lower_level(self):
        """等距離では小さい番号"""
        levels = np.array([0.0, 1.0, 4.0])

        assert list(nearest_levels(np.array([0.5, 2.5]), levels)) == [1, 2]

    def test_thresholds_are_level_midpoints(self):
        """4 値方式の判定しきい値は隣り合うレベルの中点"""
        levels = gaussian_scheme(m_levels=4, e_max=1 * PJ).energies
        midpoints = 0.5 * (levels[:-1] + levels[1:])

        assert list(nearest_levels(midpoints * (1 - 1e-9), levels)) == [1, 2, 3]
        assert list(nearest_levels(midpoints * (1 + 1e-9), levels)) == [2, 3, 4]

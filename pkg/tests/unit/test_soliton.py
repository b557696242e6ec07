"""
基本ソリトン基準 (pulse.soliton) のユニットテスト
"""

import math
import unittest

import numpy as np
import pytest
from scipy.integrate import quad

from mtb_designer.pulse.metrics import effective_duration, energy
from mtb_designer.pulse.models import TimeGrid
from mtb_designer.pulse.soliton import (
    max_soliton_energy,
    sech,
    soliton_amplitude_for_energy,
    soliton_bandwidth,
    soliton_duration,
    soliton_em_rate_bound,
    soliton_energy,
    soliton_min_interval,
    soliton_pulse,
    soliton_scale,
    soliton_spectrum,
    soliton_tbp,
    truncated_soliton,
)
from mtb_designer.shared.errors import GridOverflowError

PS = 1e-12
PJ = 1e-12
EPS = 1e-4
W_MAX = 50e9


class TestSolitonClosedForms(unittest.TestCase):
    """ソリトンの閉形式のテストケース"""

    def test_energy_amplitude_inverse(self):
        """振幅とエネルギーの変換は互いに逆"""
        for e in (0.1 * PJ, 1.0 * PJ, 1.8 * PJ):
            assert math.isclose(soliton_energy(soliton_amplitude_for_energy(e)), e, rel_tol=1e-12)

    def test_energy_matches_integral(self):
        """E_s = 2A√(|β2|/γ) は ∫A^2 sech^2 の数値積分と一致する"""
        amplitude = 0.1
        width = soliton_scale() / amplitude
        # t = width * u と置換して積分
        integral, _ = quad(lambda u: amplitude**2 * sech(u) ** 2 * width, -np.inf, np.inf)

        assert math.isclose(integral, soliton_energy(amplitude), rel_tol=1e-8)

    def test_duration_holds_one_minus_eps(self):
        """[-T_s/2, T_s/2] に含まれるエネルギー比は 1 - eps"""
        amplitude = 0.1
        width = soliton_scale() / amplitude
        half = soliton_duration(amplitude, EPS) / 2 / width
        inside, _ = quad(lambda u: amplitude**2 * sech(u) ** 2 * width, -half, half)

        assert math.isclose(inside / soliton_energy(amplitude), 1 - EPS, rel_tol=1e-10)

    def test_bandwidth_holds_one_minus_eps(self):
        """閉形式スペクトルの [-W_s, W_s] に含まれるエネルギー比は 1 - eps"""
        amplitude = 0.1
        f_scale = amplitude / (math.pi**2 * soliton_scale())
        w = soliton_bandwidth(amplitude, EPS) / f_scale
        inside, _ = quad(lambda v: soliton_spectrum(amplitude, v * f_scale) ** 2, -w, w)
        total, _ = quad(lambda v: soliton_spectrum(amplitude, v * f_scale) ** 2, -np.inf, np.inf)

        assert math.isclose(inside / total, 1 - EPS, rel_tol=1e-8)

    def test_time_bandwidth_product_is_amplitude_free(self):
        """T_s W_s は振幅によらず ln^2((2-eps)/eps)/π^2"""
        for amplitude in (0.01, 0.1, 0.5):
            product = soliton_duration(amplitude, EPS) * soliton_bandwidth(amplitude, EPS)
            assert math.isclose(product, soliton_tbp(EPS), rel_tol=1e-12)

    def test_max_energy_under_bandwidth_constraint(self):
        """帯域制約下の最大エネルギーは約 1.80 pJ で、そのソリトンの帯域幅は W_max"""
        e_max = max_soliton_energy(W_MAX, EPS)
        amplitude = soliton_amplitude_for_energy(e_max)

        assert abs(e_max / PJ - 1.80) < 0.01
        assert math.isclose(soliton_bandwidth(amplitude, EPS), W_MAX, rel_tol=1e-12)

    def test_linear_fiber_rejected(self):
        """γ = 0 ではソリトンが定義されない"""
        with pytest.raises(ValueError, match="gamma"):
            soliton_scale(gamma=0.0)

    def test_non_positive_inputs_rejected(self):
        """エネルギー・振幅・帯域幅は正でなければならない"""
        with pytest.raises(ValueError):
            soliton_amplitude_for_energy(0.0)
        with pytest.raises(ValueError):
            soliton_duration(-1.0, EPS)
        with pytest.raises(ValueError):
            max_soliton_energy(0.0, EPS)


class TestRateBound(unittest.TestCase):
    """M 値エネルギー変調のレート上界のテストケース"""

    def test_ook_bound_is_about_five_gbps(self):
        """M = 2、W_max = 50 GHz の上界は約 5 Gbit/s"""
        bound = soliton_em_rate_bound(2, W_MAX, EPS)

        assert 4.9e9 < bound < 5.1e9

    def test_bound_scaling_in_m(self):
        """上界は log2(M)/(M-1)^2 に比例する"""
        base = soliton_em_rate_bound(2, W_MAX, EPS)
        for m in (4, 8, 16):
            expected = base * math.log2(m) / (m - 1) ** 2
            assert math.isclose(soliton_em_rate_bound(m, W_MAX, EPS), expected, rel_tol=1e-12)

    def test_min_interval_is_reciprocal(self):
        """最小変調間隔と上界は R = log2(M)/T の関係"""
        t_min = soliton_min_interval(4, W_MAX, EPS)

        assert math.isclose(soliton_em_rate_bound(4, W_MAX, EPS) * t_min, 2.0, rel_tol=1e-12)

    def test_invalid_m(self):
        """M が 2 以上の 2 のべき乗でなければ ValueError"""
        with pytest.raises(ValueError):
            soliton_em_rate_bound(3, W_MAX, EPS)
        with pytest.raises(ValueError):
            soliton_em_rate_bound(1, W_MAX, EPS)


class TestTruncatedSoliton(unittest.TestCase):
    """打ち切りソリトンのテストケース"""

    def test_zero_outside_effective_duration(self):
        """[-T_s/2, T_s/2] の外側のサンプルは 0"""
        grid = TimeGrid(n_samples=4096, dt=0.5 * PS)
        pulse = truncated_soliton(1.0 * PJ, EPS, grid)
        t_s = soliton_duration(soliton_amplitude_for_energy(1.0 * PJ), EPS)

        outside = np.abs(grid.t) > t_s / 2
        assert np.all(pulse.samples[outside] == 0)
        assert np.all(pulse.samples[~outside] != 0)

    def test_truncation_loses_eps_of_energy(self):
        """打ち切り後のエネルギーは (1 - eps)E に近く、実効時間幅は T_s 以下"""
        grid = TimeGrid(n_samples=4096, dt=0.5 * PS)
        e = 1.0 * PJ
        pulse = truncated_soliton(e, EPS, grid)
        t_s = soliton_duration(soliton_amplitude_for_energy(e), EPS)

        assert math.isclose(energy(pulse), (1 - EPS) * e, rel_tol=1e-4)
        assert effective_duration(pulse, EPS) <= t_s

    def test_window_too_short(self):
        """窓が T_s より短ければ GridOverflowError"""
        grid = TimeGrid(n_samples=64, dt=1 * PS)
        with pytest.raises(GridOverflowError):
            truncated_soliton(1.0 * PJ, EPS, grid)

    def test_untruncated_pulse_peak(self):
        """打ち切りのないソリトンの中心値は振幅 A"""
        grid = TimeGrid(n_samples=256, dt=1 * PS)
        s = soliton_pulse(0.2, grid)

        assert math.isclose(abs(s.samples[grid.center]), 0.2)

"""
リンク評価 (link.evaluator) のユニットテスト
"""

import unittest

import numpy as np
from link_helpers import EPS, PJ, gaussian_scheme

from mtb_designer.channel.models import FiberParams
from mtb_designer.link.evaluator import evaluate_link, random_messages


class TestRandomMessages(unittest.TestCase):
    """乱数メッセージ列のテストケース"""

    def test_range_and_reproducibility(self):
        """1..M の値を取り、同じ seed なら同じ列"""
        a = random_messages(4, 500, seed=7)
        b = random_messages(4, 500, seed=7)

        assert a.min() >= 1
        assert a.max() <= 4
        assert set(np.unique(a)) == {1, 2, 3, 4}
        assert np.array_equal(a, b)

    def test_seed_changes_sequence(self):
        """seed が違えば別の列"""
        assert not np.array_equal(random_messages(4, 100, seed=1), random_messages(4, 100, seed=2))


class TestEvaluateLink(unittest.TestCase):
    """雑音なしリンク評価のテストケース"""

    def setUp(self):
        self.scheme = gaussian_scheme(m_levels=4, e_max=1 * PJ)
        self.fiber = FiberParams(beta2=-21.7, gamma=0.0, length_km=1.0)

    def test_short_dispersive_link_is_error_free(self):
        """短い分散のみの通信路では孤立パルスの列を誤りなく検出する"""
        messages = random_messages(4, 16, seed=0)

        report = evaluate_link(self.scheme, self.fiber, None, messages)

        assert report.n_errors == 0
        assert report.n_symbols == 16
        assert report.fiber_kind == "dispersion_only"
        assert report.max_leakage <= 4 * EPS * self.scheme.e_max

    def test_report_carries_scheme_figures(self):
        """報告のレート・効率・時間帯域幅積は方式の値"""
        report = evaluate_link(self.scheme, self.fiber, None, [1, 2, 3, 4])

        assert report.rate == self.scheme.rate
        assert report.spectral_efficiency == self.scheme.spectral_efficiency
        assert report.time_bandwidth_product == self.scheme.time_bandwidth_product
        assert np.allclose(report.expected_energies, self.scheme.energies)

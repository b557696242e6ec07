"""
方式の構成 -> 変調 -> 伝搬 -> 検出 の統合テスト
"""

import json
import os
import shutil
import tempfile
import unittest
from io import StringIO
from unittest.mock import patch

import pandas as pd
import pytest

from mtb_designer.channel.models import FiberParams
from mtb_designer.core import main
from mtb_designer.link.evaluator import evaluate_link, random_messages
from mtb_designer.link.scheme import build_soliton_scheme
from mtb_designer.pulse.soliton import soliton_em_rate_bound

EPS = 1e-4
W_MAX = 50e9
PJ = 1e-12


class TestSolitonLink(unittest.TestCase):
    """孤立ソリトン OOK リンクの統合テスト"""

    def test_lossless_loopback(self):
        """80 km 無損失ファイバ上のソリトン OOK は誤りなく上界以下のレートで動作"""
        fiber = FiberParams(beta2=-21.7, gamma=1.2, length_km=80.0)
        scheme = build_soliton_scheme(2, 1.0 * PJ, EPS, W_MAX, fiber)

        report = evaluate_link(scheme, fiber, None, random_messages(2, 16, seed=0))

        assert report.n_errors == 0
        assert report.rate <= soliton_em_rate_bound(2, W_MAX, EPS)
        assert report.max_leakage <= 4 * EPS * scheme.e_max
        assert scheme.is_scaled_family()


@pytest.mark.slow
class TestEmEvaluateCli(unittest.TestCase):
    """em-evaluate の統合テスト (ソリトン方式のみ)"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.config_path = os.path.join(self.temp_dir, "run.json")
        config = {
            "em_evaluate": {
                "m_levels": [2, 4],
                "fibers": ["lossless"],
                "schemes": ["soliton"],
                "n_symbols": 16,
                "soliton_energies_pj": [0.4, 0.8, 1.2, 1.6],
            }
        }
        with open(self.config_path, "w", encoding="utf-8") as f:
            json.dump(config, f)

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_soliton_rates_respect_bound(self):
        """ソリトン方式のレートは上界以下で、誤りなし"""
        with patch("sys.stdout", new_callable=StringIO):
            main(["em-evaluate", "-c", self.config_path, "-o", self.temp_dir])

        df = pd.read_csv(os.path.join(self.temp_dir, "em_evaluate.csv"))
        assert df["m_levels"].tolist() == [2, 4]
        assert (df["rate_bps"] <= df["bound_bps"]).all()
        assert (df["n_errors"] == 0).all()
        assert df["scaled_family"].all()

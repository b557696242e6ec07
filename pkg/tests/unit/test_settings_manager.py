"""
設定管理 (shared.settings_manager) のユニットテスト
"""

import math
import os
import shutil
import tempfile
import unittest

import pytest

from mtb_designer.shared.constants import PJ, PS
from mtb_designer.shared.errors import ConfigError
from mtb_designer.shared.settings_manager import (
    DEFAULT_PRESET_PATH,
    RunConfig,
    energies_j,
    load_run_config,
    parse_run_config,
)


class TestRunConfig(unittest.TestCase):
    """RunConfig の既定値と換算のテストケース"""

    def test_defaults(self):
        """既定値は 3 種類のファイバと ε = 1e-4, W_max = 50 GHz"""
        config = RunConfig()

        assert set(config.fibers) == {"dispersion_only", "lossless", "lossy"}
        assert config.eps == 1e-4
        assert config.w_max_hz == 50e9
        assert math.isclose(config.grid.max_dt_s, 1.0 * PS)

    def test_fiber_conversion(self):
        """実務単位のファイバ設定を FiberParams に変換"""
        config = RunConfig()

        assert config.fiber("lossy").kind == "lossy"
        assert config.fiber("lossless").beta2 == -21.7
        assert config.fiber("dispersion_only").is_linear

    def test_unknown_fiber_name(self):
        """未定義のファイバ名は KeyError"""
        with pytest.raises(KeyError):
            RunConfig().fiber("nope")

    def test_energies_j(self):
        """pJ から J への換算"""
        assert energies_j([0.5, 1.0]) == [0.5 * PJ, 1.0 * PJ]


class TestParseRunConfig(unittest.TestCase):
    """parse_run_config のテストケース"""

    def test_partial_config_uses_defaults(self):
        """省略したキーは既定値"""
        config = parse_run_config('{"eps": 0.001, "jobs": 2}')

        assert config.eps == 0.001
        assert config.jobs == 2
        assert config.em_evaluate.m_levels == [2, 4]

    def test_unknown_key_reports_line(self):
        """未知のキーは行番号付きの ConfigError"""
        text = '{\n  "eps": 0.0001,\n  "bogus": 1\n}\n'

        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(text, path="run.json")

        assert exc_info.value.line == 3
        assert "bogus" in str(exc_info.value)
        assert str(exc_info.value).startswith("run.json:3:")

    def test_syntax_error_reports_line(self):
        """JSON の構文エラーも行番号付き"""
        text = '{\n  "eps": 0.0001,\n}\n'

        with pytest.raises(ConfigError, match="invalid JSON") as exc_info:
            parse_run_config(text)

        assert exc_info.value.line == 3

    def test_top_level_must_be_object(self):
        """トップレベルはオブジェクト"""
        with pytest.raises(ConfigError, match="object"):
            parse_run_config("[1, 2]")

    def test_nested_error_line(self):
        """ネストしたキーのエラーはそのキーの行を指す"""
        text = '{\n  "bound": {\n    "m_levels": [2, 3]\n  }\n}\n'

        with pytest.raises(ConfigError, match="power of two") as exc_info:
            parse_run_config(text)

        assert exc_info.value.line == 3

    def test_unknown_fiber_reference(self):
        """実験セクションが未定義のファイバを参照すれば ConfigError"""
        with pytest.raises(ConfigError, match="unknown fiber"):
            parse_run_config('{"propagate": {"fiber": "nope"}}')

    def test_non_positive_energy(self):
        """エネルギーは正"""
        with pytest.raises(ConfigError, match="positive"):
            parse_run_config('{"mtb_design": {"energies_pj": [0.5, -1.0]}}')

    def test_empty_curve_energies(self):
        """評価用の曲線エネルギーは空にできない"""
        with pytest.raises(ConfigError, match="at least one"):
            parse_run_config('{"em_evaluate": {"mtb_energies_pj": []}}')

    def test_unknown_scheme_family(self):
        """未知のパルス方式は拒否"""
        with pytest.raises(ConfigError, match="unknown pulse families"):
            parse_run_config('{"em_evaluate": {"schemes": ["gaussian"]}}')


class TestLoadRunConfig(unittest.TestCase):
    """load_run_config のテストケース"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_bundled_preset(self):
        """パスを省略すると同梱プリセットを読み込む"""
        config = load_run_config()

        assert os.path.exists(DEFAULT_PRESET_PATH)
        assert config.bound.m_levels == [2, 4, 8, 16]
        assert config.mtb_design.fibers == ["dispersion_only", "lossless", "lossy"]
        assert config.fiber("lossy").alpha_db_per_km == 0.2

    def test_reads_file(self):
        """指定したファイルを読み込む"""
        path = os.path.join(self.temp_dir, "run.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write('{"output_dir": "out", "seed": 5}')

        config = load_run_config(path)

        assert config.output_dir == "out"
        assert config.seed == 5

    def test_missing_file(self):
        """存在しないファイルは ConfigError"""
        path = os.path.join(self.temp_dir, "missing.json")

        with pytest.raises(ConfigError, match="not found") as exc_info:
            load_run_config(path)

        assert exc_info.value.path == path

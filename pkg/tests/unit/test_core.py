"""
core モジュール (CLI) のユニットテスト
"""

import argparse
import os
import shutil
import tempfile
import unittest
from argparse import Namespace
from io import StringIO
from unittest.mock import patch

import pytest

from mtb_designer.core import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_ERROR,
    build_context,
    build_parser,
    main,
    m_level,
)
from mtb_designer.shared.errors import GridOverflowError
from mtb_designer.shared.settings_manager import RunConfig


class TestArguments(unittest.TestCase):
    """引数解析のテストケース"""

    def test_m_level(self):
        """-m は 2 以上の 2 のべき乗"""
        assert m_level("4") == 4
        with pytest.raises(argparse.ArgumentTypeError):
            m_level("3")
        with pytest.raises(argparse.ArgumentTypeError):
            m_level("1")
        with pytest.raises(argparse.ArgumentTypeError):
            m_level("four")

    def test_repeatable_m(self):
        """-m は繰り返し指定できる"""
        args = build_parser().parse_args(["em-evaluate", "-m", "2", "-m", "8", "-j", "4", "--seed", "3"])

        assert args.command == "em-evaluate"
        assert args.m == [2, 8]
        assert args.jobs == 4
        assert args.seed == 3

    def test_invalid_m_exits(self):
        """不正な -m は argparse のエラー終了"""
        with patch("sys.stderr", new_callable=StringIO), pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["bound", "-m", "6"])

        assert exc_info.value.code == 2

    def test_propagate_needs_waveform(self):
        """propagate は波形ファイルを位置引数に取る"""
        args = build_parser().parse_args(["propagate", "pulse.csv", "-o", "out"])

        assert args.waveform == "pulse.csv"
        assert args.out == "out"


class TestBuildContext(unittest.TestCase):
    """build_context のテストケース"""

    def test_config_values_by_default(self):
        """フラグがなければ設定ファイルの値"""
        config = RunConfig(output_dir="res", jobs=3, seed=9)
        args = Namespace(out=None, jobs=None, seed=None)

        context = build_context(args, config)

        assert context.out_dir == "res"
        assert context.jobs == 3
        assert context.seed == 9
        assert context.waveform is None
        assert context.m_levels is None

    def test_flags_override_config(self):
        """CLI フラグは設定を上書き"""
        config = RunConfig(output_dir="res", jobs=3, seed=9)
        args = Namespace(out="elsewhere", jobs=1, seed=0, m=[4], waveform="w.csv")

        context = build_context(args, config)

        assert context.out_dir == "elsewhere"
        assert context.jobs == 1
        assert context.seed == 0
        assert context.m_levels == [4]
        assert context.waveform == "w.csv"


class TestMain(unittest.TestCase):
    """main のテストケース"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_bound_command(self):
        """bound は CSV を書き出してプレビューとパスを表示"""
        with patch("sys.stdout", new_callable=StringIO) as mock_stdout:
            main(["bound", "--out", self.temp_dir, "-m", "2", "-m", "4"])
            output = mock_stdout.getvalue()

        path = os.path.join(self.temp_dir, "bound.csv")
        assert os.path.exists(path)
        assert "bound_bps" in output
        assert path in output

    def test_missing_config_exits_with_config_error(self):
        """設定ファイルがなければ終了コード 2"""
        missing = os.path.join(self.temp_dir, "missing.json")

        with pytest.raises(SystemExit) as exc_info:
            main(["bound", "-c", missing, "--out", self.temp_dir])

        assert exc_info.value.code == EXIT_CONFIG_ERROR

    def test_invalid_config_exits_with_config_error(self):
        """検証に失敗する設定は終了コード 2"""
        path = os.path.join(self.temp_dir, "run.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write('{"eps": 2.0}')

        with pytest.raises(SystemExit) as exc_info:
            main(["bound", "-c", path])

        assert exc_info.value.code == EXIT_CONFIG_ERROR

    @patch("mtb_designer.experiments.manager.ExperimentManager.run")
    def test_numerical_failure_exits_with_numerical_error(self, mock_run):
        """数値計算の失敗は終了コード 3"""
        mock_run.side_effect = GridOverflowError("energy leaked out of the window")

        with pytest.raises(SystemExit) as exc_info:
            main(["soliton-sweep", "--out", self.temp_dir])

        assert exc_info.value.code == EXIT_NUMERICAL_ERROR

    @patch("mtb_designer.experiments.manager.ExperimentManager.run")
    def test_invalid_input_exits_with_config_error(self, mock_run):
        """実験内の入力エラー (ValueError) は終了コード 2"""
        mock_run.side_effect = ValueError("no e_max in the grid")

        with pytest.raises(SystemExit) as exc_info:
            main(["em-evaluate", "--out", self.temp_dir])

        assert exc_info.value.code == EXIT_CONFIG_ERROR

    def test_no_command_prints_help(self):
        """サブコマンドがなければヘルプを表示"""
        with patch("sys.stdout", new_callable=StringIO) as mock_stdout:
            main([])
            output = mock_stdout.getvalue()

        assert "usage" in output
        assert "soliton-sweep" in output

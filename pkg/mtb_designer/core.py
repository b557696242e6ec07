"""
コアロジックモジュール

MTB パルス設計ツールのメインエントリポイント。
サブコマンド構成: soliton-sweep, mtb-design, em-evaluate, propagate, bound
"""

import argparse
import os
import sys
from typing import List, Optional

from .shared.constants import is_power_of_two
from .shared.errors import ConfigError, NumericalError
from .shared.i18n import _
from .shared.logging import get_logger, setup_logging

logger = get_logger(__name__, scope="Core")

EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def m_level(value: str) -> int:
    """--m の値 (2 以上の 2 のべき乗)"""
    try:
        m = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(_("M must be an integer: {}").format(value)) from None
    if m < 2 or not is_power_of_two(m):
        raise argparse.ArgumentTypeError(_("M must be a power of two >= 2: {}").format(value))
    return m


def build_context(args, config):
    """CLI フラグで設定を上書きし、実行時パラメータを組み立てます。"""
    from .experiments.base import ExperimentContext

    return ExperimentContext(
        out_dir=args.out or config.output_dir,
        jobs=args.jobs if args.jobs is not None else config.jobs,
        seed=args.seed if args.seed is not None else config.seed,
        waveform=getattr(args, "waveform", None),
        m_levels=getattr(args, "m", None),
    )


def cmd_experiment(args) -> None:
    """サブコマンドに対応する実験を実行し、CSV を書き出してプレビューを表示"""
    from .experiments.manager import ExperimentManager
    from .experiments.output import format_preview
    from .shared.settings_manager import load_run_config

    try:
        config = load_run_config(args.config)
        context = build_context(args, config)

        manager = ExperimentManager()
        manager.load_builtin_experiments()
        df, path = manager.run(args.command, config, context)
    except ConfigError as e:
        logger.error(_("Configuration error: {}").format(e))
        sys.exit(EXIT_CONFIG_ERROR)
    except NumericalError as e:
        logger.error(_("Numerical failure ({}): {}").format(type(e).__name__, e))
        sys.exit(EXIT_NUMERICAL_ERROR)
    except (ValueError, KeyError) as e:
        logger.error(_("Invalid input: {}").format(e))
        sys.exit(EXIT_CONFIG_ERROR)

    print(format_preview(df))
    print(_("Saved to {}").format(path))


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-c",
        "--config",
        type=str,
        default=None,
        help=_("Config file (JSON). Defaults to the bundled preset."),
    )
    parser.add_argument("-o", "--out", type=str, default=None, help=_("Output directory. Overrides output_dir."))
    parser.add_argument("--seed", type=int, default=None, help=_("Random seed. Overrides seed."))
    parser.add_argument("-j", "--jobs", type=int, default=None, help=_("Number of parallel workers. Overrides jobs."))


def add_m_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-m",
        "--m",
        type=m_level,
        action="append",
        default=None,
        help=_("Number of energy levels M (repeatable). Overrides the config list."),
    )


def build_parser(version: str = "unknown") -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtb-designer",
        description=_("Design minimum-time-broadening pulses and evaluate energy modulation over NLS fiber."),
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {version}",
        help=_("Show version number and exit."),
    )

    subparsers = parser.add_subparsers(dest="command", help=_("Available commands"))

    # soliton-sweep コマンド
    sweep_parser = subparsers.add_parser("soliton-sweep", help=_("Truncated soliton durations versus energy"))
    add_common_arguments(sweep_parser)
    sweep_parser.set_defaults(func=cmd_experiment)

    # mtb-design コマンド
    design_parser = subparsers.add_parser("mtb-design", help=_("Design MTB pulses at their fixed points"))
    add_common_arguments(design_parser)
    design_parser.set_defaults(func=cmd_experiment)

    # em-evaluate コマンド
    evaluate_parser = subparsers.add_parser("em-evaluate", help=_("Evaluate soliton and MTB energy modulation links"))
    add_common_arguments(evaluate_parser)
    add_m_argument(evaluate_parser)
    evaluate_parser.set_defaults(func=cmd_experiment)

    # propagate コマンド
    propagate_parser = subparsers.add_parser("propagate", help=_("Propagate a stored waveform along the fiber"))
    propagate_parser.add_argument("waveform", help=_("Waveform file written by mtb-design"))
    add_common_arguments(propagate_parser)
    propagate_parser.set_defaults(func=cmd_experiment)

    # bound コマンド
    bound_parser = subparsers.add_parser("bound", help=_("Rate bound of isolated-soliton energy modulation"))
    add_common_arguments(bound_parser)
    add_m_argument(bound_parser)
    bound_parser.set_defaults(func=cmd_experiment)

    return parser


def main(argv: Optional[List[str]] = None) -> None:
    """
    mtb-designer のメインエントリポイント。
    サブコマンド: soliton-sweep, mtb-design, em-evaluate, propagate, bound
    """
    setup_logging()

    lang = os.environ.get("MTB_LANG")
    if lang:
        from .shared.i18n import setup_i18n

        setup_i18n(lang)

    # バージョン情報の取得
    try:
        from importlib.metadata import PackageNotFoundError, version

        try:
            __version__ = version("mtb-designer")
        except PackageNotFoundError:
            __version__ = "unknown"
    except ImportError:
        __version__ = "unknown"

    parser = build_parser(__version__)
    args = parser.parse_args(argv)

    if hasattr(args, "func"):
        args.func(args)
    else:
        parser.print_help()


if __name__ == "__main__":
    main()

"""
例外定義モジュール

CLI の終了コードと対応づけられる例外階層を定義します。
ConfigError は終了コード 2、NumericalError 系は終了コード 3 に対応します。
"""

from typing import Optional


class MtbDesignerError(Exception):
    """パッケージ共通の基底例外"""


class ConfigError(MtbDesignerError):
    """設定ファイルの読み込み・検証エラー (行番号付き)"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        location = self.path or "<config>"
        if self.line is not None:
            location = f"{location}:{self.line}"
        return f"{location}: {self.message}"


class NumericalError(MtbDesignerError):
    """数値計算の失敗 (収束失敗・グリッド溢れなど)"""


class GridOverflowError(NumericalError):
    """伝搬中のエネルギーが計算窓の外側半分に漏れた、あるいはパルスが窓に収まらない"""


class NonConvergenceError(NumericalError):
    """SSFM のステップ半減検査が再試行上限内で収束しなかった"""


class BasisError(NumericalError):
    """集中基底を構成できない (解像度不足・関数数過多など)"""


class InfeasibleDesignError(NumericalError):
    """帯域内エネルギー制約を満たす係数ベクトルが存在しない"""


class BracketError(NumericalError):
    """固定点を挟むブラケットが探索範囲内に見つからない"""


class FixedPointError(NumericalError):
    """二分法で固定点を許容誤差内に決定できない"""


class MonotonicityWarning(UserWarning):
    """外側写像 T_rx(T_p) の単調非増加性が破れたことを示す診断"""

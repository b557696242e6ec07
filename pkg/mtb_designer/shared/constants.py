"""
共通定数モジュール

シミュレーションの既定値 (標準的な単一モードファイバの物理パラメータ) と単位換算係数を定義します。
設定ファイルは ps, pJ, GHz, km などの実務単位で書かれ、取り込み時に SI へ換算されます。
"""

import math

# 単位換算
PS = 1e-12  # s
PJ = 1e-12  # J
GHZ = 1e9  # Hz
PS2_PER_KM_TO_S2_PER_KM = 1e-24
KM_TO_M = 1e3
GBPS = 1e9  # bit/s

# 既定のファイバ・システム定数
DEFAULT_LENGTH_KM = 80.0
DEFAULT_EPS = 1e-4
DEFAULT_W_MAX_HZ = 50 * GHZ
DEFAULT_BETA2_PS2_PER_KM = -21.7
DEFAULT_GAMMA_PER_W_KM = 1.2
LOSSY_ALPHA_DB_PER_KM = 0.2

# SSFM の既定値
DEFAULT_MAX_NONLINEAR_PHASE = 2.5e-4  # rad/step
DEFAULT_MAX_DZ_KM = 0.1

# グリッドの既定値: 刻み 1 ps (= 1/(20 W_max)), 窓幅 >= 8 * 最大パルス幅
DEFAULT_MAX_DT_S = 1.0 * PS
DEFAULT_WINDOW_FACTOR = 8.0

# 最適化の探索段階 (粗いグリッドと粗い SSFM ステップ)。最終パルスは上の既定値で検証する
DEFAULT_SEARCH_MAX_DT_S = 1.0 / (8 * DEFAULT_W_MAX_HZ)
DEFAULT_SEARCH_NONLINEAR_PHASE = 1e-2  # rad/step
DEFAULT_SEARCH_MAX_DZ_KM = 0.5

# 固定点探索
FIXED_POINT_TOL_S = 1.0 * PS
BRACKET_MIN_S = 50.0 * PS
BRACKET_MAX_S = 5000.0 * PS

# 窓の中央半分に残すべきエネルギー比 (これを下回るとグリッド溢れ)
GRID_CENTRAL_FRACTION = 1.0 - 1e-4

# 組み込みファイバ名
FIBER_DISPERSION_ONLY = "dispersion_only"
FIBER_LOSSLESS = "lossless"
FIBER_LOSSY = "lossy"


def log_ratio(eps: float) -> float:
    """ln((2-eps)/eps)。ソリトンの実効幅・実効帯域に現れる係数。"""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    return math.log((2.0 - eps) / eps)


def is_power_of_two(n: int) -> bool:
    return isinstance(n, int) and n >= 1 and (n & (n - 1)) == 0

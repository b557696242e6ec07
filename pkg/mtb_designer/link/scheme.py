"""
エネルギー変調方式の構成モジュール

エネルギーレベル、変調間隔、伝送レート・スペクトル効率・時間帯域幅積の計算と、
孤立ソリトン方式・MTB パルス方式の EmScheme の構成を提供します。
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..channel.models import FiberParams, SsfmConfig
from ..channel.propagator import received_magnitude, suggest_grid
from ..design.models import MtbResult, OptimizerConfig
from ..design.optimizer import find_mtb
from ..pulse.metrics import effective_bandwidth, effective_duration
from ..pulse.models import SampledSignal
from ..pulse.soliton import soliton_amplitude_for_energy, soliton_duration, truncated_soliton
from ..shared.constants import DEFAULT_MAX_DT_S, DEFAULT_WINDOW_FACTOR, PJ, is_power_of_two
from ..shared.logging import get_logger
from .models import EmScheme

logger = get_logger(__name__, scope="Link")

FAMILY_SOLITON = "soliton"
FAMILY_MTB = "mtb"


def _check_m(m_levels: int) -> None:
    if not isinstance(m_levels, (int, np.integer)) or m_levels < 2 or not is_power_of_two(int(m_levels)):
        raise ValueError(f"M must be a power of two >= 2, got {m_levels}")


def energy_levels(m_levels: int, e_max: float) -> np.ndarray:
    """E_m = ((m-1)/(M-1))^2 e_max (m = 1..M)。レベル 1 は厳密に 0。"""
    _check_m(m_levels)
    if e_max < 0:
        raise ValueError(f"e_max must be non-negative, got {e_max}")
    m = int(m_levels)
    return np.arange(m) ** 2 * e_max / (m - 1) ** 2


def modulation_interval(tx_durations: Sequence[float], rx_durations: Sequence[float]) -> float:
    """すべての送信・受信実効時間幅の最大値"""
    durations = list(tx_durations) + list(rx_durations)
    if not durations:
        raise ValueError("at least one duration is required")
    return float(max(durations))


def transmission_rate(m_levels: int, t_mod: float) -> float:
    """R = log2(M)/T [bit/s]"""
    _check_m(m_levels)
    if t_mod <= 0:
        raise ValueError(f"t_mod must be positive, got {t_mod}")
    return math.log2(m_levels) / t_mod


def spectral_efficiency(m_levels: int, t_mod: float, w_eff: float) -> float:
    """log2(M)/(W T) [bit/s/Hz]"""
    if w_eff <= 0:
        raise ValueError(f"w_eff must be positive, got {w_eff}")
    return transmission_rate(m_levels, t_mod) / w_eff


def time_bandwidth_product(t_mod: float, w_eff: float) -> float:
    """c = W T"""
    if t_mod <= 0 or w_eff <= 0:
        raise ValueError(f"t_mod and w_eff must be positive, got t_mod={t_mod}, w_eff={w_eff}")
    return w_eff * t_mod


def mtb_rate_approximation(m_levels: int, t_dispersion_only: float) -> float:
    """
    M 値 MTB 方式のレート近似 log2(M)/T_DO。

    低エネルギーでは MTB パルスの時間幅が分散のみの通信路の値 T_DO に収束するため。
    """
    return transmission_rate(m_levels, t_dispersion_only)


def select_energy_levels(
    m_levels: int,
    curve_e: Sequence[float],
    curve_t: Sequence[float],
    e_grid: Sequence[float],
) -> Tuple[float, float]:
    """
    時間幅曲線 T(E) の上で、T = max_m T(E_m) を最小化する e_max を e_grid から選びます。

    曲線は線形補間し、非ゼロのすべてのレベルが曲線の範囲に入る e_max のみを候補とします。
    同じ T の候補では小さい e_max を選びます。

    Returns:
        (e_max, T)

    Raises:
        ValueError: 候補となる e_max が存在しない
    """
    _check_m(m_levels)
    e = np.asarray(curve_e, dtype=float)
    t = np.asarray(curve_t, dtype=float)
    if e.ndim != 1 or e.shape != t.shape or e.size < 1:
        raise ValueError("curve_e and curve_t must be one-dimensional and of equal, nonzero length")
    order = np.argsort(e, kind="stable")
    e, t = e[order], t[order]
    lo, hi = e[0] * (1 - 1e-12), e[-1] * (1 + 1e-12)

    best: Optional[Tuple[float, float]] = None
    for e_max in sorted(float(x) for x in e_grid):
        if e_max <= 0:
            continue
        levels = energy_levels(m_levels, e_max)[1:]
        if levels[0] < lo or levels[-1] > hi:
            continue
        t_mod = float(np.max(np.interp(levels, e, t)))
        if best is None or t_mod < best[1]:
            best = (e_max, t_mod)

    if best is None:
        raise ValueError(f"no e_max in the grid keeps all {m_levels} levels inside the curve [{e[0]:.4g}, {e[-1]:.4g}] J")
    logger.debug(f"M={m_levels}: selected e_max={best[0] / PJ:.3f} pJ, T={best[1] * 1e12:.2f} ps")
    return best


def energy_grid(e_upper: float, step: float) -> List[float]:
    """step 刻みで e_upper 以下のエネルギー格子 (step, 2 step, ...)"""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    n = int(math.floor(e_upper / step * (1 + 1e-12)))
    return [round(k * step / PJ, 9) * PJ for k in range(1, n + 1)]


def scheme_from_pulses(
    family: str,
    m_levels: int,
    e_max: float,
    pulses: Sequence[SampledSignal],
    tx_durations: Sequence[float],
    eps: float,
    fiber: FiberParams,
    ssfm: Optional[SsfmConfig] = None,
) -> EmScheme:
    """
    非ゼロレベルのパルスから EmScheme を構成します。

    受信時間幅と帯域幅は各パルスを伝搬して求め、T は全時間幅の最大値、
    W は送受信の実効帯域幅の最大値とします。
    """
    received = [received_magnitude(p, fiber, ssfm) for p in pulses]
    rx_durations = [effective_duration(r, eps) for r in received]
    tx_bandwidths = [effective_bandwidth(p, eps) for p in pulses]
    rx_bandwidths = [effective_bandwidth(r, eps) for r in received]
    t_mod = modulation_interval(tx_durations, rx_durations)
    w_eff = max(tx_bandwidths + rx_bandwidths)
    return EmScheme(
        family=family,
        m_levels=m_levels,
        e_max=e_max,
        energies=energy_levels(m_levels, e_max),
        pulses=list(pulses),
        tx_durations=list(tx_durations),
        rx_durations=rx_durations,
        tx_bandwidths=tx_bandwidths,
        rx_bandwidths=rx_bandwidths,
        t_mod=t_mod,
        w_eff=w_eff,
    )


def build_soliton_scheme(
    m_levels: int,
    e_max: float,
    eps: float,
    w_max: float,
    fiber: FiberParams,
    ssfm: Optional[SsfmConfig] = None,
    max_dt: float = DEFAULT_MAX_DT_S,
    window_factor: float = DEFAULT_WINDOW_FACTOR,
) -> EmScheme:
    """
    実効時間幅 T_s に打ち切ったソリトンによる M 値エネルギー変調方式。

    ソリトンの定数 (β2, γ) は fiber から取ります。送信時間幅は閉形式の T_s です。
    """
    if fiber.gamma <= 0:
        raise ValueError("the soliton scheme needs a nonlinear fiber (gamma > 0)")
    levels = energy_levels(m_levels, e_max)[1:]
    pulses: List[SampledSignal] = []
    tx_durations: List[float] = []
    for level_energy in levels:
        amplitude = soliton_amplitude_for_energy(float(level_energy), fiber.beta2, fiber.gamma)
        t_s = soliton_duration(amplitude, eps, fiber.beta2, fiber.gamma)
        grid = suggest_grid(t_s, w_max, fiber, max_dt, window_factor)
        pulses.append(truncated_soliton(float(level_energy), eps, grid, fiber.beta2, fiber.gamma))
        tx_durations.append(t_s)
    scheme = scheme_from_pulses(FAMILY_SOLITON, m_levels, e_max, pulses, tx_durations, eps, fiber, ssfm)
    logger.info(
        f"soliton {m_levels}-EM e_max={e_max / PJ:.3f} pJ ({fiber.kind}): T={scheme.t_mod * 1e12:.1f} ps, "
        f"R={scheme.rate / 1e9:.3f} Gbit/s"
    )
    return scheme


def _cached_design(designs: Dict[float, MtbResult], level_energy: float) -> Optional[MtbResult]:
    for e, result in designs.items():
        if math.isclose(e, level_energy, rel_tol=1e-9):
            return result
    return None


def build_mtb_scheme(
    m_levels: int,
    e_max: float,
    eps: float,
    w_max: float,
    fiber: FiberParams,
    ssfm: Optional[SsfmConfig] = None,
    optimizer: Optional[OptimizerConfig] = None,
    max_dt: float = DEFAULT_MAX_DT_S,
    window_factor: float = DEFAULT_WINDOW_FACTOR,
    jobs: int = 1,
    designs: Optional[Dict[float, MtbResult]] = None,
) -> EmScheme:
    """
    レベルごとに独立に求めた MTB パルスによる M 値エネルギー変調方式。

    designs にエネルギー [J] をキーとする既存の MtbResult があれば再利用します。
    送信時間幅は各パルスのサポート幅 t_star です。
    """
    known = dict(designs or {})
    levels = [float(e) for e in energy_levels(m_levels, e_max)[1:]]
    found = {e: cached for e in levels if (cached := _cached_design(known, e)) is not None}
    missing = [e for e in levels if e not in found]

    def design(level_energy: float) -> MtbResult:
        return find_mtb(level_energy, w_max, eps, fiber, ssfm, optimizer, max_dt, window_factor)

    if jobs > 1 and len(missing) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(design, missing))
    else:
        results = [design(e) for e in missing]
    found.update(zip(missing, results))

    pulses = [found[e].design.pulse for e in levels]
    tx_durations = [found[e].design.t_p for e in levels]
    scheme = scheme_from_pulses(FAMILY_MTB, m_levels, e_max, pulses, tx_durations, eps, fiber, ssfm)
    logger.info(
        f"MTB {m_levels}-EM e_max={e_max / PJ:.3f} pJ ({fiber.kind}): T={scheme.t_mod * 1e12:.1f} ps, "
        f"R={scheme.rate / 1e9:.3f} Gbit/s"
    )
    return scheme

"""
NLS 伝搬モジュール

対称 (Strang) 分割ステップフーリエ法で NLS 方程式

    ∂q/∂z = -(α/2) q - (iβ2/2) ∂²q/∂t² + iγ|q|²q

を積分します。分散と損失は周波数領域で厳密に、非線形位相は時間領域で適用します。
γ = 0 の場合は線形通信路として 1 ステップで厳密に伝搬します。
受信側の振幅検出とエネルギー再正規化 (雑音なし増幅器) もここで提供します。
"""

import time
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..pulse.metrics import central_fraction, effective_bandwidth_of, effective_duration_of, energy, energy_of
from ..pulse.models import SampledSignal, TimeGrid
from ..shared.constants import GRID_CENTRAL_FRACTION, KM_TO_M
from ..shared.errors import GridOverflowError, NonConvergenceError
from ..shared.logging import get_logger
from .models import FiberParams, SsfmConfig

logger = get_logger(__name__, scope="Channel")
perf_logger = get_logger(__name__ + ".perf", scope="PERF")


def _check_fits(field: np.ndarray, where: str) -> None:
    frac = central_fraction(field)
    worst = float(np.min(frac))
    if worst < GRID_CENTRAL_FRACTION:
        raise GridOverflowError(
            f"{where}: only {worst:.6f} of the energy lies in the central half of the window; enlarge the grid"
        )


def _linear_factor(omega: np.ndarray, fiber: FiberParams, h: float) -> np.ndarray:
    """長さ h [km] の分散+損失演算子 (周波数領域の乗算因子)"""
    return np.exp((0.5j * fiber.beta2_s2_per_km * omega**2 - 0.5 * fiber.alpha_linear) * h)


def _apply_linear(q: np.ndarray, omega: np.ndarray, fiber: FiberParams, h: float) -> np.ndarray:
    if h == 0:
        return q
    return np.fft.ifft(np.fft.fft(q, axis=-1) * _linear_factor(omega, fiber, h), axis=-1)


def _step_size(q: np.ndarray, fiber: FiberParams, cfg: SsfmConfig) -> float:
    peak = float(np.max(np.abs(q) ** 2))
    if peak <= 0:
        return cfg.max_dz
    return min(cfg.max_dz, cfg.max_nonlinear_phase_per_step / (fiber.gamma * peak))


def _integrate(
    field: np.ndarray, dt: float, fiber: FiberParams, cfg: SsfmConfig, stops: Sequence[float]
) -> Tuple[np.ndarray, List[np.ndarray], int]:
    """
    field (B, N) を z = 0 から stops[-1] まで伝搬し、各 stops での電界を返します。

    連続する線形半ステップは可換なので 1 回にまとめて適用します。
    """
    n = field.shape[-1]
    omega = 2 * np.pi * np.fft.fftfreq(n, dt)
    q = field.astype(np.complex128, copy=True)
    snapshots: List[np.ndarray] = []

    if fiber.is_linear:
        z = 0.0
        for stop in stops:
            q = _apply_linear(q, omega, fiber, stop - z)
            z = stop
            snapshots.append(q.copy())
        return q, snapshots, len(stops)

    z = 0.0
    pending = 0.0
    n_steps = 0
    for stop in stops:
        while stop - z > 1e-12 * max(stop, 1.0):
            h = min(_step_size(q, fiber, cfg), stop - z)
            q = _apply_linear(q, omega, fiber, pending + h / 2)
            q = q * np.exp(1j * fiber.gamma * np.abs(q) ** 2 * h)
            pending = h / 2
            z += h
            n_steps += 1
        q = _apply_linear(q, omega, fiber, pending)
        pending = 0.0
        z = stop
        snapshots.append(q.copy())
    return q, snapshots, n_steps


def _normalized_distance(a: np.ndarray, b: np.ndarray) -> float:
    ref = np.sqrt(np.sum(np.abs(b) ** 2))
    if ref == 0:
        return float(np.sqrt(np.sum(np.abs(a - b) ** 2)))
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2)) / ref)


def propagate_batch(
    field: np.ndarray,
    dt: float,
    fiber: FiberParams,
    cfg: Optional[SsfmConfig] = None,
    check_grid: bool = True,
) -> np.ndarray:
    """
    配列版の伝搬。field は (N,) または (B, N)。全行に共通のステップ幅を用います。
    check_grid=False は最適化の試行評価用で、窓溢れの検査を省略します。

    Raises:
        GridOverflowError: 入力または出力のエネルギーが窓の中央半分に収まらない
        NonConvergenceError: cfg.check_convergence 時にステップ半減で結果が安定しない
    """
    cfg = cfg or SsfmConfig()
    single = np.ndim(field) == 1
    q0 = np.atleast_2d(np.asarray(field))
    if check_grid:
        _check_fits(q0, "input")

    t0 = time.perf_counter()
    out, _, n_steps = _integrate(q0, dt, fiber, cfg, [fiber.length_km])

    if cfg.check_convergence and not fiber.is_linear:
        current = cfg
        for _ in range(current.max_refinements):
            current = current.refined()
            finer, _, n_steps = _integrate(q0, dt, fiber, current, [fiber.length_km])
            distance = _normalized_distance(out, finer)
            logger.debug(f"step-halving distance {distance:.3e} (steps={n_steps})")
            out = finer
            if distance <= cfg.convergence_tol:
                break
        else:
            raise NonConvergenceError(
                f"SSFM did not converge: step halving changed the output by {distance:.3e} > {cfg.convergence_tol:.1e}"
            )

    perf_logger.debug(
        f"propagate rows={q0.shape[0]} n={q0.shape[1]} steps={n_steps} took {time.perf_counter() - t0:.3f}s"
    )
    if check_grid:
        _check_fits(out, "output")
    return out[0] if single else out


def propagate(s: SampledSignal, fiber: FiberParams, cfg: Optional[SsfmConfig] = None) -> SampledSignal:
    """q(t, 0) = s から q(t, L) を計算します。"""
    return s.with_samples(propagate_batch(s.samples, s.grid.dt, fiber, cfg))


def received_magnitude(s: SampledSignal, fiber: FiberParams, cfg: Optional[SsfmConfig] = None) -> SampledSignal:
    """受信パルス |q(t, L)|"""
    return s.with_samples(np.abs(propagate_batch(s.samples, s.grid.dt, fiber, cfg)))


def amplify_to_energy(s: SampledSignal, target: float) -> SampledSignal:
    """
    エネルギーが target になるようにスカラー倍します (雑音なしの増幅器)。

    Raises:
        ValueError: エネルギー 0 の信号を非ゼロのエネルギーへ増幅しようとした
    """
    if target < 0:
        raise ValueError(f"target energy must be non-negative, got {target}")
    current = energy(s)
    if target == 0:
        return s.scaled(0.0)
    if current <= 0:
        raise ValueError("cannot amplify a zero-energy signal to a nonzero energy")
    return s.scaled(np.sqrt(target / current))


def propagate_snapshots(
    s: SampledSignal, fiber: FiberParams, cfg: Optional[SsfmConfig] = None, n_snapshots: int = 11
) -> Tuple[np.ndarray, np.ndarray]:
    """
    z = 0 から L まで等間隔の n_snapshots 点で電界を記録します。

    Returns:
        (z_km, fields): z_km の形状は (n_snapshots,)、fields は (n_snapshots, N)
    """
    if n_snapshots < 2:
        raise ValueError(f"n_snapshots must be >= 2, got {n_snapshots}")
    cfg = cfg or SsfmConfig()
    q0 = np.atleast_2d(s.samples)
    _check_fits(q0, "input")

    z_km = np.linspace(0.0, fiber.length_km, n_snapshots)
    _, snaps, _ = _integrate(q0, s.grid.dt, fiber, cfg, list(z_km[1:]))
    fields = np.vstack([q0] + snaps)
    _check_fits(fields[-1], "output")
    return z_km, fields


def profile_of(z_km: np.ndarray, fields: np.ndarray, dt: float, eps: float) -> pd.DataFrame:
    """記録済みの電界から距離ごとの実効時間幅・実効帯域幅・エネルギーを求めます。"""
    return pd.DataFrame(
        {
            "z_m": z_km * KM_TO_M,
            "duration_s": effective_duration_of(fields, dt, eps),
            "bandwidth_Hz": effective_bandwidth_of(fields, dt, eps),
            "energy_J": energy_of(fields, dt),
        }
    )


def duration_profile(
    s: SampledSignal, fiber: FiberParams, eps: float, cfg: Optional[SsfmConfig] = None, n_snapshots: int = 11
) -> pd.DataFrame:
    """伝搬途中の実効時間幅と実効帯域幅の推移 (通信路途中での孤立性の診断用)"""
    z_km, fields = propagate_snapshots(s, fiber, cfg, n_snapshots)
    return profile_of(z_km, fields, s.grid.dt, eps)


def dispersive_spread(fiber: FiberParams, bandwidth: float) -> float:
    """周波数 bandwidth [Hz] 成分の群遅延 2π|β2| L f [s]"""
    return 2 * np.pi * abs(fiber.beta2_s2_per_km) * fiber.length_km * bandwidth


def suggest_grid(
    max_duration: float, w_max: float, fiber: FiberParams, max_dt: float, window_factor: float = 8.0
) -> TimeGrid:
    """
    パルス幅 max_duration の伝搬に十分なグリッドを返します。

    窓幅は window_factor * max_duration 以上、かつ ±2W_max 成分の分散による広がりが
    窓の中央半分に収まる幅とします。
    """
    if max_duration <= 0:
        raise ValueError(f"max_duration must be positive, got {max_duration}")
    window = max(window_factor * max_duration, 2 * max_duration + 8 * dispersive_spread(fiber, w_max))
    return TimeGrid.covering(window, max_dt)

"""
MTB パルス最適化モジュール

送信時間幅 t_p を固定し、時間制限・エネルギー・帯域内エネルギーの制約の下で
受信実効時間幅を最小化する内側問題 (minimize_rx_duration) と、
T_rx*(t_p) = t_p となる固定点を二分法で求める外側探索 (find_mtb) を提供します。

係数は球面 Σa^2 = E 上で扱い (a = √E u/|u|)、帯域内制約はペナルティ
μ·(max(0, (1-eps) - inband)/eps)^2 として重みを段階的に増やします。
勾配は方向 u に関する中心差分で、全差分行を 1 回のバッチ伝搬で評価します。
探索は粗いグリッドと粗い SSFM ステップで行い、候補は設計グリッドで評価し直します。
"""

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from ..channel.models import FiberParams, SsfmConfig
from ..channel.propagator import duration_profile, propagate_batch
from ..pulse.basis import BasisSet, build_basis, project, synthesize_batch
from ..pulse.metrics import effective_bandwidth, effective_duration, effective_duration_of
from ..pulse.models import SampledSignal
from ..pulse.soliton import sech, soliton_amplitude_for_energy, soliton_duration, soliton_pulse
from ..shared.constants import (
    BRACKET_MAX_S,
    BRACKET_MIN_S,
    DEFAULT_MAX_DT_S,
    DEFAULT_WINDOW_FACTOR,
    FIXED_POINT_TOL_S,
    PS,
    log_ratio,
)
from ..shared.errors import BracketError, FixedPointError, InfeasibleDesignError, MonotonicityWarning
from ..shared.logging import get_logger
from .models import DesignProblem, DesignResult, MtbResult, OptimizerConfig, TraceRecord

logger = get_logger(__name__, scope="Design")
perf_logger = get_logger(__name__ + ".perf", scope="PERF")

BRACKET_GROWTH = 1.25
MONOTONICITY_SLACK_S = 0.5 * PS
MAX_BISECTIONS = 60
LBFGSB_MAX_ITER_EXCEEDED = 1
FEASIBILITY_MARGIN = 0.999


class _Evaluator:
    """
    係数ベクトルの一括評価器。

    最適化変数は単位球面上の方向 u で、係数は a = √E u/|u| です。
    評価したすべての行のうち実行可能 (inband >= 1-eps) なものの最良値を記録します。
    マルチスタートごとに 1 つ生成し、スレッド間で共有しません。
    """

    def __init__(self, problem: DesignProblem, basis: BasisSet, ssfm: SsfmConfig, start: int):
        self.problem = problem
        self.basis = basis
        self.ssfm = ssfm
        self.start = start
        self.sqrt_energy = math.sqrt(problem.energy)
        self.best_rx = math.inf
        self.best_coeffs: Optional[np.ndarray] = None
        self.n_evaluations = 0
        self.history: List[float] = []
        self.trace: List[TraceRecord] = []
        self._last: Dict[bytes, Tuple[float, float]] = {}

    def normalize(self, u: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(u)
        norms = np.linalg.norm(u, axis=1, keepdims=True)
        safe = np.where(norms > 0, norms, 1.0)
        a = self.sqrt_energy * u / safe
        if np.any(norms == 0):
            a[norms[:, 0] == 0] = 0.0
            a[norms[:, 0] == 0, 0] = self.sqrt_energy
        return a

    def evaluate(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """行ごとの (受信実効時間幅 [s], 帯域内エネルギー比) を返します。"""
        a = self.normalize(u)
        dt = self.basis.grid.dt
        pulses = synthesize_batch(self.basis, a)
        out = propagate_batch(pulses, dt, self.problem.fiber, self.ssfm, check_grid=False)
        rx = np.atleast_1d(effective_duration_of(out, dt, self.problem.eps))
        inband = (a**2 @ self.basis.lambdas) / np.sum(a**2, axis=1)
        self.n_evaluations += a.shape[0]

        feasible = inband >= 1.0 - self.problem.eps
        if np.any(feasible):
            idx = int(np.flatnonzero(feasible)[np.argmin(rx[feasible])])
            if rx[idx] < self.best_rx:
                self.best_rx = float(rx[idx])
                self.best_coeffs = a[idx].copy()
        return rx, inband

    def penalized(self, rx: np.ndarray, inband: np.ndarray, weight: float) -> np.ndarray:
        deficit = np.maximum(0.0, (1.0 - self.problem.eps) - inband) / self.problem.eps
        return rx / PS + weight * deficit**2

    def value(self, u: np.ndarray, weight: float) -> float:
        rx, inband = self.evaluate(u)
        f = float(self.penalized(rx, inband, weight)[0])
        self._remember(u, f, float(inband[0]))
        return f

    def value_and_grad(self, u: np.ndarray, weight: float) -> Tuple[float, np.ndarray]:
        n = u.size
        h = self.problem.optimizer.fd_step
        eye = np.eye(n) * h
        rows = np.vstack([u[None, :], u + eye, u - eye])
        rx, inband = self.evaluate(rows)
        f = self.penalized(rx, inband, weight)
        grad = (f[1 : n + 1] - f[n + 1 :]) / (2 * h)
        self._remember(u, float(f[0]), float(inband[0]))
        return float(f[0]), grad

    def _remember(self, u: np.ndarray, f: float, inband: float) -> None:
        if len(self._last) > 64:
            self._last.clear()
        self._last[np.asarray(u, dtype=float).tobytes()] = (f, inband)

    def record(self, stage: int, uk: np.ndarray, previous: np.ndarray) -> None:
        f, inband = self._last.get(np.asarray(uk, dtype=float).tobytes(), (math.nan, math.nan))
        self.history.append(f)
        self.trace.append(
            TraceRecord(
                start=self.start,
                stage=stage,
                iteration=len(self.history),
                objective=f,
                inband=inband,
                step_norm=float(np.linalg.norm(uk - previous)),
            )
        )
        logger.debug(f"start={self.start} stage={stage} iter={len(self.history)} f={f:.6f} inband={inband:.10f}")


def soliton_initialization(problem: DesignProblem, basis: BasisSet) -> np.ndarray:
    """
    エネルギー E のソリトンを窓 [-t_p/2, t_p/2] に打ち切り、基底へ射影した係数 (Σa^2 = E)。

    γ = 0 ではソリトンが定義されないため、実効時間幅が t_p となる sech を用います。
    """
    grid = basis.grid
    fiber = problem.fiber
    if fiber.gamma > 0:
        amplitude = soliton_amplitude_for_energy(problem.energy, fiber.beta2, fiber.gamma)
        shape = soliton_pulse(amplitude, grid, fiber.beta2, fiber.gamma).samples.real
    else:
        shape = sech(grid.t * log_ratio(problem.eps) / problem.t_p)
    shape = np.where(grid.support_mask(problem.t_p), shape, 0.0)

    coeffs = project(basis, SampledSignal(grid=grid, samples=shape))
    norm = float(np.linalg.norm(coeffs))
    if norm == 0:
        coeffs = np.zeros(basis.n_funcs)
        coeffs[0] = 1.0
        norm = 1.0
    return math.sqrt(problem.energy) * coeffs / norm


def restore_feasibility(coeffs: np.ndarray, lambdas: np.ndarray, energy: float, eps: float) -> np.ndarray:
    """
    帯域内制約を満たすように係数を最大集中方向 e_0 へ最小限寄せ、Σa^2 = E に正規化します。

    b = a + τ sign(a_0) e_0 の帯域内比は λ0 - (λ0 S - A)/D (S = Σa^2, A = Σλa^2,
    D = S + 2|a_0|τ + τ^2) なので、目標値に届く τ は閉じた形で求まります。
    すでに実行可能な係数は正規化だけ行います。
    """
    a = np.asarray(coeffs, dtype=float)
    target = 1.0 - FEASIBILITY_MARGIN * eps
    lambda0 = float(lambdas[0])
    s = float(np.sum(a**2))
    inband_sum = float(np.sum(lambdas * a**2))
    if s > 0 and inband_sum >= target * s:
        return math.sqrt(energy) * a / math.sqrt(s)

    head = np.zeros_like(a)
    head[0] = math.sqrt(energy)
    if s == 0 or lambda0 <= target:
        return head

    required = (lambda0 * s - inband_sum) / (lambda0 - target)
    tau = -abs(a[0]) + math.sqrt(a[0] ** 2 - s + required)
    b = a.copy()
    b[0] += math.copysign(tau, a[0])
    return math.sqrt(energy) * b / float(np.linalg.norm(b))


def _starting_points(u0: np.ndarray, cfg: OptimizerConfig) -> List[np.ndarray]:
    rng = np.random.default_rng(cfg.seed)
    starts = [u0]
    scale = cfg.perturbation * float(np.linalg.norm(u0))
    for _ in range(cfg.n_starts - 1):
        noise = rng.standard_normal(u0.size)
        starts.append(u0 + scale * noise / np.linalg.norm(noise))
    return starts


def _run_start(
    problem: DesignProblem, basis: BasisSet, ssfm: SsfmConfig, start: int, u0: np.ndarray
) -> Tuple[_Evaluator, bool]:
    """1 つの初期値からペナルティ重みを段階的に上げて最適化します。"""
    cfg = problem.optimizer
    evaluator = _Evaluator(problem, basis, ssfm, start)
    u = np.array(u0, dtype=float)
    converged = True

    for stage, weight in enumerate(cfg.penalty_weights):
        previous = [u.copy()]

        def callback(uk: np.ndarray, stage: int = stage, previous: List[np.ndarray] = previous) -> None:
            evaluator.record(stage, uk, previous[0])
            previous[0] = np.array(uk, copy=True)

        res = minimize(
            evaluator.value_and_grad,
            u,
            args=(weight,),
            jac=True,
            method="L-BFGS-B",
            callback=callback,
            options={"maxiter": cfg.max_iter},
        )
        if not res.success and res.status != LBFGSB_MAX_ITER_EXCEEDED:
            logger.warning(f"start={start} stage={stage}: L-BFGS-B stopped ({res.message}); falling back to Powell")
            res = minimize(
                evaluator.value,
                res.x,
                args=(weight,),
                method="Powell",
                callback=callback,
                options={"maxiter": cfg.max_iter, "xtol": 1e-6, "ftol": 1e-9},
            )
        converged = converged and bool(res.success)
        u = np.asarray(res.x, dtype=float)

    return evaluator, converged


def _inband(basis: BasisSet, coeffs: np.ndarray) -> float:
    return float(np.sum(basis.lambdas * coeffs**2) / np.sum(coeffs**2))


def minimize_rx_duration(problem: DesignProblem, jobs: int = 1) -> DesignResult:
    """
    固定した t_p に対し、受信実効時間幅を最小化するパルスを設計します。

    探索は search_grid 上の基底と search_ssfm で行い、各スタートの最良係数と最大集中ベクトルを
    design_grid 上の基底で合成し直して、問題の SSFM 設定で一括伝搬して最良のものを選びます。
    返す結果は常に実行可能 (時間制限・エネルギー・帯域内制約を満たす) で、
    受信実効時間幅は同じ窓に打ち切った同エネルギーのソリトン初期値 (実行可能な場合) 以下です。

    Raises:
        InfeasibleDesignError: 基底のどの方向も帯域内制約を満たさない
        GridOverflowError: 最終パルスの伝搬が窓に収まらない
    """
    t_start = time.perf_counter()
    cfg = problem.optimizer
    grid = problem.design_grid()
    search_grid = problem.search_grid()
    search_basis = build_basis(problem.t_p, problem.w_max, cfg.n_funcs, search_grid)
    basis = search_basis if search_grid == grid else build_basis(problem.t_p, problem.w_max, cfg.n_funcs, grid)

    lambda0 = float(basis.lambdas[0])
    if lambda0 < 1.0 - problem.eps:
        raise InfeasibleDesignError(
            f"t_p={problem.t_p / PS:.2f} ps: best in-band concentration {lambda0:.8f} < 1 - eps"
        )

    sqrt_energy = math.sqrt(problem.energy)
    search_ssfm = problem.search_ssfm()
    starts = _starting_points(soliton_initialization(problem, search_basis) / sqrt_energy, cfg)

    if jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(
                executor.map(lambda item: _run_start(problem, search_basis, search_ssfm, *item), enumerate(starts))
            )
    else:
        outcomes = [_run_start(problem, search_basis, search_ssfm, i, u) for i, u in enumerate(starts)]

    # 最大集中ベクトルは常に実行可能な予備候補
    head = np.zeros(basis.n_funcs)
    head[0] = sqrt_energy
    candidates = [
        (i, restore_feasibility(ev.best_coeffs, basis.lambdas, problem.energy, problem.eps))
        for i, (ev, _) in enumerate(outcomes)
        if ev.best_coeffs is not None
    ]
    candidates.append((len(outcomes), head))

    # 最終評価は設計グリッドと問題の SSFM 設定で行う
    x0 = soliton_initialization(problem, basis)
    baseline_feasible = _inband(basis, x0) >= 1.0 - problem.eps
    rows = [coeffs for _, coeffs in candidates] + ([x0] if baseline_feasible else [])
    pulses = synthesize_batch(basis, np.vstack(rows))
    received = propagate_batch(pulses, grid.dt, problem.fiber, problem.ssfm)
    rx = np.atleast_1d(effective_duration_of(received, grid.dt, problem.eps))

    best = int(np.argmin(rx[: len(candidates)]))
    winner, coeffs = candidates[best]
    row = best
    baseline_rx: Optional[float] = None
    if baseline_feasible:
        baseline_rx = float(rx[-1])
        if baseline_rx < rx[best]:
            coeffs, row = x0, len(rows) - 1
    rx_duration = float(rx[row])
    pulse = SampledSignal(grid=grid, samples=pulses[row])
    received_pulse = SampledSignal(grid=grid, samples=received[row])
    converged = outcomes[winner][1] if winner < len(outcomes) else False

    max_along: Optional[float] = None
    if cfg.along_channel_snapshots >= 2:
        profile = duration_profile(pulse, problem.fiber, problem.eps, problem.ssfm, cfg.along_channel_snapshots)
        max_along = float(profile["duration_s"].max())

    evaluators = [ev for ev, _ in outcomes]
    n_evaluations = sum(ev.n_evaluations for ev in evaluators) + len(rows)
    trace = [record for ev in evaluators for record in ev.trace]
    history = list(evaluators[winner].history) if winner < len(evaluators) else []
    perf_logger.debug(
        f"minimize_rx_duration t_p={problem.t_p / PS:.2f} ps evaluations={n_evaluations} "
        f"took {time.perf_counter() - t_start:.2f}s"
    )
    logger.debug(f"t_p={problem.t_p / PS:.3f} ps -> rx={rx_duration / PS:.3f} ps (start {winner})")

    return DesignResult(
        energy=problem.energy,
        t_p=problem.t_p,
        coeffs=coeffs,
        pulse=pulse,
        rx_duration=rx_duration,
        tx_duration_check=effective_duration(pulse, problem.eps),
        tx_bandwidth=effective_bandwidth(pulse, problem.eps),
        rx_bandwidth=effective_bandwidth(received_pulse, problem.eps),
        inband=_inband(basis, coeffs),
        converged=converged,
        baseline_rx_duration=baseline_rx,
        max_duration_along_channel=max_along,
        n_evaluations=n_evaluations,
        objective_history=history,
        trace=trace,
    )


def initial_duration(energy: float, eps: float, fiber: FiberParams) -> float:
    """
    固定点探索の初期 t_p。

    γ > 0 では同エネルギーのソリトンの実効時間幅、γ = 0 では分散長に対応する 2π√(|β2|L)。
    """
    if fiber.gamma > 0:
        amplitude = soliton_amplitude_for_energy(energy, fiber.beta2, fiber.gamma)
        t0 = soliton_duration(amplitude, eps, fiber.beta2, fiber.gamma)
    else:
        t0 = 2 * math.pi * math.sqrt(abs(fiber.beta2_s2_per_km) * fiber.length_km)
    return min(max(t0, BRACKET_MIN_S), BRACKET_MAX_S)


class _FixedPointSearch:
    """外側写像 t_p -> T_rx*(t_p) の評価履歴と単調性診断"""

    def __init__(self, make_problem, jobs: int):
        self.make_problem = make_problem
        self.jobs = jobs
        self.history: List[Tuple[float, float]] = []
        self.results: Dict[float, DesignResult] = {}
        self.diagnostics: List[str] = []

    def gap(self, t_p: float) -> float:
        if t_p not in self.results:
            result = minimize_rx_duration(self.make_problem(t_p), self.jobs)
            self._check_monotone(t_p, result.rx_duration)
            self.results[t_p] = result
            self.history.append((t_p, result.rx_duration))
            logger.info(f"t_p={t_p / PS:.2f} ps -> T_rx*={result.rx_duration / PS:.2f} ps")
        return self.results[t_p].rx_duration - t_p

    def _check_monotone(self, t_p: float, rx: float) -> None:
        for t_prev, rx_prev in self.history:
            shorter_but_smaller = t_prev < t_p and rx_prev < rx - MONOTONICITY_SLACK_S
            longer_but_larger = t_prev > t_p and rx_prev > rx + MONOTONICITY_SLACK_S
            if shorter_but_smaller or longer_but_larger:
                message = (
                    f"non-monotone outer map: T_rx*({t_prev / PS:.2f} ps)={rx_prev / PS:.2f} ps vs "
                    f"T_rx*({t_p / PS:.2f} ps)={rx / PS:.2f} ps"
                )
                self.diagnostics.append(message)
                logger.warning(message)
                warnings.warn(message, MonotonicityWarning, stacklevel=3)

    def done(self, energy: float, t_star: float, bracket: Tuple[float, float]) -> MtbResult:
        return MtbResult(
            energy=energy,
            t_star=t_star,
            design=self.results[t_star],
            history=list(self.history),
            bracket=bracket,
            diagnostics=list(self.diagnostics),
        )


def find_mtb(
    energy: float,
    w_max: float,
    eps: float,
    fiber: FiberParams,
    ssfm: Optional[SsfmConfig] = None,
    optimizer: Optional[OptimizerConfig] = None,
    max_dt: float = DEFAULT_MAX_DT_S,
    window_factor: float = DEFAULT_WINDOW_FACTOR,
    jobs: int = 1,
    tol: float = FIXED_POINT_TOL_S,
) -> MtbResult:
    """
    T_rx*(t_p) = t_p となる MTB パルスを求めます。

    初期値から幾何級数的 (×1.25) にブラケットを広げ、g(t_p) = T_rx*(t_p) - t_p の符号が
    変わる区間を二分法で |g| <= tol まで縮めます。

    Raises:
        BracketError: [50 ps, 5000 ps] 内で符号変化が見つからない
        FixedPointError: 二分法が許容誤差内に到達しない
        InfeasibleDesignError: 内側問題が実行不可能
    """
    ssfm = ssfm or SsfmConfig()
    optimizer = optimizer or OptimizerConfig()

    def make_problem(t_p: float) -> DesignProblem:
        return DesignProblem(
            energy=energy,
            t_p=t_p,
            w_max=w_max,
            eps=eps,
            fiber=fiber,
            ssfm=ssfm,
            optimizer=optimizer,
            max_dt=max_dt,
            window_factor=window_factor,
        )

    search = _FixedPointSearch(make_problem, jobs)
    t0 = initial_duration(energy, eps, fiber)
    logger.info(f"find_mtb E={energy / 1e-12:.3f} pJ fiber={fiber.kind}: starting at {t0 / PS:.2f} ps")

    gap0 = search.gap(t0)
    if abs(gap0) <= tol:
        return search.done(energy, t0, (t0, t0))

    # ブラケット探索: lo は g > 0 (受信側が長い)、hi は g < 0
    if gap0 > 0:
        lo, hi = t0, None
        t = t0
        while hi is None:
            t = t * BRACKET_GROWTH
            if t > BRACKET_MAX_S:
                raise BracketError(f"no fixed point below {BRACKET_MAX_S / PS:.0f} ps (last g > 0 at {lo / PS:.2f} ps)")
            gap = search.gap(t)
            if abs(gap) <= tol:
                return search.done(energy, t, (lo, t))
            if gap < 0:
                hi = t
            else:
                lo = t
    else:
        lo, hi = None, t0
        t = t0
        while lo is None:
            t = t / BRACKET_GROWTH
            if t < BRACKET_MIN_S:
                raise BracketError(f"no fixed point above {BRACKET_MIN_S / PS:.0f} ps (last g < 0 at {hi / PS:.2f} ps)")
            gap = search.gap(t)
            if abs(gap) <= tol:
                return search.done(energy, t, (t, hi))
            if gap > 0:
                lo = t
            else:
                hi = t

    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        gap = search.gap(mid)
        if abs(gap) <= tol:
            logger.info(f"fixed point T*={mid / PS:.2f} ps after {len(search.history)} evaluations")
            return search.done(energy, mid, (lo, hi))
        if gap > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-3 * tol:
            break

    raise FixedPointError(
        f"bisection stalled in [{lo / PS:.4f}, {hi / PS:.4f}] ps without |T_rx* - t_p| <= {tol / PS:.2f} ps"
    )

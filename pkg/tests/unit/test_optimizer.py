"""
MTB パルス最適化 (design.optimizer) のユニットテスト

内側問題は分散のみの通信路 (1 回の FFT で伝搬できる) で実際に解き、
外側の固定点探索は内側問題をモックして検証します。
"""

import math
import unittest
from unittest.mock import patch

import numpy as np
import pytest
from pydantic import ValidationError

from mtb_designer.channel.models import FiberParams, SsfmConfig
from mtb_designer.design.models import DesignProblem, DesignResult, OptimizerConfig
from mtb_designer.design.optimizer import (
    find_mtb,
    initial_duration,
    minimize_rx_duration,
    restore_feasibility,
    soliton_initialization,
)
from mtb_designer.pulse.basis import build_basis
from mtb_designer.pulse.metrics import energy, support_width
from mtb_designer.pulse.models import SampledSignal, TimeGrid
from mtb_designer.pulse.soliton import soliton_amplitude_for_energy, soliton_duration
from mtb_designer.shared.errors import (
    BasisError,
    BracketError,
    FixedPointError,
    InfeasibleDesignError,
    MonotonicityWarning,
)

PS = 1e-12
PJ = 1e-12
EPS = 1e-4
W_MAX = 50e9

DISPERSION_ONLY = FiberParams(beta2=-21.7, gamma=0.0, length_km=80.0)
LOSSLESS = FiberParams(beta2=-21.7, gamma=1.2, length_km=80.0)
FAST = OptimizerConfig(n_starts=2, max_iter=15, penalty_weights=[1e1, 1e3])


def problem(t_p: float = 100 * PS, optimizer: OptimizerConfig = FAST, fiber: FiberParams = DISPERSION_ONLY):
    return DesignProblem(energy=1 * PJ, t_p=t_p, w_max=W_MAX, eps=EPS, fiber=fiber, optimizer=optimizer)


def fake_design(t_p: float, rx: float) -> DesignResult:
    grid = TimeGrid(n_samples=2, dt=1 * PS)
    return DesignResult(
        energy=1 * PJ,
        t_p=t_p,
        coeffs=[1.0],
        pulse=SampledSignal.zeros(grid),
        rx_duration=rx,
        tx_duration_check=t_p,
        tx_bandwidth=W_MAX,
        rx_bandwidth=W_MAX,
        inband=1.0,
        converged=True,
    )


def patched_inner(rx_of):
    """t_p -> T_rx* を与える関数で内側問題を置き換えます。"""
    return patch(
        "mtb_designer.design.optimizer.minimize_rx_duration",
        side_effect=lambda p, jobs: fake_design(p.t_p, rx_of(p.t_p)),
    )


class TestOptimizerConfig(unittest.TestCase):
    """OptimizerConfig と DesignProblem のテストケース"""

    def test_penalty_weights_must_increase(self):
        """ペナルティ重みは正で非減少"""
        with pytest.raises(ValidationError):
            OptimizerConfig(penalty_weights=[1e3, 1e1])
        with pytest.raises(ValidationError):
            OptimizerConfig(penalty_weights=[0.0])
        with pytest.raises(ValidationError):
            OptimizerConfig(penalty_weights=[])

    def test_unknown_keys_rejected(self):
        """未知のキーは拒否"""
        with pytest.raises(ValidationError):
            OptimizerConfig(bogus=1)

    def test_design_grid_covers_support_with_odd_cells(self):
        """設計グリッドはサポート t_p をちょうど奇数個のセルで覆う"""
        grid = problem(t_p=100 * PS).design_grid()
        cells = 100 * PS / grid.dt

        assert math.isclose(cells, round(cells), rel_tol=1e-9)
        assert round(cells) % 2 == 1
        assert grid.dt <= 2.5 * PS

    def test_search_grid_is_coarser_with_odd_cells(self):
        """探索グリッドは設計グリッドより粗く、やはりサポートを奇数個のセルで覆う"""
        p = problem(t_p=100 * PS, optimizer=OptimizerConfig())
        search, design = p.search_grid(), p.design_grid()
        cells = 100 * PS / search.dt

        assert search.dt > design.dt
        assert search.dt <= OptimizerConfig().search_max_dt_s
        assert math.isclose(cells, round(cells), rel_tol=1e-9)
        assert round(cells) % 2 == 1

    def test_search_never_finer_than_design(self):
        """search_max_dt_ps が設計刻みより細かければ探索も設計グリッドで行う"""
        p = problem(optimizer=OptimizerConfig(search_max_dt_ps=0.1))

        assert p.search_grid() == p.design_grid()

    def test_search_ssfm_is_coarser(self):
        """探索用 SSFM 設定はステップ上限が大きく、収束検査を行わない"""
        p = DesignProblem(
            energy=1 * PJ,
            t_p=100 * PS,
            w_max=W_MAX,
            eps=EPS,
            fiber=LOSSLESS,
            ssfm=SsfmConfig(check_convergence=True),
        )
        cfg = p.search_ssfm()

        assert cfg.max_nonlinear_phase_per_step == OptimizerConfig().search_nonlinear_phase
        assert cfg.max_dz == OptimizerConfig().search_max_dz
        assert cfg.check_convergence is False
        assert p.ssfm.check_convergence is True


class TestRestoreFeasibility(unittest.TestCase):
    """restore_feasibility のテストケース"""

    def setUp(self):
        self.lambdas = np.array([1 - 1e-7, 1 - 1e-5, 0.999, 0.9, 0.5])

    def test_infeasible_coefficients_reach_the_band(self):
        """帯域外へ漏れた係数は e_0 方向へ寄せられて帯域内制約とエネルギーを満たす"""
        a = np.array([0.3, -0.2, 0.5, 0.4, 0.1])

        b = restore_feasibility(a, self.lambdas, 2 * PJ, EPS)
        inband = float(np.sum(self.lambdas * b**2) / np.sum(b**2))

        assert inband >= 1 - EPS
        assert math.isclose(float(np.sum(b**2)), 2 * PJ, rel_tol=1e-12)
        assert np.allclose(b[1:] / np.linalg.norm(b[1:]), a[1:] / np.linalg.norm(a[1:]))
        assert b[0] > 0

    def test_feasible_coefficients_keep_their_direction(self):
        """実行可能な係数は正規化されるだけ"""
        a = np.array([-3.0, 0.01, 0.0, 0.0, 0.0])

        b = restore_feasibility(a, self.lambdas, 1 * PJ, EPS)

        assert np.allclose(b, math.sqrt(1 * PJ) * a / np.linalg.norm(a))

    def test_zero_coefficients(self):
        """ゼロベクトルは最大集中ベクトルになる"""
        b = restore_feasibility(np.zeros(5), self.lambdas, 1 * PJ, EPS)

        assert np.allclose(b, [math.sqrt(1 * PJ), 0, 0, 0, 0])


class TestMinimizeRxDuration(unittest.TestCase):
    """内側問題 minimize_rx_duration のテストケース (分散のみの通信路)"""

    @classmethod
    def setUpClass(cls):
        cls.problem = problem()
        cls.result = minimize_rx_duration(cls.problem)

    def test_result_is_feasible(self):
        """結果は帯域内制約・エネルギー・時間制限を満たす"""
        r = self.result

        assert r.inband >= 1 - EPS - 1e-12
        assert math.isclose(energy(r.pulse), 1 * PJ, rel_tol=1e-9)
        assert support_width(r.pulse) <= self.problem.t_p * (1 + 1e-9)
        assert math.isclose(float(np.sum(r.coeffs**2)), 1 * PJ, rel_tol=1e-9)

    def test_never_worse_than_soliton_initialization(self):
        """受信時間幅は初期値 (打ち切ったソリトン形状) 以下"""
        r = self.result

        if r.baseline_rx_duration is not None:
            assert r.rx_duration <= r.baseline_rx_duration

    def test_records_history(self):
        """評価回数と反復の記録が残る"""
        r = self.result

        assert r.n_evaluations > 0
        assert all(rec.stage in (0, 1) for rec in r.trace)
        assert r.rx_duration > 0
        assert r.modulation_interval == max(r.t_p, r.rx_duration)

    def test_deterministic(self):
        """同じ問題と乱数シードからは同じ係数が得られる"""
        again = minimize_rx_duration(self.problem)

        assert np.array_equal(again.coeffs, self.result.coeffs)
        assert again.rx_duration == self.result.rx_duration

    def test_parallel_starts_match_serial(self):
        """マルチスタートの並列実行は逐次実行と同じ結果を返す"""
        parallel = minimize_rx_duration(self.problem, jobs=2)

        assert parallel.rx_duration == self.result.rx_duration

    def test_final_pulse_lives_on_design_grid(self):
        """探索は粗いグリッドで行っても、返すパルスは設計グリッド上にある"""
        assert self.result.pulse.grid == self.problem.design_grid()
        assert self.result.pulse.grid != self.problem.search_grid()

    def test_soliton_initialization_has_design_energy(self):
        """初期値の係数は Σa^2 = E を満たす"""
        p = problem(fiber=LOSSLESS)
        basis = build_basis(p.t_p, p.w_max, None, p.design_grid())

        x0 = soliton_initialization(p, basis)

        assert math.isclose(float(np.sum(x0**2)), p.energy, rel_tol=1e-12)

    def test_infeasible_support(self):
        """サポートが短すぎて帯域内制約を満たせなければ InfeasibleDesignError"""
        tiny = problem(t_p=10 * PS, optimizer=OptimizerConfig(n_funcs=3))

        with pytest.raises(InfeasibleDesignError):
            minimize_rx_duration(tiny)

    def test_too_many_functions(self):
        """基底関数がサポートのサンプル数より多ければ BasisError"""
        with pytest.raises(BasisError):
            minimize_rx_duration(problem(t_p=10 * PS, optimizer=OptimizerConfig(n_funcs=50)))


class TestScaleInvariance(unittest.TestCase):
    """分散のみの通信路では最適な係数の方向がエネルギーに依存しない"""

    def test_coefficient_direction_is_energy_independent(self):
        """E = 0.5 pJ と 2 pJ の最適係数のコサイン類似度は 1 - 1e-6 以上"""
        cfg = OptimizerConfig(n_starts=2, max_iter=5, penalty_weights=[1e1, 1e3])
        results = [
            minimize_rx_duration(
                DesignProblem(energy=e, t_p=300 * PS, w_max=W_MAX, eps=EPS, fiber=DISPERSION_ONLY, optimizer=cfg)
            )
            for e in (0.5 * PJ, 2 * PJ)
        ]
        a, b = (r.coeffs for r in results)

        cosine = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))

        assert cosine >= 1 - 1e-6
        assert math.isclose(results[0].rx_duration, results[1].rx_duration, rel_tol=1e-6)


class TestInitialDuration(unittest.TestCase):
    """固定点探索の初期値のテストケース"""

    def test_dispersion_only_start(self):
        """γ = 0 では 2π√(|β2|L)"""
        expected = 2 * math.pi * math.sqrt(21.7e-24 * 80)

        assert math.isclose(initial_duration(1 * PJ, EPS, DISPERSION_ONLY), expected, rel_tol=1e-12)

    def test_soliton_start(self):
        """γ > 0 では同エネルギーのソリトンの実効時間幅"""
        expected = soliton_duration(soliton_amplitude_for_energy(1 * PJ), EPS)

        assert math.isclose(initial_duration(1 * PJ, EPS, LOSSLESS), expected, rel_tol=1e-12)

    def test_clamped_to_bracket_range(self):
        """初期値は [50 ps, 5000 ps] に制限される"""
        assert initial_duration(1e-18, EPS, LOSSLESS) == 5000 * PS


class TestFindMtb(unittest.TestCase):
    """外側の固定点探索のテストケース (内側問題はモック)"""

    def test_converges_to_fixed_point(self):
        """T_rx*(t_p) = 600 ps - t_p/2 の固定点 400 ps を 1 ps 以内で求める"""
        with patched_inner(lambda t: 600 * PS - 0.5 * t):
            result = find_mtb(1 * PJ, W_MAX, EPS, DISPERSION_ONLY)

        assert abs(result.design.rx_duration - result.t_star) <= 1 * PS
        assert abs(result.t_star - 400 * PS) <= 1 * PS
        assert result.bracket[0] <= result.t_star <= result.bracket[1]
        assert result.history[0][0] == initial_duration(1 * PJ, EPS, DISPERSION_ONLY)
        assert result.diagnostics == []

    def test_shrinking_bracket(self):
        """初期値で受信側が短ければブラケットを縮めて探索する"""
        with patched_inner(lambda t: 300 * PS - t):
            result = find_mtb(1 * PJ, W_MAX, EPS, DISPERSION_ONLY)

        assert abs(result.t_star - 150 * PS) <= 0.5 * PS + 1e-15
        assert result.t_star < initial_duration(1 * PJ, EPS, DISPERSION_ONLY)

    def test_no_fixed_point_in_range(self):
        """[50 ps, 5000 ps] に固定点がなければ BracketError"""
        with patched_inner(lambda t: 6000 * PS), pytest.raises(BracketError):
            find_mtb(1 * PJ, W_MAX, EPS, DISPERSION_ONLY)

    def test_bisection_stall(self):
        """不連続な写像で |g| <= tol に到達しなければ FixedPointError"""
        with patched_inner(lambda t: 450 * PS if t < 400 * PS else 350 * PS), pytest.raises(FixedPointError):
            find_mtb(1 * PJ, W_MAX, EPS, DISPERSION_ONLY)

    def test_monotonicity_violation_is_reported(self):
        """外側写像が増加すると MonotonicityWarning を出し、診断に記録して探索を続ける"""
        with patched_inner(lambda t: 100 * PS + 0.9 * t), pytest.warns(MonotonicityWarning):
            result = find_mtb(1 * PJ, W_MAX, EPS, DISPERSION_ONLY)

        assert result.diagnostics
        assert abs(result.design.rx_duration - result.t_star) <= 1 * PS


@pytest.mark.slow
class TestFindMtbDispersionOnly(unittest.TestCase):
    """分散のみの通信路での実際の固定点探索"""

    def test_fixed_point(self):
        """固定点の受信時間幅は送信時間幅と 1 ps 以内で一致する"""
        result = find_mtb(1 * PJ, W_MAX, EPS, DISPERSION_ONLY, optimizer=FAST)

        assert abs(result.design.rx_duration - result.t_star) <= 1 * PS
        assert 50 * PS <= result.t_star <= 5000 * PS
        assert result.design.inband >= 1 - EPS - 1e-12

"""
設定管理モジュール

実験設定ファイル (JSON) を読み込み、pydantic モデル (RunConfig) として検証します。
未知のキーは拒否し、エラーは行番号付きの ConfigError として報告します。
設定は実務単位 (pJ, GHz, ps, ps^2/km, 1/(W km), dB/km, km) で記述し、
取り込み時に SI 単位へ換算します。
"""

import json
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..channel.models import FiberParams, SsfmConfig
from ..design.models import OptimizerConfig
from .constants import (
    DEFAULT_BETA2_PS2_PER_KM,
    DEFAULT_EPS,
    DEFAULT_GAMMA_PER_W_KM,
    DEFAULT_LENGTH_KM,
    DEFAULT_MAX_DT_S,
    DEFAULT_W_MAX_HZ,
    DEFAULT_WINDOW_FACTOR,
    FIBER_DISPERSION_ONLY,
    FIBER_LOSSLESS,
    FIBER_LOSSY,
    GHZ,
    LOSSY_ALPHA_DB_PER_KM,
    PJ,
    PS,
    is_power_of_two,
)
from .errors import ConfigError
from .logging import get_logger

logger = get_logger(__name__, scope="Config")

PRESET_DIR = os.path.join(os.path.dirname(__file__), "..", "data", "presets")
DEFAULT_PRESET_PATH = os.path.join(PRESET_DIR, "default.json")

_STRICT = ConfigDict(extra="forbid")


class FiberConfig(BaseModel):
    """実務単位で記述されたファイバパラメータ"""

    alpha_db_per_km: float = Field(default=0.0, ge=0.0)
    beta2_ps2_per_km: float = DEFAULT_BETA2_PS2_PER_KM
    gamma_per_w_km: float = Field(default=DEFAULT_GAMMA_PER_W_KM, ge=0.0)
    length_km: float = Field(default=DEFAULT_LENGTH_KM, gt=0.0)
    model_config = _STRICT

    def to_fiber_params(self) -> FiberParams:
        return FiberParams(
            alpha_db_per_km=self.alpha_db_per_km,
            beta2=self.beta2_ps2_per_km,
            gamma=self.gamma_per_w_km,
            length_km=self.length_km,
        )


def default_fibers() -> Dict[str, FiberConfig]:
    return {
        FIBER_DISPERSION_ONLY: FiberConfig(gamma_per_w_km=0.0),
        FIBER_LOSSLESS: FiberConfig(),
        FIBER_LOSSY: FiberConfig(alpha_db_per_km=LOSSY_ALPHA_DB_PER_KM),
    }


class GridConfig(BaseModel):
    max_dt_ps: float = Field(default=DEFAULT_MAX_DT_S / PS, gt=0.0)
    window_factor: float = Field(default=DEFAULT_WINDOW_FACTOR, ge=2.0)
    model_config = _STRICT

    @property
    def max_dt_s(self) -> float:
        return self.max_dt_ps * PS


def _check_m_levels(levels: List[int]) -> List[int]:
    for m in levels:
        if m < 2 or not is_power_of_two(m):
            raise ValueError(f"M must be a power of two >= 2, got {m}")
    return levels


def _check_energies(energies: List[float]) -> List[float]:
    for e in energies:
        if e <= 0:
            raise ValueError(f"energies must be positive, got {e}")
    return energies


def _default_sweep_energies() -> List[float]:
    return [round(0.1 * k, 1) for k in range(1, 19)]


class SolitonSweepConfig(BaseModel):
    energies_pj: List[float] = Field(default_factory=_default_sweep_energies)
    fibers: List[str] = Field(default_factory=lambda: [FIBER_LOSSLESS, FIBER_LOSSY])
    model_config = _STRICT

    @field_validator("energies_pj")
    @classmethod
    def check_energies(cls, v: List[float]) -> List[float]:
        return _check_energies(v)


class MtbDesignConfig(BaseModel):
    energies_pj: List[float] = Field(default_factory=lambda: [1.0])
    fibers: List[str] = Field(default_factory=lambda: [FIBER_DISPERSION_ONLY])
    write_waveforms: bool = True
    model_config = _STRICT

    @field_validator("energies_pj")
    @classmethod
    def check_energies(cls, v: List[float]) -> List[float]:
        return _check_energies(v)


class EmEvaluateConfig(BaseModel):
    m_levels: List[int] = Field(default_factory=lambda: [2, 4])
    fibers: List[str] = Field(default_factory=lambda: [FIBER_LOSSLESS, FIBER_LOSSY])
    schemes: List[str] = Field(default_factory=lambda: ["soliton", "mtb"])
    n_symbols: int = Field(default=256, ge=1)
    energy_grid_step_pj: float = Field(default=0.1, gt=0.0)
    soliton_energies_pj: List[float] = Field(default_factory=_default_sweep_energies)
    mtb_energies_pj: List[float] = Field(default_factory=lambda: [0.2, 0.5, 0.8, 1.2, 1.5, 1.8])
    model_config = _STRICT

    @field_validator("m_levels")
    @classmethod
    def check_levels(cls, v: List[int]) -> List[int]:
        return _check_m_levels(v)

    @field_validator("schemes")
    @classmethod
    def check_schemes(cls, v: List[str]) -> List[str]:
        unknown = set(v) - {"soliton", "mtb"}
        if unknown:
            raise ValueError(f"unknown pulse families: {sorted(unknown)}")
        return v

    @field_validator("soliton_energies_pj", "mtb_energies_pj")
    @classmethod
    def check_energies(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("at least one energy is required")
        return _check_energies(v)


class PropagateConfig(BaseModel):
    fiber: str = FIBER_LOSSLESS
    n_snapshots: int = Field(default=41, ge=2)
    model_config = _STRICT


class BoundConfig(BaseModel):
    m_levels: List[int] = Field(default_factory=lambda: [2, 4, 8, 16])
    model_config = _STRICT

    @field_validator("m_levels")
    @classmethod
    def check_levels(cls, v: List[int]) -> List[int]:
        return _check_m_levels(v)


class RunConfig(BaseModel):
    fibers: Dict[str, FiberConfig] = Field(default_factory=default_fibers)
    eps: float = Field(default=DEFAULT_EPS, gt=0.0, lt=1.0)
    w_max_ghz: float = Field(default=DEFAULT_W_MAX_HZ / GHZ, gt=0.0)
    grid: GridConfig = Field(default_factory=GridConfig)
    ssfm: SsfmConfig = Field(default_factory=SsfmConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    output_dir: str = "results"
    jobs: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    soliton_sweep: SolitonSweepConfig = Field(default_factory=SolitonSweepConfig)
    mtb_design: MtbDesignConfig = Field(default_factory=MtbDesignConfig)
    em_evaluate: EmEvaluateConfig = Field(default_factory=EmEvaluateConfig)
    propagate: PropagateConfig = Field(default_factory=PropagateConfig)
    bound: BoundConfig = Field(default_factory=BoundConfig)
    model_config = _STRICT

    @model_validator(mode="after")
    def check_fiber_references(self) -> "RunConfig":
        referenced = (
            list(self.soliton_sweep.fibers)
            + list(self.mtb_design.fibers)
            + list(self.em_evaluate.fibers)
            + [self.propagate.fiber]
        )
        missing = sorted({name for name in referenced if name not in self.fibers})
        if missing:
            raise ValueError(f"unknown fiber names referenced: {missing}")
        return self

    @property
    def w_max_hz(self) -> float:
        return self.w_max_ghz * GHZ

    def fiber(self, name: str) -> FiberParams:
        if name not in self.fibers:
            raise KeyError(f"fiber '{name}' is not defined (available: {sorted(self.fibers)})")
        return self.fibers[name].to_fiber_params()


def energies_j(energies_pj: Sequence[float]) -> List[float]:
    """pJ のリストを J に換算します。"""
    return [e * PJ for e in energies_pj]


def _locate_line(text: str, loc: Tuple[Any, ...]) -> Optional[int]:
    """検証エラーの位置 (キーの列) から、該当キーが現れる行番号を推定します。"""
    pos = 0
    found = None
    for key in loc:
        if not isinstance(key, str):
            continue
        idx = text.find(f'"{key}"', pos)
        if idx < 0:
            break
        found = idx
        pos = idx + 1
    if found is None:
        return None
    return text.count("\n", 0, found) + 1


def parse_run_config(text: str, path: Optional[str] = None) -> RunConfig:
    """JSON 文字列を RunConfig に変換します。"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", path=path, line=e.lineno) from None

    if not isinstance(data, dict):
        raise ConfigError("top-level value must be an object", path=path, line=1)

    try:
        return RunConfig(**data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(first.get("loc", ()))
        dotted = ".".join(str(k) for k in loc) or "<root>"
        raise ConfigError(f"{dotted}: {first.get('msg')}", path=path, line=_locate_line(text, loc)) from None


def load_run_config(path: Optional[str] = None) -> RunConfig:
    """
    設定ファイルを読み込みます。パスが指定されない場合は同梱のプリセットを使用します。
    """
    config_path = path or DEFAULT_PRESET_PATH
    if not os.path.exists(config_path):
        raise ConfigError("config file not found", path=config_path)

    with open(config_path, encoding="utf-8") as f:
        text = f.read()

    config = parse_run_config(text, path=config_path)
    logger.debug(f"Loaded config from {config_path}")
    return config

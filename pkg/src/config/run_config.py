"""Run configuration: a TOML document with nested sections, overridden by CLI flags.

    [array]
    size = 16
    metal = "M5"

    [sweep]
    sizes = [4, 8, 16]
"""
import logging
import sys

MIN_PYTHON = (3, 11)
if sys.version_info < MIN_PYTHON:
    raise ImportError(f"sneakpath needs Python {MIN_PYTHON[0]}.{MIN_PYTHON[1]} or later for tomllib")

import tomllib  # noqa: E402
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.config.sim_config import (
    DEFAULT_ALPHA,
    DEFAULT_K_OFF,
    DEFAULT_K_ON,
    DEFAULT_K_ON_VALUES,
    DEFAULT_R_GROUND,
    DEFAULT_R_LOAD,
    DEFAULT_SIZES,
    DEFAULT_V_DD_VALUES,
    K_ON_BOUNDS,
    SIZE_BOUNDS,
    SOURCE_STEPS,
    V_DD_BOUNDS,
    settings,
)
from src.crossbar.topology import CrossbarSpec, MeasurementMode, Metal, PatternKind, Strategy, crossbar_spec
from src.device.memristor import DeviceParams
from src.pipeline.reference_data import REFERENCE_POINTS
from src.solver.dc_solver import Damping, SolveOptions
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)


class Backend(str, Enum):
    SIMULATOR = "simulator"
    CLOSED_FORM = "closed_form"


class ValidationMode(str, Enum):
    SIMULATOR = "simulator"
    PUBLISHED = "published"
    SELF = "self"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DeviceSection(_Section):
    alpha: float = DEFAULT_ALPHA
    k_off: float = DEFAULT_K_OFF
    k_on: float = DEFAULT_K_ON


class ArraySection(_Section):
    size: int = 8
    pattern: PatternKind = PatternKind.ALL_ONES
    metal: Metal = Metal.M3
    strategy: Strategy = Strategy.FRC
    v_dd: float = 1.5
    r_load: float = DEFAULT_R_LOAD
    r_ground: float = DEFAULT_R_GROUND
    target: Optional[Tuple[int, int]] = None
    measurement_mode: MeasurementMode = MeasurementMode.SUPPLY_MINUS_TARGET


class SweepSection(_Section):
    sizes: List[int] = Field(default_factory=lambda: list(DEFAULT_SIZES))
    k_on_values: List[float] = Field(default_factory=lambda: list(DEFAULT_K_ON_VALUES))
    v_dd_values: List[float] = Field(default_factory=lambda: list(DEFAULT_V_DD_VALUES))
    metals: List[Metal] = Field(default_factory=lambda: [Metal.M3])
    patterns: List[PatternKind] = Field(default_factory=lambda: [PatternKind.ALL_ONES])
    strategies: List[Strategy] = Field(default_factory=lambda: [Strategy.FRC])
    with_margin: bool = False


class SolverSection(_Section):
    abs_tol: float = Field(default=settings.abs_tol, gt=0)
    rel_tol: float = Field(default=settings.rel_tol, gt=0)
    max_iter: int = Field(default=settings.max_iter, ge=1)
    damping: Damping = Damping.LINE_HALVING
    source_steps: int = Field(default=SOURCE_STEPS, ge=0)

    def to_options(self) -> SolveOptions:
        return SolveOptions(**self.model_dump())


class OutputSection(_Section):
    csv: Optional[Path] = None
    coefficients: Optional[Path] = None
    store: bool = False
    database_url: Optional[str] = None
    record_runtime: bool = True


class ValidationSection(_Section):
    mode: ValidationMode = ValidationMode.SIMULATOR
    points: List[Tuple[int, float, float]] = Field(default_factory=lambda: list(REFERENCE_POINTS))
    gate_pct: Optional[float] = Field(default=None, gt=0)
    fit_gate_pct: float = Field(default=15.0, gt=0)


class RunConfig(_Section):
    device: DeviceSection = Field(default_factory=DeviceSection)
    array: ArraySection = Field(default_factory=ArraySection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    output: OutputSection = Field(default_factory=OutputSection)
    validation: ValidationSection = Field(default_factory=ValidationSection)
    backend: Backend = Backend.SIMULATOR
    workers: int = Field(default=settings.workers, ge=1)
    # fitting and published-table validation measure the per-device half-selected current
    model_measurement_mode: MeasurementMode = MeasurementMode.HALF_SELECTED_MEAN

    @model_validator(mode="after")
    def _warn_outside_box(self):
        outside = []
        outside += [f"size={n}" for n in self.sweep.sizes if not SIZE_BOUNDS[0] <= n <= SIZE_BOUNDS[1]]
        outside += [f"k_on={k:g}" for k in self.sweep.k_on_values if not K_ON_BOUNDS[0] <= k <= K_ON_BOUNDS[1]]
        outside += [f"v_dd={v:g}" for v in self.sweep.v_dd_values if not V_DD_BOUNDS[0] <= v <= V_DD_BOUNDS[1]]
        if outside:
            logger.warning(f"sweep values outside the closed-form validity box: {', '.join(outside)}")
        return self

    def device_params(self, k_on: Optional[float] = None) -> DeviceParams:
        try:
            return DeviceParams(alpha=self.device.alpha, k_off=self.device.k_off, k_on=self.device.k_on if k_on is None else k_on)
        except ValidationError as e:
            raise ConfigError(f"invalid device parameters: {e}") from e

    def crossbar_spec(self, **overrides) -> CrossbarSpec:
        """CrossbarSpec from the [array] and [device] sections, with per-point overrides"""
        values = self.array.model_dump()
        values.update(overrides)
        device = self.device_params(values.pop("k_on", None))
        try:
            return crossbar_spec(
                n=values.pop("size"),
                pattern=values.pop("pattern"),
                metal=values.pop("metal"),
                strategy=values.pop("strategy"),
                v_dd=values.pop("v_dd"),
                device=device,
                **values,
            )
        except ValidationError as e:
            raise ConfigError(f"invalid array parameters: {e}") from e


def _apply_override(document: Dict[str, Any], dotted: str, value: Any) -> None:
    node = document
    *path, leaf = dotted.split(".")
    for part in path:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override {dotted}: {part} is not a section")
    node[leaf] = value


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Read the TOML file (if any), apply dotted overrides such as array.size=16, validate"""
    document: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            with path.open("rb") as handle:
                document = tomllib.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
    for dotted, value in (overrides or {}).items():
        if value is not None:
            _apply_override(document, dotted, value)
    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e

"""Relative-change surfaces and parameter sensitivity rankings.

Margins here are normalized margins, so the per-point default load rule does
not leak into the comparison between points.
"""
import logging
import math
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

from src.analysis.backends import EvaluationBackend, PointMetrics, SimulatorBackend
from src.analysis.metrics import sensitivity_size
from src.config.sim_config import SENSITIVITY_ENDPOINTS
from src.crossbar.topology import CrossbarSpec
from src.device.memristor import DeviceParams
from src.utils.errors import DomainError

logger = logging.getLogger(__name__)


class Parameter(str, Enum):
    VDD = "Vdd"
    KON = "Kon"
    SIZE = "Size"


def parameter_value(spec: CrossbarSpec, param) -> float:
    param = Parameter(param)
    if param is Parameter.VDD:
        return spec.v_dd
    if param is Parameter.KON:
        return spec.device.k_on
    return float(spec.n)


def with_parameter(spec: CrossbarSpec, param, value: float) -> CrossbarSpec:
    param = Parameter(param)
    if param is Parameter.VDD:
        return spec.with_changes(v_dd=float(value))
    if param is Parameter.KON:
        device = DeviceParams(k_on=float(value), k_off=spec.device.k_off, alpha=spec.device.alpha)
        return spec.with_changes(device=device)
    return spec.with_changes(n=int(value))


def input_factor(param, low: float, high: float) -> float:
    """Relative input change; size counts cells, so 4x4 -> 64x64 is 255"""
    if Parameter(param) is Parameter.SIZE:
        return (high * high - low * low) / (low * low)
    return (high - low) / low


def _percent(value: float, base: float) -> float:
    if math.isnan(value) or math.isnan(base):
        return math.nan
    if base == 0:
        raise DomainError("relative change from a zero baseline")
    return (value - base) / base * 100.0


class SurfaceRow(NamedTuple):
    value: float
    current_change_pct: float
    margin_change_pct: float


def relative_change_surface(
    base: CrossbarSpec,
    param,
    grid: Sequence[float],
    backend: Optional[EvaluationBackend] = None,
    with_margin: bool = True,
) -> List[SurfaceRow]:
    if len(grid) == 0:
        raise DomainError("relative change grid is empty")
    base_value = parameter_value(base, param)
    if not any(math.isclose(v, base_value, rel_tol=1e-12) for v in grid):
        raise DomainError(f"grid must contain the base value {base_value:g}")
    backend = backend or SimulatorBackend()
    reference = backend.evaluate(base, with_margin)
    rows = []
    for value in grid:
        point = reference if math.isclose(value, base_value, rel_tol=1e-12) else backend.evaluate(with_parameter(base, param, value), with_margin)
        rows.append(
            SurfaceRow(
                float(value),
                _percent(point.i_sneak, reference.i_sneak),
                _percent(point.normalized_margin, reference.normalized_margin),
            )
        )
    return rows


def relative_change_grid(
    base: CrossbarSpec,
    k_on_grid: Sequence[float],
    v_dd_grid: Sequence[float],
    backend: Optional[EvaluationBackend] = None,
    with_margin: bool = True,
) -> pd.DataFrame:
    """Joint (k_on, v_dd) surface of percent changes against the base spec"""
    backend = backend or SimulatorBackend()
    reference = backend.evaluate(base, with_margin)
    records = []
    for k_on in k_on_grid:
        for v_dd in v_dd_grid:
            spec = with_parameter(with_parameter(base, Parameter.KON, k_on), Parameter.VDD, v_dd)
            point = backend.evaluate(spec, with_margin)
            records.append(
                {
                    "k_on": float(k_on),
                    "v_dd": float(v_dd),
                    "current_change_pct": _percent(point.i_sneak, reference.i_sneak),
                    "margin_change_pct": _percent(point.normalized_margin, reference.normalized_margin),
                }
            )
    return pd.DataFrame.from_records(records, columns=["k_on", "v_dd", "current_change_pct", "margin_change_pct"])


class FactorSensitivity(BaseModel):
    parameter: Parameter
    low: float
    high: float
    input_factor: float
    current_change: float
    margin_change: float = math.nan

    @property
    def normalized_current(self) -> float:
        return self.current_change / self.input_factor

    @property
    def normalized_margin(self) -> float:
        return self.margin_change / self.input_factor


class SensitivityReport(BaseModel):
    """Rankings are ordered by normalized sensitivity, largest first"""

    backend: str
    z_i: float
    z_n: float = math.nan
    factor_rankings: List[FactorSensitivity]
    margin_rankings: List[FactorSensitivity] = []

    def order(self) -> List[str]:
        return [f.parameter.value for f in self.factor_rankings]

    def margin_order(self) -> List[str]:
        return [f.parameter.value for f in self.margin_rankings]


def _relative(high: PointMetrics, low: PointMetrics, field: str) -> float:
    low_value, high_value = getattr(low, field), getattr(high, field)
    if math.isnan(low_value) or math.isnan(high_value):
        return math.nan
    return sensitivity_size(low_value, high_value)


def _rank_key(value: float) -> float:
    return -1.0 if math.isnan(value) else abs(value)


def sensitivity_ranking(
    spec: CrossbarSpec,
    backend: Optional[EvaluationBackend] = None,
    with_margin: bool = True,
) -> SensitivityReport:
    """Rank Vdd, Kon and Size by normalized sensitivity of sneak current and margin.

    Every parameter starts at the low end of its range; each one in turn is
    raised to its high end while the others stay low.

    Both rankings sort descending on |relative output change| divided by the
    relative input change (`FactorSensitivity.normalized_current` and
    `normalized_margin`), not on the raw relative change. NaN ranks last.
    """
    backend = backend or SimulatorBackend()
    base = spec
    for param, (low, _) in SENSITIVITY_ENDPOINTS.items():
        base = with_parameter(base, param, low)
    reference = backend.evaluate(base, with_margin)

    factors = []
    for param, (low, high) in SENSITIVITY_ENDPOINTS.items():
        point = backend.evaluate(with_parameter(base, param, high), with_margin)
        factors.append(
            FactorSensitivity(
                parameter=Parameter(param),
                low=low,
                high=high,
                input_factor=input_factor(param, low, high),
                current_change=_relative(point, reference, "i_sneak"),
                margin_change=_relative(point, reference, "normalized_margin"),
            )
        )
        logger.info(f"{backend.name}: {param} {low:g} -> {high:g} changes the sneak current by {factors[-1].current_change:.4g}")

    size = next(f for f in factors if f.parameter is Parameter.SIZE)
    # sorted() is stable, so exact ties keep the Vdd, Kon, Size order
    return SensitivityReport(
        backend=backend.name,
        z_i=size.current_change,
        z_n=size.margin_change,
        factor_rankings=sorted(factors, key=lambda f: _rank_key(f.normalized_current), reverse=True),
        margin_rankings=sorted(factors, key=lambda f: _rank_key(f.normalized_margin), reverse=True) if with_margin else [],
    )

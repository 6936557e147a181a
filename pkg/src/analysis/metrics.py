"""Sneak current and noise-margin extraction from solved crossbars."""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy.optimize import brentq

from src.crossbar.netlist import Netlist
from src.crossbar.topology import CellStateMatrix, CrossbarSpec, MeasurementMode, TargetState, build_crossbar
from src.device.memristor import DeviceParams, device_current, effective_resistance
from src.solver.dc_solver import SolveOptions, SolveResult, solve_dc
from src.utils.errors import ConstructionError, DomainError

logger = logging.getLogger(__name__)

# numerical noise floor for sneak currents and margins
CURRENT_NOISE = 1e-12
MARGIN_NOISE = 1e-9


class MarginConfig(BaseModel):
    """Sensing divider for margin runs; r_load None applies the default load rule"""

    model_config = ConfigDict(frozen=True)

    r_load: Optional[float] = Field(default=None, gt=0)
    background: Optional[CellStateMatrix] = None


def measure_sneak(netlist: Netlist, result: SolveResult, mode=MeasurementMode.SUPPLY_MINUS_TARGET) -> float:
    mode = MeasurementMode(mode)
    target = result.current(netlist.target_branch)
    if mode is MeasurementMode.SUPPLY_MINUS_TARGET:
        value = result.source_current - target
    elif mode is MeasurementMode.SENSE_MINUS_TARGET:
        value = result.current(netlist.load_branch) - target
    else:
        if not netlist.half_selected:
            return 0.0
        value = float(np.mean([result.current(name) for name in netlist.half_selected]))
    if value < 0:
        if value < -CURRENT_NOISE:
            logger.warning(f"negative sneak current {value:.3e} A ({mode.value})")
            return value
        return 0.0
    return value


def sneak_current(spec: CrossbarSpec, options: Optional[SolveOptions] = None) -> float:
    netlist = build_crossbar(spec)
    return measure_sneak(netlist, solve_dc(netlist, options), spec.measurement_mode)


def default_margin_load(device: DeviceParams, v_dd: float) -> float:
    """Geometric mean of the LRS and HRS chord resistances at v_dd / 2"""
    v = v_dd / 2
    return math.sqrt(effective_resistance(device.k_on, device.alpha, v) * effective_resistance(device.k_off, device.alpha, v))


def resolve_margin_load(spec: CrossbarSpec, cfg: Optional[MarginConfig]) -> float:
    if cfg is not None and cfg.r_load is not None:
        return cfg.r_load
    return default_margin_load(spec.device, spec.v_dd)


def _sense_voltages(spec: CrossbarSpec, options: Optional[SolveOptions]) -> Tuple[float, float]:
    voltages = []
    for state in (TargetState.LRS, TargetState.HRS):
        netlist = build_crossbar(spec, state)
        voltages.append(solve_dc(netlist, options).voltage(netlist.sense_node))
    return voltages[0], voltages[1]


def noise_margin_array(spec: CrossbarSpec, cfg: Optional[MarginConfig] = None, options: Optional[SolveOptions] = None) -> float:
    changes = {"r_load": resolve_margin_load(spec, cfg)}
    if cfg is not None and cfg.background is not None:
        if cfg.background.n != spec.n:
            raise ConstructionError(f"background pattern is {cfg.background.n}x{cfg.background.n} but the array is {spec.n}x{spec.n}")
        changes["pattern"] = cfg.background
    try:
        sensed = spec.with_changes(**changes)
    except ValidationError as e:
        raise ConstructionError(f"invalid margin setup: {e}") from e
    v_one, v_zero = _sense_voltages(sensed, options)
    margin = v_one - v_zero
    if margin < -MARGIN_NOISE:
        logger.warning(f"negative noise margin {margin:.3e} V at n={spec.n}; check the array wiring")
    return margin


def _divider_voltage(k: float, alpha: float, v_dd: float, r_load: float) -> float:
    def balance(v_s: float) -> float:
        return device_current(k, alpha, v_dd - v_s) - v_s / r_load

    return brentq(balance, 0.0, v_dd, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def noise_margin_device(device: DeviceParams, v_dd: float, r_load: float) -> float:
    """Margin of an isolated device driving r_load, without any sneak path"""
    if not r_load > 0:
        raise DomainError(f"r_load must be positive, got {r_load}")
    if device.k_on == device.k_off:
        return 0.0
    v_on = _divider_voltage(device.k_on, device.alpha, v_dd, r_load)
    v_off = _divider_voltage(device.k_off, device.alpha, v_dd, r_load)
    return v_on - v_off


def normalized_margin(spec: CrossbarSpec, cfg: Optional[MarginConfig] = None, options: Optional[SolveOptions] = None) -> float:
    r_load = resolve_margin_load(spec, cfg)
    device_margin = noise_margin_device(spec.device, spec.v_dd, r_load)
    if device_margin <= 0:
        raise DomainError("device noise margin is zero; the normalized margin is undefined")
    background = cfg.background if cfg is not None else None
    return noise_margin_array(spec, MarginConfig(r_load=r_load, background=background), options) / device_margin


def sensitivity_size(metric_4: float, metric_64: float) -> float:
    """Relative change from the 4x4 value to the 64x64 value"""
    if metric_4 == 0:
        raise DomainError("size sensitivity needs a nonzero 4x4 baseline")
    return (metric_64 - metric_4) / metric_4

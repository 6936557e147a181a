"""Memoryless sinh-law memristor: I = K sinh(alpha V).

K plays the role of a conductance and selects the stored state (K_on for the
low-resistance state, K_off for the high-resistance state). The internal
dopant-drift state is frozen, so the device is a nonlinear resistor.
"""
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config.sim_config import DEFAULT_ALPHA, DEFAULT_K_OFF, DEFAULT_K_ON, K_ON_RANGE, SINH_ARG_LIMIT
from src.utils.errors import DomainError

logger = logging.getLogger(__name__)


class DeviceParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    k_on: float = Field(default=DEFAULT_K_ON, gt=0)
    k_off: float = Field(default=DEFAULT_K_OFF, gt=0)
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0)

    @model_validator(mode="after")
    def _check_states(self):
        if self.k_on < self.k_off:
            raise ValueError(f"k_on ({self.k_on:g}) must not be below k_off ({self.k_off:g})")
        if self.k_on == self.k_off:
            logger.warning("k_on equals k_off; the two states are indistinguishable")
        if not K_ON_RANGE[0] <= self.k_on <= K_ON_RANGE[1]:
            logger.info(f"k_on={self.k_on:g} lies outside the studied range {K_ON_RANGE}")
        return self


def _check_inputs(k: float, alpha: float, v: float) -> None:
    if not (math.isfinite(k) and math.isfinite(alpha) and math.isfinite(v)):
        raise DomainError(f"non-finite device input (k={k}, alpha={alpha}, v={v})")
    if k <= 0 or alpha <= 0:
        raise DomainError(f"device law needs k > 0 and alpha > 0 (k={k}, alpha={alpha})")


def _clamped_argument(alpha: float, v: float) -> float:
    x = alpha * v
    if abs(x) > SINH_ARG_LIMIT:
        logger.warning(f"sinh argument {x:.1f} saturated at +/-{SINH_ARG_LIMIT:.0f}")
        return math.copysign(SINH_ARG_LIMIT, x)
    return x


def device_current(k: float, alpha: float, v: float) -> float:
    """Current through the device at bias v (odd in v)"""
    _check_inputs(k, alpha, v)
    return k * math.sinh(_clamped_argument(alpha, v))


def device_conductance(k: float, alpha: float, v: float) -> float:
    """Small-signal conductance dI/dV = k alpha cosh(alpha v), always positive"""
    _check_inputs(k, alpha, v)
    return k * alpha * math.cosh(_clamped_argument(alpha, v))


def _clamp_array(x: np.ndarray) -> np.ndarray:
    saturated = np.abs(x) > SINH_ARG_LIMIT
    if saturated.any():
        logger.warning(f"sinh argument saturated on {int(saturated.sum())} branch(es)")
        x = np.clip(x, -SINH_ARG_LIMIT, SINH_ARG_LIMIT)
    return x


def device_current_array(k: np.ndarray, alpha: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorised device_current for the solver hot loop (no domain checks)"""
    return k * np.sinh(_clamp_array(alpha * v))


def device_conductance_array(k: np.ndarray, alpha: np.ndarray, v: np.ndarray) -> np.ndarray:
    return k * alpha * np.cosh(_clamp_array(alpha * v))


def effective_resistance(k: float, alpha: float, v: float) -> float:
    """Large-signal (chord) resistance v / I(v) at a bias v > 0"""
    if v <= 0:
        raise DomainError(f"chord resistance needs a positive bias, got {v}")
    return v / device_current(k, alpha, v)

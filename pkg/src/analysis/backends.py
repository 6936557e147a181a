"""Evaluation backends shared by sweeps, surfaces and rankings.

Both backends answer the same question for a CrossbarSpec: the sneak current
and, when asked, the noise margins. The closed form has no margin model and
reports NaN.
"""
import logging
import math
import time
from abc import ABC, abstractmethod
from typing import NamedTuple, Optional

from src.analysis.closed_form import CoefficientStore, eval_closed_form
from src.analysis.metrics import MarginConfig, noise_margin_array, noise_margin_device, resolve_margin_load, sneak_current
from src.crossbar.topology import CrossbarSpec
from src.solver.dc_solver import SolveOptions
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)


class PointMetrics(NamedTuple):
    i_sneak: float
    margin: float = math.nan
    normalized_margin: float = math.nan
    runtime_s: float = math.nan


class EvaluationBackend(ABC):
    name: str = "backend"

    @abstractmethod
    def sneak_current(self, spec: CrossbarSpec) -> float:
        ...

    def margins(self, spec: CrossbarSpec) -> tuple:
        return math.nan, math.nan

    def evaluate(self, spec: CrossbarSpec, with_margin: bool = False) -> PointMetrics:
        start = time.perf_counter()
        i_sneak = self.sneak_current(spec)
        runtime = time.perf_counter() - start
        if not with_margin:
            return PointMetrics(i_sneak, runtime_s=runtime)
        margin, normalized = self.margins(spec)
        return PointMetrics(i_sneak, margin, normalized, runtime)


class SimulatorBackend(EvaluationBackend):
    name = "simulator"

    def __init__(self, options: Optional[SolveOptions] = None, margin: Optional[MarginConfig] = None):
        self.options = options or SolveOptions()
        self.margin_config = margin

    def sneak_current(self, spec: CrossbarSpec) -> float:
        return sneak_current(spec, self.options)

    def margins(self, spec: CrossbarSpec) -> tuple:
        r_load = resolve_margin_load(spec, self.margin_config)
        background = self.margin_config.background if self.margin_config else None
        margin = noise_margin_array(spec, MarginConfig(r_load=r_load, background=background), self.options)
        device_margin = noise_margin_device(spec.device, spec.v_dd, r_load)
        normalized = margin / device_margin if device_margin > 0 else math.nan
        return margin, normalized


class ClosedFormBackend(EvaluationBackend):
    name = "closed_form"

    def __init__(self, store: Optional[CoefficientStore] = None):
        self.store = store or CoefficientStore.published()

    def sneak_current(self, spec: CrossbarSpec) -> float:
        coeffs = self.store.get(spec.metal, spec.pattern.kind, spec.strategy)
        return eval_closed_form(coeffs, spec.n, spec.device.k_on, spec.v_dd)


def make_backend(name: str, options: Optional[SolveOptions] = None, store: Optional[CoefficientStore] = None, margin: Optional[MarginConfig] = None) -> EvaluationBackend:
    if name == SimulatorBackend.name:
        return SimulatorBackend(options, margin)
    if name == ClosedFormBackend.name:
        return ClosedFormBackend(store)
    raise ConfigError(f"unknown backend {name!r}")

"""Sweeps, validation tables and runtime benchmarks over the two backends."""
import itertools
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

from src.analysis.backends import ClosedFormBackend, EvaluationBackend, SimulatorBackend
from src.analysis.closed_form import CoefficientStore
from src.config.run_config import Backend, RunConfig, ValidationMode
from src.crossbar.topology import CrossbarSpec, Metal, PatternKind, Strategy, crossbar_spec, interconnect
from src.pipeline.reference_data import REFERENCE_ROWS, reference_row
from src.utils.dataset_io import COLUMNS
from src.utils.errors import SneakPathError

logger = logging.getLogger(__name__)


class SweepPoint(NamedTuple):
    index: int
    metal: Metal
    pattern: PatternKind
    strategy: Strategy
    size: int
    k_on: float
    v_dd: float


def sweep_points(config: RunConfig) -> List[SweepPoint]:
    """Grid in a fixed order: metal, pattern, strategy, size, k_on, v_dd"""
    sweep = config.sweep
    grid = itertools.product(sweep.metals, sweep.patterns, sweep.strategies, sweep.sizes, sweep.k_on_values, sweep.v_dd_values)
    return [SweepPoint(i, *values) for i, values in enumerate(grid)]


def _backend(config: RunConfig) -> EvaluationBackend:
    if config.backend is Backend.CLOSED_FORM:
        return ClosedFormBackend(CoefficientStore.load(config.output.coefficients))
    return SimulatorBackend(config.solver.to_options())


def _point_spec(config: RunConfig, point: SweepPoint, mode) -> CrossbarSpec:
    return config.crossbar_spec(
        size=point.size,
        metal=point.metal,
        pattern=point.pattern,
        strategy=point.strategy,
        k_on=point.k_on,
        v_dd=point.v_dd,
        measurement_mode=mode,
        target=None,
    )


def _evaluate_point(config: RunConfig, point: SweepPoint, mode, backend: Optional[EvaluationBackend] = None) -> Dict[str, object]:
    """One dataset row; failures are recorded in the row instead of raised"""
    row: Dict[str, object] = {
        "metal": point.metal.value,
        "pattern": point.pattern.value,
        "strategy": point.strategy.value,
        "size": point.size,
        "k_on": point.k_on,
        "v_dd": point.v_dd,
        "r_line": interconnect(point.metal).r_line,
        "backend": config.backend.value,
        "i_sneak_A": math.nan,
        "margin_V": math.nan,
        "normalized_margin": math.nan,
        "error_pct": math.nan,
        "runtime_s": math.nan,
        "converged": False,
    }
    try:
        metrics = (backend or _backend(config)).evaluate(_point_spec(config, point, mode), config.sweep.with_margin)
    except SneakPathError as e:
        logger.warning(f"sweep point {point.index} ({point}) failed: {e}")
        return row
    row.update(
        i_sneak_A=metrics.i_sneak,
        margin_V=metrics.margin,
        normalized_margin=metrics.normalized_margin,
        runtime_s=metrics.runtime_s if config.output.record_runtime else math.nan,
        converged=True,
    )
    return row


def _evaluate_indexed(args) -> Dict[str, object]:
    config, point, mode = args
    return _evaluate_point(config, point, mode)


def run_sweep(config: RunConfig, measurement_mode=None) -> pd.DataFrame:
    """Evaluate every grid point; rows come back in grid order whatever the worker count"""
    mode = measurement_mode or config.array.measurement_mode
    points = sweep_points(config)
    logger.info(f"sweeping {len(points)} point(s) with the {config.backend.value} backend on {config.workers} worker(s)")
    jobs = [(config, p, mode) for p in points]
    if config.workers <= 1 or len(points) <= 1 or config.backend is Backend.CLOSED_FORM:
        backend = _backend(config)
        rows = [_evaluate_point(config, p, mode, backend) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            # map() yields results in submission order
            rows = list(pool.map(_evaluate_indexed, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))
    failed = sum(1 for r in rows if not r["converged"])
    if failed:
        logger.warning(f"{failed} of {len(rows)} sweep point(s) failed")
    return pd.DataFrame.from_records(rows, columns=list(COLUMNS))


class ValidationRow(BaseModel):
    pattern: PatternKind
    strategy: Strategy
    metal: Metal
    size: int
    k_on: float
    v_dd: float
    simulated: float
    modeled: float
    error_pct: float
    runtime_sim: float
    runtime_model: float
    speedup: float
    reference_error_pct: Optional[float] = None
    ok: bool = True
    message: str = ""


def _timed(fn: Callable[[], float]):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def _validation_keys():
    for row in REFERENCE_ROWS:
        yield row.pattern, row.strategy, row.metal


def validate(config: RunConfig, mode: Optional[ValidationMode] = None, keys: Optional[Sequence] = None) -> List[ValidationRow]:
    """Closed form against a reference for every key and validation point.

    SIMULATOR solves each point, PUBLISHED takes the simulated value from the
    published table, SELF compares the closed form with itself.
    """
    mode = ValidationMode(mode or config.validation.mode)
    store = CoefficientStore.load(config.output.coefficients)
    closed_form = ClosedFormBackend(store)
    simulator = SimulatorBackend(config.solver.to_options())
    keys = list(keys) if keys is not None else list(dict.fromkeys(_validation_keys()))

    rows: List[ValidationRow] = []
    for pattern, strategy, metal in keys:
        pattern, strategy, metal = PatternKind(pattern), Strategy(strategy), Metal(metal)
        for size, k_on, v_dd in config.validation.points:
            spec = crossbar_spec(
                size, pattern, metal, strategy, v_dd=v_dd, device=config.device_params(k_on), measurement_mode=config.model_measurement_mode
            )
            published = reference_row(pattern, strategy, metal, size, k_on, v_dd)
            try:
                modeled, runtime_model = _timed(lambda: closed_form.sneak_current(spec))
                if mode is ValidationMode.PUBLISHED:
                    if published is None:
                        raise KeyError(f"no published row for {pattern.value}/{strategy.value}/{metal.value} at {(size, k_on, v_dd)}")
                    simulated, runtime_sim = published.simulated, math.nan
                elif mode is ValidationMode.SELF:
                    simulated, runtime_sim = _timed(lambda: closed_form.sneak_current(spec))
                else:
                    simulated, runtime_sim = _timed(lambda: simulator.sneak_current(spec))
                error_pct = (modeled - simulated) / simulated * 100.0
                ok, message = True, ""
            except (SneakPathError, KeyError, ZeroDivisionError) as e:
                logger.warning(f"validation point {pattern.value}/{strategy.value}/{metal.value} {(size, k_on, v_dd)} failed: {e}")
                simulated = modeled = error_pct = runtime_sim = runtime_model = math.nan
                ok, message = False, str(e)
            rows.append(
                ValidationRow(
                    pattern=pattern,
                    strategy=strategy,
                    metal=metal,
                    size=size,
                    k_on=k_on,
                    v_dd=v_dd,
                    simulated=simulated,
                    modeled=modeled,
                    error_pct=error_pct,
                    runtime_sim=runtime_sim,
                    runtime_model=runtime_model,
                    speedup=runtime_sim / runtime_model if ok and runtime_model > 0 else math.nan,
                    reference_error_pct=published.error_pct if published else None,
                    ok=ok,
                    message=message,
                )
            )
    return rows


def validation_frame(rows: Sequence[ValidationRow]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in rows])


class BenchmarkResult(BaseModel):
    size: int
    points: int
    repeats: int
    sim_median_s: float
    model_median_s: float
    speedup: float
    unstable: bool


def _median_time(fn: Callable[[], object], repeats: int) -> tuple:
    fn()  # warm-up
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - start)
    median = statistics.median(timings)
    spread = statistics.pstdev(timings)
    return median, median > 0 and spread > 0.5 * median


def benchmark_runtime(
    size: int,
    points: int = 1,
    repeats: int = 5,
    config: Optional[RunConfig] = None,
    reference: Optional[EvaluationBackend] = None,
    candidate: Optional[EvaluationBackend] = None,
) -> BenchmarkResult:
    """Median per-point wall time of the reference backend over the candidate"""
    config = config or RunConfig()
    repeats = max(repeats, 5)
    reference = reference or SimulatorBackend(config.solver.to_options())
    candidate = candidate or ClosedFormBackend(CoefficientStore.load(config.output.coefficients))
    specs = [
        config.crossbar_spec(size=size, v_dd=v_dd, measurement_mode=config.model_measurement_mode, target=None)
        for v_dd in _spread(config.sweep.v_dd_values, points)
    ]

    def run(backend: EvaluationBackend):
        return lambda: [backend.sneak_current(s) for s in specs]

    sim_time, sim_unstable = _median_time(run(reference), repeats)
    model_time, model_unstable = _median_time(run(candidate), repeats)
    speedup = sim_time / model_time if model_time > 0 else math.inf
    if sim_unstable or model_unstable:
        logger.warning(f"timing spread above 50% of the median at size {size}; speedup {speedup:.3g} is unstable")
    return BenchmarkResult(
        size=size,
        points=len(specs),
        repeats=repeats,
        sim_median_s=sim_time / len(specs),
        model_median_s=model_time / len(specs),
        speedup=speedup,
        unstable=sim_unstable or model_unstable,
    )


def _spread(values: Sequence[float], count: int) -> List[float]:
    values = list(values) or [1.5]
    return [values[i % len(values)] for i in range(max(1, count))]

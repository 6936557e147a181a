"""Least-squares refit of the closed form in log space.

The three raw variables (Size, ln K_on, V_dd) are centred and scaled before the
quadratic design is built, which keeps the system well conditioned even though
the raw features span 1 to ~4096. The solution is then expanded back into
coefficients of the raw monomials so the result is a drop-in CoefficientSet.
"""
import itertools
import logging
import math
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.linalg import lstsq

from src.analysis.closed_form import N_FEATURES, CoefficientSet, eval_closed_form_batch
from src.config.sim_config import DEFAULT_HOLDOUT_POINTS, DEFAULT_K_ON_VALUES, DEFAULT_SIZES, DEFAULT_V_DD_VALUES
from src.crossbar.topology import Metal, PatternKind, Strategy
from src.utils.errors import DomainError, FitError

logger = logging.getLogger(__name__)

MIN_SAMPLES = N_FEATURES
# a quadratic term needs three distinct levels to separate from the linear term and the intercept
MIN_LEVELS = 3
RAW_NAMES = ("size", "k_on", "v_dd")


class SweepSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    size: int = Field(ge=1)
    k_on: float = Field(gt=0)
    v_dd: float
    i_sneak: float
    metal: Metal = Metal.M3
    pattern: PatternKind = PatternKind.ALL_ONES
    strategy: Strategy = Strategy.FRC

    @property
    def point(self) -> Tuple[int, float, float]:
        return self.size, self.k_on, self.v_dd


class ResidualStats(NamedTuple):
    max: float
    mean: float
    rms: float


class FitResult(BaseModel):
    coefficients: CoefficientSet
    residual_stats: ResidualStats
    condition_number: float
    n_samples: int
    n_excluded: int = 0


# (kind, raw variable indices) of each standardized monomial, in feature order
_MONOMIALS = (("sq", 0), ("x", 0, 1), ("x", 0, 2), ("lin", 0), ("sq", 1), ("x", 1, 2), ("lin", 1), ("sq", 2), ("lin", 2), ("one",))
_SQUARE = {0: 0, 1: 4, 2: 7}
_CROSS = {(0, 1): 1, (0, 2): 2, (1, 2): 5}
_LINEAR = {0: 3, 1: 6, 2: 8}
_ONE = 9


def _expansion(scale: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """Matrix M with raw_features @ M == standardized_features for z = scale*u + shift"""
    m = np.zeros((N_FEATURES, N_FEATURES))
    for col, term in enumerate(_MONOMIALS):
        kind = term[0]
        if kind == "sq":
            i = term[1]
            m[_SQUARE[i], col] += scale[i] ** 2
            m[_LINEAR[i], col] += 2 * scale[i] * shift[i]
            m[_ONE, col] += shift[i] ** 2
        elif kind == "x":
            i, j = term[1], term[2]
            m[_CROSS[(i, j)], col] += scale[i] * scale[j]
            m[_LINEAR[i], col] += scale[i] * shift[j]
            m[_LINEAR[j], col] += scale[j] * shift[i]
            m[_ONE, col] += shift[i] * shift[j]
        elif kind == "lin":
            i = term[1]
            m[_LINEAR[i], col] += scale[i]
            m[_ONE, col] += shift[i]
        else:
            m[_ONE, col] = 1.0
    return m


def _usable(samples: Iterable[SweepSample]) -> Tuple[List[SweepSample], int]:
    kept, excluded = [], 0
    for s in samples:
        if math.isfinite(s.i_sneak) and s.i_sneak > 0:
            kept.append(s)
        else:
            excluded += 1
    if excluded:
        logger.warning(f"excluded {excluded} sample(s) with non-positive or non-finite sneak current")
    return sorted(kept, key=lambda s: (s.size, s.k_on, s.v_dd, s.i_sneak)), excluded


def fit_coefficients(samples: Sequence[SweepSample], ridge: float = 0.0) -> FitResult:
    if ridge < 0:
        raise DomainError(f"ridge must be non-negative, got {ridge}")
    kept, excluded = _usable(samples)
    if len(kept) < MIN_SAMPLES:
        raise FitError(f"need at least {MIN_SAMPLES} positive samples, got {len(kept)}")
    keys = {(s.metal, s.pattern, s.strategy) for s in kept}
    if len(keys) > 1:
        raise FitError(f"samples mix {len(keys)} (metal, pattern, strategy) keys; fit one key at a time")
    metal, pattern, strategy = keys.pop()

    raw = np.array([[s.size, math.log(s.k_on), s.v_dd] for s in kept])
    for idx, name in enumerate(RAW_NAMES):
        if len(np.unique(raw[:, idx])) < MIN_LEVELS:
            raise FitError(f"design is rank-deficient: fewer than {MIN_LEVELS} distinct values", name)

    mean = raw.mean(axis=0)
    std = raw.std(axis=0)
    scale, shift = 1.0 / std, -mean / std
    z = raw * scale + shift
    design = np.column_stack(
        [z[:, 0] ** 2, z[:, 0] * z[:, 1], z[:, 0] * z[:, 2], z[:, 0], z[:, 1] ** 2, z[:, 1] * z[:, 2], z[:, 1], z[:, 2] ** 2, z[:, 2], np.ones(len(kept))]
    )
    target = np.log([s.i_sneak for s in kept])
    condition = float(np.linalg.cond(design))

    if ridge > 0:
        penalty = math.sqrt(ridge) * np.eye(N_FEATURES)[:-1]
        solved, _, rank, _ = lstsq(np.vstack([design, penalty]), np.concatenate([target, np.zeros(N_FEATURES - 1)]), lapack_driver="gelsy")
    else:
        solved, _, rank, _ = lstsq(design, target, lapack_driver="gelsy")
    if rank < N_FEATURES:
        raise FitError(f"design matrix has rank {rank} < {N_FEATURES}")

    coefficients = _expansion(scale, shift) @ solved
    coeffs = CoefficientSet(metal=metal, pattern=pattern, strategy=strategy, c=tuple(float(c) for c in coefficients), source="refit")

    predicted = eval_closed_form_batch(coeffs, raw[:, 0], [s.k_on for s in kept], raw[:, 2], warn=False)
    relative = np.abs(predicted - np.exp(target)) / np.exp(target)
    stats = ResidualStats(float(relative.max()), float(relative.mean()), float(np.sqrt(np.mean(relative**2))))
    logger.info(f"fit {metal.value}/{pattern.value}/{strategy.value} on {len(kept)} samples: max residual {stats.max:.3g}, cond {condition:.3g}")
    return FitResult(coefficients=coeffs, residual_stats=stats, condition_number=condition, n_samples=len(kept), n_excluded=excluded)


class HoldoutError(NamedTuple):
    size: int
    k_on: float
    v_dd: float
    simulated: float
    modeled: float
    error_pct: float


class CrossValidation(BaseModel):
    fit: FitResult
    points: List[HoldoutError]
    max_abs_error_pct: float
    mean_abs_error_pct: float

    def passes(self, gate_pct: float) -> bool:
        return self.max_abs_error_pct <= gate_pct


def cross_validate(train: Sequence[SweepSample], holdout: Sequence[SweepSample], ridge: float = 0.0) -> CrossValidation:
    """Fit on train, report error% = (model - simulated) / simulated * 100 on holdout"""
    if not holdout:
        raise DomainError("holdout set is empty")
    train_points = {s.point for s in train}
    overlap = [s.point for s in holdout if s.point in train_points]
    if overlap:
        raise DomainError(f"holdout overlaps the training set at {len(overlap)} point(s), e.g. {overlap[0]}")
    fit = fit_coefficients(train, ridge)
    modeled = eval_closed_form_batch(fit.coefficients, [s.size for s in holdout], [s.k_on for s in holdout], [s.v_dd for s in holdout])
    points = [
        HoldoutError(s.size, s.k_on, s.v_dd, s.i_sneak, float(m), (float(m) - s.i_sneak) / s.i_sneak * 100.0)
        for s, m in zip(holdout, modeled)
    ]
    errors = np.abs([p.error_pct for p in points])
    return CrossValidation(fit=fit, points=points, max_abs_error_pct=float(errors.max()), mean_abs_error_pct=float(errors.mean()))


def default_training_grid() -> List[Tuple[int, float, float]]:
    return list(itertools.product(DEFAULT_SIZES, DEFAULT_K_ON_VALUES, DEFAULT_V_DD_VALUES))


def default_holdout_points() -> List[Tuple[int, float, float]]:
    return list(DEFAULT_HOLDOUT_POINTS)


def samples_from_generator(coeffs: CoefficientSet, points: Optional[Iterable[Tuple[int, float, float]]] = None) -> List[SweepSample]:
    """Noise-free samples of a known coefficient set"""
    points = list(points or default_training_grid())
    values = eval_closed_form_batch(coeffs, [p[0] for p in points], [p[1] for p in points], [p[2] for p in points], warn=False)
    return [
        SweepSample(size=p[0], k_on=p[1], v_dd=p[2], i_sneak=float(v), metal=coeffs.metal, pattern=coeffs.pattern, strategy=coeffs.strategy)
        for p, v in zip(points, values)
    ]

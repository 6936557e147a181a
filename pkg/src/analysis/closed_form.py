"""Closed-form sneak-current surrogate.

ln(I_sneak) is a full quadratic in (Size, ln K_on, V_dd), with Size the row
count N of an N x N array. Coefficient sets are keyed by (metal, pattern,
strategy); the published ones ship in coefficient_tables and refits share the
same JSON file format.
"""
import logging
import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.analysis.coefficient_tables import PUBLISHED_COEFFICIENTS
from src.config.sim_config import K_ON_BOUNDS, SIZE_BOUNDS, V_DD_BOUNDS
from src.crossbar.topology import Metal, PatternKind, Strategy
from src.utils.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
N_FEATURES = 10
FEATURE_NAMES = ("Size^2", "Size*lnKon", "Size*Vdd", "Size", "lnKon^2", "lnKon*Vdd", "lnKon", "Vdd^2", "Vdd", "1")

CoefficientKey = Tuple[Metal, PatternKind, Strategy]


class CoefficientSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    metal: Metal
    pattern: PatternKind
    strategy: Strategy
    c: Tuple[float, ...]
    source: str = "published"

    @field_validator("c")
    @classmethod
    def _check_length(cls, value):
        if len(value) != N_FEATURES:
            raise ValueError(f"a coefficient set has {N_FEATURES} entries, got {len(value)}")
        if not all(math.isfinite(x) for x in value):
            raise ValueError("coefficients must be finite")
        return value

    @property
    def key(self) -> CoefficientKey:
        return self.metal, self.pattern, self.strategy

    def as_array(self) -> np.ndarray:
        return np.asarray(self.c, dtype=float)


def _check_domain(size, k_on, v_dd) -> None:
    if not (math.isfinite(k_on) and math.isfinite(v_dd)):
        raise DomainError(f"non-finite closed-form input (k_on={k_on}, v_dd={v_dd})")
    if k_on <= 0:
        raise DomainError(f"k_on must be positive for ln(k_on), got {k_on}")
    if size < 1:
        raise DomainError(f"array size must be at least 1, got {size}")


def within_bounds(size, k_on: float, v_dd: float) -> bool:
    return (
        SIZE_BOUNDS[0] <= size <= SIZE_BOUNDS[1]
        and K_ON_BOUNDS[0] <= k_on <= K_ON_BOUNDS[1]
        and V_DD_BOUNDS[0] <= v_dd <= V_DD_BOUNDS[1]
    )


def feature_vector(size, k_on: float, v_dd: float) -> np.ndarray:
    _check_domain(size, k_on, v_dd)
    s = float(size)
    ln_k = math.log(k_on)
    return np.array([s * s, s * ln_k, s * v_dd, s, ln_k * ln_k, ln_k * v_dd, ln_k, v_dd * v_dd, v_dd, 1.0])


def feature_matrix(sizes, k_ons, v_dds) -> np.ndarray:
    """Row-wise feature_vector for equal-length parameter arrays"""
    s = np.asarray(sizes, dtype=float)
    k = np.asarray(k_ons, dtype=float)
    v = np.asarray(v_dds, dtype=float)
    if not (np.all(np.isfinite(k)) and np.all(np.isfinite(v))):
        raise DomainError("non-finite closed-form input")
    if np.any(k <= 0):
        raise DomainError("k_on must be positive for ln(k_on)")
    if np.any(s < 1):
        raise DomainError("array size must be at least 1")
    ln_k = np.log(k)
    return np.column_stack([s * s, s * ln_k, s * v, s, ln_k * ln_k, ln_k * v, ln_k, v * v, v, np.ones_like(s)])


def eval_closed_form(coeffs: CoefficientSet, size, k_on: float, v_dd: float) -> float:
    features = feature_vector(size, k_on, v_dd)
    if not within_bounds(size, k_on, v_dd):
        logger.warning(f"closed form extrapolated outside its fitted box (size={size}, k_on={k_on:g}, v_dd={v_dd:g})")
    return float(math.exp(float(np.dot(coeffs.as_array(), features))))


def eval_closed_form_batch(coeffs: CoefficientSet, sizes, k_ons, v_dds, warn: bool = True) -> np.ndarray:
    features = feature_matrix(sizes, k_ons, v_dds)
    outside = warn and sum(
        1 for s, k, v in zip(np.atleast_1d(sizes), np.atleast_1d(k_ons), np.atleast_1d(v_dds)) if not within_bounds(s, k, v)
    )
    if outside:
        logger.warning(f"closed form extrapolated at {outside} of {len(features)} points")
    return np.exp(features @ coeffs.as_array())


class _CoefficientFile(BaseModel):
    schema_version: int = Field(default=SCHEMA_VERSION)
    sets: List[CoefficientSet]


class CoefficientStore:
    """Immutable lookup of coefficient sets by (metal, pattern, strategy)"""

    def __init__(self, sets: Iterable[CoefficientSet]):
        self._sets: Dict[CoefficientKey, CoefficientSet] = {}
        for cs in sets:
            self._sets[cs.key] = cs

    @classmethod
    def published(cls) -> "CoefficientStore":
        return cls(
            CoefficientSet(metal=metal, pattern=pattern, strategy=strategy, c=values)
            for (metal, pattern, strategy), values in PUBLISHED_COEFFICIENTS.items()
        )

    def __len__(self) -> int:
        return len(self._sets)

    def __iter__(self):
        return iter(self._sets.values())

    def keys(self) -> List[CoefficientKey]:
        return list(self._sets)

    def get(self, metal, pattern, strategy) -> CoefficientSet:
        key = (Metal(metal), PatternKind(pattern), Strategy(strategy))
        try:
            return self._sets[key]
        except KeyError:
            raise DomainError(f"no coefficient set for {key[0].value}/{key[1].value}/{key[2].value}") from None

    def with_set(self, coeffs: CoefficientSet) -> "CoefficientStore":
        return CoefficientStore([*self._sets.values(), coeffs])

    def to_json(self) -> str:
        return _CoefficientFile(sets=list(self._sets.values())).model_dump_json(indent=2)

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        logger.info(f"wrote {len(self)} coefficient sets to {path}")
        return path

    @classmethod
    def from_json(cls, text: str) -> "CoefficientStore":
        try:
            document = _CoefficientFile.model_validate_json(text)
        except ValidationError as e:
            raise ConfigError(f"invalid coefficient file: {e}") from e
        if document.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported coefficient schema version {document.schema_version}")
        return cls(document.sets)

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None) -> "CoefficientStore":
        """Published tables, overlaid with the sets from path when one is given"""
        store = cls.published()
        if path is None:
            return store
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"coefficient file not found: {path}")
        for cs in cls.from_json(path.read_text()):
            store = store.with_set(cs)
        return store

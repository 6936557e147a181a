import io
import logging
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd
from pydantic import BaseModel, ValidationError

from src.analysis.fitting import SweepSample
from src.config.sim_config import CSV_SIGNIFICANT_DIGITS
from src.crossbar.topology import MeasurementMode
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

COLUMNS = (
    "metal",
    "pattern",
    "strategy",
    "size",
    "k_on",
    "v_dd",
    "r_line",
    "backend",
    "i_sneak_A",
    "margin_V",
    "normalized_margin",
    "error_pct",
    "runtime_s",
    "converged",
)
FLOAT_FORMAT = f"%.{CSV_SIGNIFICANT_DIGITS}g"


class DatasetInfo(BaseModel):
    measurement_mode: MeasurementMode
    backend: str


def empty_dataset() -> pd.DataFrame:
    return pd.DataFrame(columns=list(COLUMNS))


def dataset_to_csv(frame: pd.DataFrame) -> str:
    """CSV text in the fixed column order with 9 significant digits"""
    missing = [c for c in COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigError(f"dataset is missing columns: {', '.join(missing)}")
    buffer = io.StringIO()
    frame.to_csv(buffer, columns=list(COLUMNS), index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def sidecar_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_dataset(frame: pd.DataFrame, path: Union[str, Path], info: Optional[DatasetInfo] = None) -> Path:
    """CSV plus, when info is given, a sidecar recording how the currents were measured"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dataset_to_csv(frame))
    if info is not None:
        sidecar_path(path).write_text(info.model_dump_json(indent=2))
    logger.info(f"wrote {len(frame)} rows to {path}")
    return path


def read_dataset_info(path: Union[str, Path]) -> Optional[DatasetInfo]:
    """Sidecar of a dataset written by write_dataset, or None for a bare CSV"""
    meta = sidecar_path(path)
    if not meta.exists():
        return None
    try:
        return DatasetInfo.model_validate_json(meta.read_text())
    except ValidationError as e:
        raise ConfigError(f"cannot read {meta}: {e}") from e


def parse_dataset(text: str) -> pd.DataFrame:
    frame = pd.read_csv(io.StringIO(text), dtype={"metal": str, "pattern": str, "strategy": str, "backend": str})
    if tuple(frame.columns) != COLUMNS:
        raise ConfigError(f"unexpected dataset columns: {', '.join(frame.columns)}")
    frame["converged"] = frame["converged"].astype(str).str.lower().map({"true": True, "false": False})
    return frame


def read_dataset(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"dataset not found: {path}")
    return parse_dataset(path.read_text())


def samples_from_dataset(frame: pd.DataFrame, backend: Optional[str] = "simulator") -> List[SweepSample]:
    """Converged rows as fitting samples; failed rows are skipped"""
    rows = frame[frame["converged"].astype(bool)]
    if backend is not None:
        rows = rows[rows["backend"] == backend]
    skipped = len(frame) - len(rows)
    if skipped:
        logger.info(f"skipped {skipped} dataset row(s) that failed or came from another backend")
    return [
        SweepSample(
            size=int(r.size),
            k_on=float(r.k_on),
            v_dd=float(r.v_dd),
            i_sneak=float(r.i_sneak_A),
            metal=r.metal,
            pattern=r.pattern,
            strategy=r.strategy,
        )
        for r in rows.itertuples(index=False)
    ]

import json
import math
from typing import Iterable, List, Optional

import pandas as pd
from sqlalchemy import create_engine
from sqlalchemy.orm import scoped_session, sessionmaker

from src.config.db_config import DATABASE_URL, ensure_sqlite_parent
from src.database.models import Base, Run, SweepRecord, ValidationRecord


def _nullable(value) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return None if math.isnan(value) else value


class Repository:
    """Persists sweep and validation runs; creates the schema on first use"""

    def __init__(self, database_url: Optional[str] = None):
        self.engine = create_engine(ensure_sqlite_parent(database_url or DATABASE_URL))
        Base.metadata.create_all(self.engine)
        self.session = scoped_session(sessionmaker(autocommit=False, autoflush=False, bind=self.engine))()

    def close(self):
        self.session.close()
        self.engine.dispose()

    # Run operations
    def create_run(self, kind: str, backend: str, config: Optional[dict] = None) -> Run:
        run = Run(kind=kind, backend=backend, config_json=json.dumps(config, default=str) if config is not None else None)
        self.session.add(run)
        self.session.commit()
        return run

    def get_run(self, run_id: int) -> Optional[Run]:
        return self.session.query(Run).filter(Run.id == run_id).first()

    def get_latest_run(self, kind: Optional[str] = None) -> Optional[Run]:
        query = self.session.query(Run)
        if kind is not None:
            query = query.filter(Run.kind == kind)
        return query.order_by(Run.created_at.desc(), Run.id.desc()).first()

    # Sweep operations
    def add_sweep_rows(self, run_id: int, frame: pd.DataFrame) -> int:
        records = [
            SweepRecord(
                run_id=run_id,
                grid_index=index,
                metal=row["metal"],
                pattern=row["pattern"],
                strategy=row["strategy"],
                size=int(row["size"]),
                k_on=float(row["k_on"]),
                v_dd=float(row["v_dd"]),
                r_line=float(row["r_line"]),
                i_sneak=_nullable(row["i_sneak_A"]),
                margin=_nullable(row["margin_V"]),
                normalized_margin=_nullable(row["normalized_margin"]),
                runtime_s=_nullable(row["runtime_s"]),
                converged=bool(row["converged"]),
            )
            for index, row in enumerate(frame.to_dict("records"))
        ]
        self.session.add_all(records)
        self.session.commit()
        return len(records)

    def get_sweep_rows(self, run_id: int) -> List[SweepRecord]:
        return self.session.query(SweepRecord).filter(SweepRecord.run_id == run_id).order_by(SweepRecord.grid_index).all()

    # Validation operations
    def add_validation_rows(self, run_id: int, rows: Iterable) -> int:
        records = [
            ValidationRecord(
                run_id=run_id,
                pattern=r.pattern.value,
                strategy=r.strategy.value,
                metal=r.metal.value,
                size=r.size,
                k_on=r.k_on,
                v_dd=r.v_dd,
                simulated=_nullable(r.simulated),
                modeled=_nullable(r.modeled),
                error_pct=_nullable(r.error_pct),
                speedup=_nullable(r.speedup),
                ok=r.ok,
                message=r.message or None,
            )
            for r in rows
        ]
        self.session.add_all(records)
        self.session.commit()
        return len(records)

    def get_validation_rows(self, run_id: int) -> List[ValidationRecord]:
        return self.session.query(ValidationRecord).filter(ValidationRecord.run_id == run_id).order_by(ValidationRecord.id).all()

    # Helper methods for the CLI
    def save_sweep(self, frame: pd.DataFrame, backend: str, config: Optional[dict] = None) -> Run:
        run = self.create_run("sweep", backend, config)
        self.add_sweep_rows(run.id, frame)
        return run

    def save_validation(self, rows: list, backend: str, config: Optional[dict] = None) -> Run:
        run = self.create_run("validation", backend, config)
        self.add_validation_rows(run.id, rows)
        return run

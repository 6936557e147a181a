import datetime
import logging
from typing import Optional

from sqlalchemy import Boolean, Column, DateTime, Float, ForeignKey, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, relationship

from src.config.db_config import DATABASE_URL, ensure_sqlite_parent

logger = logging.getLogger(__name__)

Base = declarative_base()


class Run(Base):
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True)
    kind = Column(String(20), nullable=False)  # 'sweep' or 'validation'
    backend = Column(String(20), nullable=False)
    config_json = Column(Text, nullable=True)
    created_at = Column(DateTime, default=datetime.datetime.utcnow)

    sweep_points = relationship("SweepRecord", back_populates="run", cascade="all, delete-orphan")
    validation_points = relationship("ValidationRecord", back_populates="run", cascade="all, delete-orphan")


class SweepRecord(Base):
    __tablename__ = 'sweep_points'

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey('runs.id'), nullable=False)
    grid_index = Column(Integer, nullable=False)
    metal = Column(String(4), nullable=False)
    pattern = Column(String(20), nullable=False)
    strategy = Column(String(8), nullable=False)
    size = Column(Integer, nullable=False)
    k_on = Column(Float, nullable=False)
    v_dd = Column(Float, nullable=False)
    r_line = Column(Float, nullable=False)
    i_sneak = Column(Float, nullable=True)  # amperes; NULL when the point failed
    margin = Column(Float, nullable=True)
    normalized_margin = Column(Float, nullable=True)
    runtime_s = Column(Float, nullable=True)
    converged = Column(Boolean, nullable=False, default=True)

    run = relationship("Run", back_populates="sweep_points")


class ValidationRecord(Base):
    __tablename__ = 'validation_points'

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey('runs.id'), nullable=False)
    pattern = Column(String(20), nullable=False)
    strategy = Column(String(8), nullable=False)
    metal = Column(String(4), nullable=False)
    size = Column(Integer, nullable=False)
    k_on = Column(Float, nullable=False)
    v_dd = Column(Float, nullable=False)
    simulated = Column(Float, nullable=True)
    modeled = Column(Float, nullable=True)
    error_pct = Column(Float, nullable=True)
    speedup = Column(Float, nullable=True)
    ok = Column(Boolean, nullable=False, default=True)
    message = Column(Text, nullable=True)

    run = relationship("Run", back_populates="validation_points")


def init_db(database_url: Optional[str] = None, reset: bool = False):
    """Create the results schema; reset drops existing tables first"""
    engine = create_engine(ensure_sqlite_parent(database_url or DATABASE_URL))
    try:
        if reset:
            Base.metadata.drop_all(engine)
            logger.info("Dropped existing tables")
        for table in (Run.__table__, SweepRecord.__table__, ValidationRecord.__table__):
            table.create(engine, checkfirst=True)
            logger.info(f"Created table: {table.name}")
        return engine
    except Exception as e:
        logger.error(f"Error during database initialization: {str(e)}")
        raise

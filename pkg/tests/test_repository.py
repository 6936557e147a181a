import math

from sqlalchemy import create_engine, inspect

from src.config.run_config import RunConfig, ValidationMode, load_run_config
from src.database.models import init_db
from src.database.repository import Repository
from src.pipeline.orchestrator import run_sweep, validate


def test_init_db_creates_the_schema(sqlite_url):
    init_db(sqlite_url, reset=True)
    tables = set(inspect(create_engine(sqlite_url)).get_table_names())
    assert {"runs", "sweep_points", "validation_points"} <= tables


def test_sweep_rows_round_trip(sqlite_url):
    config = load_run_config(None, {"workers": 1, "backend": "closed_form", "sweep.sizes": [4, 8]})
    frame = run_sweep(config)
    repository = Repository(sqlite_url)
    run = repository.save_sweep(frame, "closed_form", config.model_dump(mode="json"))
    stored = repository.get_sweep_rows(run.id)
    assert len(stored) == len(frame) == 50
    assert [r.grid_index for r in stored] == list(range(50))
    assert stored[0].size == 4 and stored[-1].size == 8
    assert stored[0].i_sneak == frame["i_sneak_A"].iloc[0]
    assert stored[0].margin is None
    assert repository.get_latest_run("sweep").id == run.id
    assert repository.get_run(run.id).backend == "closed_form"
    repository.close()


def test_validation_rows_round_trip(sqlite_url):
    rows = validate(RunConfig(workers=1), ValidationMode.SELF)
    repository = Repository(sqlite_url)
    run = repository.save_validation(rows, "self")
    stored = repository.get_validation_rows(run.id)
    assert len(stored) == 72
    assert all(r.ok for r in stored)
    assert all(r.error_pct == 0.0 for r in stored)
    assert repository.get_latest_run("validation").kind == "validation"
    assert repository.get_latest_run("sweep") is None
    repository.close()


def test_failed_sweep_values_become_null(sqlite_url):
    config = load_run_config(
        None,
        {
            "workers": 1,
            "sweep.sizes": [8],
            "sweep.k_on_values": [1e-7],
            "sweep.v_dd_values": [3.0],
            "solver.max_iter": 1,
            "solver.damping": "None",
            "solver.source_steps": 0,
        },
    )
    frame = run_sweep(config)
    assert math.isnan(frame["i_sneak_A"].iloc[0])
    repository = Repository(sqlite_url)
    stored = repository.get_sweep_rows(repository.save_sweep(frame, "simulator").id)
    assert stored[0].i_sneak is None
    assert stored[0].converged is False
    repository.close()


def test_setup_script_resets_the_store(sqlite_url):
    from scripts.setup_db import setup_database

    repository = Repository(sqlite_url)
    repository.save_validation(validate(RunConfig(workers=1), ValidationMode.SELF), "self")
    repository.close()
    assert setup_database(sqlite_url, reset=True) == ["runs", "sweep_points", "validation_points"]
    repository = Repository(sqlite_url)
    assert repository.get_latest_run() is None
    repository.close()

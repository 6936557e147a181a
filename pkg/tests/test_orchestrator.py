import math

import pandas as pd
import pytest

from src.analysis.backends import ClosedFormBackend
from src.config.run_config import Backend, RunConfig, ValidationMode, load_run_config
from src.crossbar.topology import Metal, PatternKind, Strategy
from src.pipeline.orchestrator import benchmark_runtime, run_sweep, sweep_points, validate, validation_frame
from src.pipeline.reference_data import REFERENCE_ROWS
from src.utils.dataset_io import COLUMNS


def _config(**overrides) -> RunConfig:
    return load_run_config(None, {"workers": 1, **overrides})


def test_grid_order_is_fixed():
    config = _config(**{"sweep.sizes": [4, 8], "sweep.k_on_values": [1e-9], "sweep.v_dd_values": [1.0, 2.0]})
    points = [(p.size, p.k_on, p.v_dd) for p in sweep_points(config)]
    assert points == [(4, 1e-9, 1.0), (4, 1e-9, 2.0), (8, 1e-9, 1.0), (8, 1e-9, 2.0)]
    assert [p.index for p in sweep_points(config)] == [0, 1, 2, 3]


def test_closed_form_sweep_covers_the_default_grid():
    frame = run_sweep(_config(backend="closed_form"))
    assert list(frame.columns) == list(COLUMNS)
    assert len(frame) == 125
    assert (frame["backend"] == "closed_form").all()
    assert frame["converged"].all()
    assert frame["margin_V"].isna().all()


def test_single_point_simulator_sweep_with_margin():
    config = _config(**{"sweep.sizes": [4], "sweep.k_on_values": [3e-8], "sweep.v_dd_values": [1.5], "sweep.with_margin": True})
    frame = run_sweep(config)
    assert len(frame) == 1
    row = frame.iloc[0]
    assert row["converged"]
    assert row["i_sneak_A"] > 0
    assert row["margin_V"] > 0
    assert 0 < row["normalized_margin"] <= 1.0
    assert row["r_line"] == pytest.approx(3.122)
    assert row["runtime_s"] >= 0


def test_sneak_current_rises_along_the_size_axis():
    config = _config(**{"sweep.sizes": [4, 8, 16], "sweep.k_on_values": [3e-8], "sweep.v_dd_values": [1.5, 3.0]})
    frame = run_sweep(config)
    for _, group in frame.groupby("v_dd"):
        currents = group.sort_values("size")["i_sneak_A"].tolist()
        assert currents == sorted(currents)


def test_failed_points_are_recorded_in_row(caplog):
    config = _config(
        **{
            "sweep.sizes": [8],
            "sweep.k_on_values": [1e-7],
            "sweep.v_dd_values": [3.0],
            "solver.max_iter": 1,
            "solver.damping": "None",
            "solver.source_steps": 0,
        }
    )
    frame = run_sweep(config)
    assert len(frame) == 1
    assert not frame.iloc[0]["converged"]
    assert math.isnan(frame.iloc[0]["i_sneak_A"])
    assert "sweep point 0" in caplog.text
    assert "1 of 1 sweep point(s) failed" in caplog.text
    records = [r for r in caplog.records if r.name == "src.pipeline.orchestrator"]
    assert records and all(not r.args for r in records)


def test_parallel_sweep_matches_sequential():
    overrides = {"sweep.sizes": [2, 3, 4], "sweep.k_on_values": [3e-8], "sweep.v_dd_values": [1.0, 2.0], "output.record_runtime": False}
    sequential = run_sweep(_config(**overrides))
    parallel = run_sweep(load_run_config(None, {"workers": 2, **overrides}))
    pd.testing.assert_frame_equal(sequential, parallel)


def test_published_mode_reproduces_published_errors():
    rows = validate(_config(), ValidationMode.PUBLISHED)
    assert len(rows) == len(REFERENCE_ROWS) == 72
    assert all(r.ok for r in rows)
    anchor = next(r for r in rows if (r.metal, r.pattern, r.strategy, r.size) == (Metal.M3, PatternKind.ALL_ONES, Strategy.FRC, 8))
    assert anchor.error_pct == pytest.approx(-7.017, abs=0.3)
    for r in rows:
        assert r.error_pct == pytest.approx(r.reference_error_pct, abs=0.3)


def test_self_mode_has_zero_error():
    rows = validate(_config(), ValidationMode.SELF)
    assert all(r.ok and r.error_pct == 0.0 for r in rows)


def test_simulator_mode_on_one_key():
    config = _config(**{"validation.points": [[8, 3e-8, 1.5]]})
    rows = validate(config, ValidationMode.SIMULATOR, keys=[("AllOnes", "FRC", "M3")])
    assert len(rows) == 1
    row = rows[0]
    assert row.ok
    assert -90.0 < row.error_pct < 900.0
    assert row.speedup > 1.0
    frame = validation_frame(rows)
    assert {"error_pct", "speedup", "reference_error_pct"} <= set(frame.columns)


def test_benchmark_of_a_backend_against_itself():
    backend = ClosedFormBackend()
    result = benchmark_runtime(4, points=3, repeats=5, config=_config(), reference=backend, candidate=backend)
    assert result.points == 3
    assert result.repeats == 5
    assert 0.2 < result.speedup < 5.0


def test_benchmark_enforces_five_repeats():
    backend = ClosedFormBackend()
    assert benchmark_runtime(4, repeats=1, config=_config(), reference=backend, candidate=backend).repeats == 5


def test_closed_form_beats_the_simulator_at_size_four():
    assert benchmark_runtime(4, config=_config()).speedup >= 10


@pytest.mark.slow
def test_closed_form_beats_the_simulator_at_size_32():
    assert benchmark_runtime(32, config=_config()).speedup >= 1000

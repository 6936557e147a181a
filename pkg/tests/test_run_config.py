import re
import sys
from pathlib import Path

import pytest

from src.config.run_config import MIN_PYTHON, Backend, RunConfig, ValidationMode, load_run_config
from src.crossbar.topology import MeasurementMode, Metal, PatternKind, Strategy
from src.pipeline.reference_data import REFERENCE_POINTS
from src.utils.errors import ConfigError


def test_defaults():
    config = RunConfig()
    assert config.array.size == 8
    assert config.array.measurement_mode is MeasurementMode.SUPPLY_MINUS_TARGET
    assert config.model_measurement_mode is MeasurementMode.HALF_SELECTED_MEAN
    assert config.backend is Backend.SIMULATOR
    assert config.validation.mode is ValidationMode.SIMULATOR
    assert [tuple(p) for p in config.validation.points] == list(REFERENCE_POINTS)
    assert config.sweep.sizes == [4, 8, 16, 32, 64]


def test_toml_file_and_overrides(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        '[array]\nsize = 16\nmetal = "M5"\nstrategy = "GRC"\n\n[sweep]\nsizes = [4, 8]\n\n[device]\nk_on = 5e-8\n'
    )
    config = load_run_config(path, {"array.v_dd": 2.0, "device.k_off": None, "backend": "closed_form"})
    assert config.array.size == 16
    assert config.array.metal is Metal.M5
    assert config.array.v_dd == 2.0
    assert config.device.k_off == 1e-10
    assert config.sweep.sizes == [4, 8]
    assert config.backend is Backend.CLOSED_FORM

    spec = config.crossbar_spec()
    assert (spec.n, spec.metal, spec.strategy, spec.v_dd) == (16, Metal.M5, Strategy.GRC, 2.0)
    assert spec.device.k_on == 5e-8
    small = config.crossbar_spec(size=4, pattern=PatternKind.ALL_ZEROS, k_on=1e-9)
    assert (small.n, small.pattern.kind, small.device.k_on) == (4, PatternKind.ALL_ZEROS, 1e-9)


@pytest.mark.parametrize(
    "overrides",
    [
        {"array.colour": "red"},
        {"array.size": "big"},
        {"workers": 0},
        {"solver.max_iter": 0},
        {"workers": 2, "workers.count": 3},
    ],
)
def test_invalid_values_are_config_errors(overrides):
    with pytest.raises(ConfigError) as exc:
        load_run_config(None, overrides)
    assert exc.value.exit_code == 2


def test_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.toml")
    broken = tmp_path / "broken.toml"
    broken.write_text("[array\nsize = ")
    with pytest.raises(ConfigError):
        load_run_config(broken)


def test_bad_device_parameters():
    config = load_run_config(None, {"device.k_on": 1e-12})
    with pytest.raises(ConfigError):
        config.crossbar_spec()


def test_values_outside_the_closed_form_box_warn(caplog):
    load_run_config(None, {"sweep.sizes": [2, 8], "sweep.v_dd_values": [0.5]})
    assert "outside the closed-form validity box" in caplog.text
    assert "size=2" in caplog.text and "v_dd=0.5" in caplog.text


def test_solver_section_builds_options():
    options = load_run_config(None, {"solver.source_steps": 0, "solver.rel_tol": 1e-10}).solver.to_options()
    assert options.source_steps == 0
    assert options.rel_tol == 1e-10


def test_python_floor_is_declared_and_met():
    header = (Path(__file__).resolve().parents[1] / "requirements.txt").read_text().splitlines()[0]
    declared = tuple(int(part) for part in re.search(r"Python >= (\d+)\.(\d+)", header).groups())
    assert declared == MIN_PYTHON
    assert sys.version_info >= MIN_PYTHON

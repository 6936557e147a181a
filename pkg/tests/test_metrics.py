import math

import numpy as np
import pytest

from oracle import divider_voltage, solve_dense
from src.analysis.metrics import (
    MarginConfig,
    default_margin_load,
    measure_sneak,
    noise_margin_array,
    noise_margin_device,
    normalized_margin,
    sensitivity_size,
    sneak_current,
)
from src.config.run_config import Backend, RunConfig, SweepSection
from src.crossbar.netlist import GROUND, Branch, BranchKind, Netlist
from src.crossbar.topology import MeasurementMode, Metal, PatternKind, Strategy, TargetState, build_crossbar, crossbar_spec
from src.device.memristor import DeviceParams, effective_resistance
from src.pipeline.orchestrator import run_sweep
from src.solver.dc_solver import SolveResult
from src.utils.errors import ConstructionError, DomainError


def _fake_result(source: float, target: float) -> SolveResult:
    netlist = Netlist(
        nodes=("a", "b", GROUND),
        branches=(
            Branch("M", BranchKind.MEMRISTOR, "a", "b", 1e-8, 3.0),
            Branch("RLOAD", BranchKind.LOAD, "b", GROUND, 1.0),
            Branch("VDD", BranchKind.SOURCE, "a", GROUND, 1.0),
        ),
        driver_node="a",
        sense_node="b",
        target_branch="M",
        load_branch="RLOAD",
    )
    return SolveResult(
        netlist=netlist,
        node_voltages=np.zeros(3),
        branch_currents=np.array([target, target, source]),
        shunt_currents=np.zeros(3),
        iterations=1,
        max_kcl_residual=0.0,
        converged=True,
    )


def test_numerical_noise_is_clamped_to_zero():
    result = _fake_result(source=1e-6 - 1e-13, target=1e-6)
    assert measure_sneak(result.netlist, result) == 0.0


def test_real_negative_sneak_current_is_reported(caplog):
    result = _fake_result(source=1e-6 - 1e-9, target=1e-6)
    assert measure_sneak(result.netlist, result) == pytest.approx(-1e-9)
    assert "negative sneak current" in caplog.text


def test_all_ones_leaks_more_than_all_zeros():
    ones = sneak_current(crossbar_spec(8, PatternKind.ALL_ONES))
    zeros = sneak_current(crossbar_spec(8, PatternKind.ALL_ZEROS))
    assert ones >= zeros > 0


def test_default_margin_load_is_geometric_mean():
    device = DeviceParams()
    r_on = effective_resistance(device.k_on, device.alpha, 0.75)
    r_off = effective_resistance(device.k_off, device.alpha, 0.75)
    assert default_margin_load(device, 1.5) == pytest.approx(math.sqrt(r_on * r_off))


def test_device_margin_matches_bisection():
    device = DeviceParams(k_on=3e-8, k_off=1e-10, alpha=3.0)
    r_load = default_margin_load(device, 1.5)
    expected = divider_voltage(3e-8, 3.0, 1.5, r_load) - divider_voltage(1e-10, 3.0, 1.5, r_load)
    assert noise_margin_device(device, 1.5, r_load) == pytest.approx(expected, abs=1e-12)
    assert 0 < expected < 1.5


def test_device_margin_limits():
    same = DeviceParams(k_on=1e-10, k_off=1e-10)
    assert noise_margin_device(same, 1.5, 1e6) == 0.0
    assert noise_margin_device(DeviceParams(), 1.5, 1e14) < 1e-4
    with pytest.raises(DomainError):
        noise_margin_device(DeviceParams(), 1.5, 0.0)


def test_array_margin_is_zero_for_identical_states():
    spec = crossbar_spec(3, device=DeviceParams(k_on=1e-10, k_off=1e-10))
    assert noise_margin_array(spec, MarginConfig(r_load=1e8)) == pytest.approx(0.0, abs=1e-15)


def test_array_margin_shrinks_with_the_load():
    spec = crossbar_spec(3, PatternKind.ALL_ZEROS)
    assert noise_margin_array(spec, MarginConfig(r_load=1e-6)) < 1e-9


def test_array_margin_matches_oracle(tight_options):
    spec = crossbar_spec(4, PatternKind.ALL_ZEROS, Metal.M3, Strategy.FRC, k_on=1e-9, v_dd=1.0)
    r_load = default_margin_load(spec.device, spec.v_dd)
    sensed = spec.with_changes(r_load=r_load)
    expected = []
    for state in (TargetState.LRS, TargetState.HRS):
        netlist = build_crossbar(sensed, state)
        voltages, _ = solve_dense(netlist)
        expected.append(voltages[netlist.sense_node])
    margin = noise_margin_array(spec, None, tight_options)
    assert margin > 0
    assert margin == pytest.approx(expected[0] - expected[1], abs=1e-9)


def test_background_pattern_override():
    spec = crossbar_spec(3, PatternKind.ALL_ZEROS)
    ones = crossbar_spec(3, PatternKind.ALL_ONES).pattern
    r_load = default_margin_load(spec.device, spec.v_dd)
    with_background = noise_margin_array(spec, MarginConfig(r_load=r_load, background=ones))
    direct = noise_margin_array(crossbar_spec(3, PatternKind.ALL_ONES), MarginConfig(r_load=r_load))
    assert with_background == pytest.approx(direct, rel=1e-12)


def test_background_of_the_wrong_size_is_a_construction_error():
    spec = crossbar_spec(3, PatternKind.ALL_ZEROS)
    ones = crossbar_spec(4, PatternKind.ALL_ONES).pattern
    with pytest.raises(ConstructionError, match="4x4 but the array is 3x3") as excinfo:
        noise_margin_array(spec, MarginConfig(background=ones))
    assert excinfo.value.exit_code == 2


def test_normalized_margin_of_a_single_cell_is_one():
    assert normalized_margin(crossbar_spec(1, v_dd=1.5)) == pytest.approx(1.0, rel=1e-4)


def test_normalized_margin_drops_with_size():
    single = normalized_margin(crossbar_spec(1, PatternKind.ALL_ONES, v_dd=1.5))
    larger = normalized_margin(crossbar_spec(8, PatternKind.ALL_ONES, v_dd=1.5))
    assert 0 < larger < single


def test_normalized_margin_needs_distinct_states():
    with pytest.raises(DomainError):
        normalized_margin(crossbar_spec(2, device=DeviceParams(k_on=1e-10, k_off=1e-10)))


def test_size_sensitivity():
    assert sensitivity_size(1.44e-6, 3.42e-6) == pytest.approx(1.375)
    assert sensitivity_size(2.0, 2.0) == 0.0
    assert sensitivity_size(1.5, 3.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        sensitivity_size(0.0, 1.0)


@pytest.mark.slow
def test_sneak_current_grows_with_size():
    for k_on in (1e-9, 1e-7):
        for v_dd in (1.0, 3.0):
            currents = [sneak_current(crossbar_spec(n, k_on=k_on, v_dd=v_dd)) for n in (4, 8, 16, 32, 64)]
            assert all(b >= a for a, b in zip(currents, currents[1:])), (k_on, v_dd, currents)


@pytest.mark.slow
def test_normalized_margin_falls_with_size():
    margins = [normalized_margin(crossbar_spec(n, PatternKind.ALL_ONES, k_on=1e-7, v_dd=3.0)) for n in (4, 8, 16, 32, 64)]
    assert all(b <= a for a, b in zip(margins, margins[1:])), margins
    assert margins[-1] < margins[0]


@pytest.mark.slow
def test_metal_layers_barely_move_the_margin():
    margins = [normalized_margin(crossbar_spec(64, PatternKind.ALL_ONES, metal, k_on=3e-8, v_dd=1.5)) for metal in Metal]
    assert max(margins) <= min(margins) * 1.05


@pytest.mark.slow
@pytest.mark.parametrize("mode", [MeasurementMode.SUPPLY_MINUS_TARGET, MeasurementMode.HALF_SELECTED_MEAN])
def test_default_grid_trends_hold_point_by_point(mode):
    config = RunConfig(
        workers=1,
        backend=Backend.SIMULATOR,
        sweep=SweepSection(patterns=[PatternKind.ALL_ONES, PatternKind.ALL_ZEROS], with_margin=True),
    )
    frame = run_sweep(config, mode)
    assert len(frame) == 250 and frame["converged"].all()
    currents = frame.set_index(["pattern", "size", "k_on", "v_dd"])["i_sneak_A"].sort_index()
    for pattern in (PatternKind.ALL_ONES, PatternKind.ALL_ZEROS):
        grid = currents.loc[pattern.value]
        for size, k_on in grid.index.droplevel("v_dd").unique():
            by_v_dd = grid.loc[(size, k_on)].sort_index().to_numpy()
            assert np.all(np.diff(by_v_dd) >= 0), (pattern, size, k_on)
        for size, v_dd in grid.index.droplevel("k_on").unique():
            by_k_on = grid.xs((size, v_dd), level=("size", "v_dd")).sort_index().to_numpy()
            assert np.all(np.diff(by_k_on) >= 0), (pattern, size, v_dd)
    ones = currents.loc[PatternKind.ALL_ONES.value]
    zeros = currents.loc[PatternKind.ALL_ZEROS.value].reindex(ones.index)
    assert (ones >= zeros).all()
    margins = frame[frame["pattern"] == PatternKind.ALL_ONES.value].set_index(["k_on", "v_dd", "size"])["normalized_margin"]
    for (k_on, v_dd), by_size in margins.groupby(level=["k_on", "v_dd"]):
        values = by_size.sort_index(level="size").to_numpy()
        assert np.all(np.diff(values) <= 0), (k_on, v_dd, values)

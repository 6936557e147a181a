import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.device.memristor import (
    DeviceParams,
    device_conductance,
    device_conductance_array,
    device_current,
    device_current_array,
    effective_resistance,
)
from src.utils.errors import DomainError


def test_current_at_zero_bias_is_zero():
    assert device_current(1e-10, 3.0, 0.0) == 0.0


def test_current_and_conductance_reference_values():
    assert device_current(3e-8, 3.0, 1.5) == pytest.approx(1.3501e-6, rel=1e-4)
    assert device_conductance(3e-8, 3.0, 1.5) == pytest.approx(4.0512e-6, rel=1e-4)
    assert device_conductance(1e-10, 3.0, 0.0) == pytest.approx(3e-10)


@pytest.mark.parametrize("v", [0.1, 0.7, 1.5, 3.0])
def test_symmetry(v):
    assert device_current(3e-8, 3.0, -v) == -device_current(3e-8, 3.0, v)
    assert device_conductance(3e-8, 3.0, -v) == device_conductance(3e-8, 3.0, v)


def test_conductance_matches_central_difference():
    h = 1e-6
    for v in np.linspace(-3.0, 3.0, 13):
        numeric = (device_current(3e-8, 3.0, v + h) - device_current(3e-8, 3.0, v - h)) / (2 * h)
        assert device_conductance(3e-8, 3.0, v) == pytest.approx(numeric, rel=1e-6)


def test_current_increases_in_bias_and_k():
    biases = np.linspace(-3.0, 3.0, 25)
    currents = [device_current(3e-8, 3.0, v) for v in biases]
    assert all(b > a for a, b in zip(currents, currents[1:]))
    assert device_current(5e-8, 3.0, 1.0) > device_current(3e-8, 3.0, 1.0)


def test_small_signal_is_linear_within_one_percent():
    for v in (0.01, 0.03, 0.056):
        assert device_current(3e-8, 3.0, v) == pytest.approx(3e-8 * 3.0 * v, rel=0.01)


@pytest.mark.parametrize("args", [(float("nan"), 3.0, 1.0), (1e-8, 3.0, float("inf")), (0.0, 3.0, 1.0), (1e-8, -1.0, 1.0)])
def test_bad_inputs_raise_domain_error(args):
    with pytest.raises(DomainError):
        device_current(*args)
    with pytest.raises(DomainError):
        device_conductance(*args)


def test_sinh_argument_is_clamped(caplog):
    value = device_current(1e-10, 3.0, 300.0)
    assert math.isfinite(value)
    assert value == pytest.approx(1e-10 * math.sinh(700.0))
    assert "saturated" in caplog.text


def test_array_versions_match_scalars():
    k = np.array([1e-10, 3e-8, 1e-7])
    alpha = np.full(3, 3.0)
    v = np.array([-0.4, 1.5, 2.9])
    expected_i = [device_current(*args) for args in zip(k, alpha, v)]
    expected_g = [device_conductance(*args) for args in zip(k, alpha, v)]
    np.testing.assert_allclose(device_current_array(k, alpha, v), expected_i, rtol=1e-14)
    np.testing.assert_allclose(device_conductance_array(k, alpha, v), expected_g, rtol=1e-14)


def test_effective_resistance_is_chord():
    assert effective_resistance(3e-8, 3.0, 0.75) == pytest.approx(0.75 / (3e-8 * math.sinh(2.25)))
    with pytest.raises(DomainError):
        effective_resistance(3e-8, 3.0, 0.0)


def test_device_params_defaults_and_ordering():
    device = DeviceParams()
    assert (device.alpha, device.k_off, device.k_on) == (3.0, 1e-10, 3e-8)
    with pytest.raises(ValidationError):
        DeviceParams(k_on=1e-11, k_off=1e-10)


def test_equal_states_are_allowed_with_a_warning(caplog):
    device = DeviceParams(k_on=1e-10, k_off=1e-10)
    assert device.k_on == device.k_off
    assert "indistinguishable" in caplog.text

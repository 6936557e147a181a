import json
import math

import numpy as np
import pytest

from src.analysis.closed_form import (
    FEATURE_NAMES,
    CoefficientSet,
    CoefficientStore,
    eval_closed_form,
    eval_closed_form_batch,
    feature_vector,
    within_bounds,
)
from src.crossbar.topology import Metal, PatternKind, Strategy
from src.pipeline.reference_data import REFERENCE_ROWS
from src.utils.errors import ConfigError, DomainError

STORE = CoefficientStore.published()


def _coeffs(metal, pattern, strategy):
    return STORE.get(metal, pattern, strategy)


def test_published_store_covers_every_key():
    assert len(STORE) == 24
    assert {cs.key for cs in STORE} == {(m, p, s) for m in Metal for p in (PatternKind.ALL_ONES, PatternKind.ALL_ZEROS) for s in Strategy}
    assert len(FEATURE_NAMES) == 10


def test_feature_vector_examples():
    assert feature_vector(1, 1.0, 0.0).tolist() == [1, 0, 0, 1, 0, 0, 0, 0, 0, 1]
    expected = [64, -138.577, 12, 8, 300.055, -25.983, -17.3221, 2.25, 1.5, 1]
    np.testing.assert_allclose(feature_vector(8, 3e-8, 1.5), expected, rtol=1e-5)
    assert feature_vector(64, 5e-8, 2.0)[0] == 4096


@pytest.mark.parametrize("args", [(8, 0.0, 1.5), (8, -1e-8, 1.5), (0, 3e-8, 1.5), (8, 3e-8, float("nan"))])
def test_feature_vector_domain(args):
    with pytest.raises(DomainError):
        feature_vector(*args)


@pytest.mark.parametrize(
    "key, point, expected",
    [
        ((Metal.M3, PatternKind.ALL_ONES, Strategy.FRC), (8, 3e-8, 1.5), 1.0126e-7),
        ((Metal.M3, PatternKind.ALL_ZEROS, Strategy.FRC), (8, 3e-8, 1.5), 3.378e-10),
        ((Metal.M5, PatternKind.ALL_ONES, Strategy.GRC), (16, 5e-8, 2.0), 7.819e-6),
    ],
)
def test_anchor_values(key, point, expected):
    assert eval_closed_form(_coeffs(*key), *point) == pytest.approx(expected, rel=5e-3)


def test_anchor_exponent():
    coeffs = _coeffs(Metal.M3, PatternKind.ALL_ONES, Strategy.FRC)
    assert math.log(eval_closed_form(coeffs, 8, 3e-8, 1.5)) == pytest.approx(-16.1055, abs=1e-3)


@pytest.mark.parametrize("row", REFERENCE_ROWS, ids=lambda r: f"{r.metal.value}-{r.pattern.value}-{r.strategy.value}-{r.size}")
def test_published_rows_are_reproduced(row):
    modeled = eval_closed_form(_coeffs(row.metal, row.pattern, row.strategy), row.size, row.k_on, row.v_dd)
    error_pct = (modeled - row.simulated) / row.simulated * 100.0
    assert error_pct == pytest.approx(row.error_pct, abs=0.3)


def _error_pct(row, size):
    try:
        modeled = eval_closed_form(_coeffs(row.metal, row.pattern, row.strategy), size, row.k_on, row.v_dd)
    except OverflowError:
        return math.inf
    return (modeled - row.simulated) / row.simulated * 100.0


def test_size_counts_rows_not_cells():
    assert all(_error_pct(row, row.size) == pytest.approx(row.error_pct, abs=0.3) for row in REFERENCE_ROWS)
    assert any(abs(_error_pct(row, row.size ** 2) - row.error_pct) > 0.3 for row in REFERENCE_ROWS)


def test_log_output_is_linear_in_the_features():
    coeffs = _coeffs(Metal.M6, PatternKind.ALL_ZEROS, Strategy.GRFC)
    for point in [(4, 1e-9, 1.0), (20, 4e-8, 2.2), (64, 1e-7, 3.0)]:
        direct = float(np.dot(coeffs.as_array(), feature_vector(*point)))
        assert math.log(eval_closed_form(coeffs, *point)) == pytest.approx(direct, rel=1e-12)


def test_positive_over_the_box():
    sizes, k_ons, v_dds = np.meshgrid([4, 16, 64], np.geomspace(1e-9, 1e-7, 5), np.linspace(1.0, 3.0, 5), indexing="ij")
    for cs in STORE:
        values = eval_closed_form_batch(cs, sizes.ravel(), k_ons.ravel(), v_dds.ravel())
        assert np.all(values > 0) and np.all(np.isfinite(values))


def test_batch_matches_scalar():
    coeffs = _coeffs(Metal.M5, PatternKind.ALL_ZEROS, Strategy.FRGC)
    points = [(4, 1e-9, 1.0), (32, 8e-8, 2.5)]
    batch = eval_closed_form_batch(coeffs, *zip(*points))
    np.testing.assert_allclose(batch, [eval_closed_form(coeffs, *p) for p in points], rtol=1e-13)


def test_extrapolation_warns(caplog):
    coeffs = _coeffs(Metal.M3, PatternKind.ALL_ONES, Strategy.FRC)
    assert not within_bounds(128, 3e-8, 1.5)
    assert eval_closed_form(coeffs, 128, 3e-8, 1.5) > 0
    assert "extrapolated" in caplog.text


def test_coefficient_set_validation():
    with pytest.raises(ValueError):
        CoefficientSet(metal="M3", pattern="AllOnes", strategy="FRC", c=(1.0,) * 9)
    with pytest.raises(ValueError):
        CoefficientSet(metal="M3", pattern="AllOnes", strategy="FRC", c=(float("inf"),) + (0.0,) * 9)


def test_missing_key():
    with pytest.raises(DomainError):
        CoefficientStore([]).get(Metal.M3, PatternKind.ALL_ONES, Strategy.FRC)


def test_store_file_overlays_published_sets(tmp_path):
    refit = CoefficientSet(metal=Metal.M6, pattern=PatternKind.ALL_ONES, strategy=Strategy.GRC, c=tuple(range(10)), source="refit")
    path = CoefficientStore([refit]).save(tmp_path / "coefficients.json")
    document = json.loads(path.read_text())
    assert document["schema_version"] == 1
    store = CoefficientStore.load(path)
    assert len(store) == 24
    assert store.get("M6", "AllOnes", "GRC").c == tuple(float(x) for x in range(10))
    assert store.get("M6", "AllOnes", "GRC").source == "refit"
    assert store.get("M3", "AllOnes", "FRC") == STORE.get("M3", "AllOnes", "FRC")


def test_store_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        CoefficientStore.load(tmp_path / "missing.json")
    bad_version = tmp_path / "v2.json"
    bad_version.write_text(json.dumps({"schema_version": 2, "sets": []}))
    with pytest.raises(ConfigError):
        CoefficientStore.load(bad_version)
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    with pytest.raises(ConfigError):
        CoefficientStore.load(garbage)

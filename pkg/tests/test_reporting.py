import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqecc import codes, reporting
from aqecc.codes import Model
from aqecc.errors import DataError, RangeError


def test_exact_power_law():
    slope, intercept, r2 = reporting.fit_power_law([(n, 7 / n) for n in (10, 20, 40, 80)])
    assert slope == pytest.approx(-1.0, abs=1e-12)
    assert intercept == pytest.approx(np.log(7), abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_constant_values():
    slope, _, r2 = reporting.fit_power_law([(n, 3.0) for n in (4, 8, 16)])
    assert slope == 0.0 and r2 == 1.0


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 100))
def test_recovers_any_exponent(p, c):
    slope, _, _ = reporting.fit_power_law([(n, c * n**p) for n in (5, 17, 60, 300)])
    assert slope == pytest.approx(p, abs=1e-9)


def test_fit_errors():
    with pytest.raises(DataError):
        reporting.fit_power_law([(1, 1.0), (2, 0.0), (3, 1.0)])
    with pytest.raises(DataError):
        reporting.fit_power_law([(1, 1.0), (2, 0.5)])


def test_heisenberg_curve_slope():
    slope, _, r2 = reporting.fit_power_law(codes.scaling_curve(Model.HEISENBERG, 2, 0, 6, reporting.parse_grid("64:4096:x2")))
    assert -1.15 <= slope <= -0.85 and r2 >= 0.99


def test_grids():
    assert reporting.parse_grid("64:4096:x2") == [64, 128, 256, 512, 1024, 2048, 4096]
    assert reporting.parse_grid("10:20:+5") == [10, 15, 20]
    assert reporting.parse_grid("3:3:+1") == [3]
    for bad in ("64:32:x2", "a:b:x2", "1:10:x1", "1:10:*2", "1:10"):
        with pytest.raises(RangeError):
            reporting.parse_grid(bad)


def test_output_dir_stamps_files(tmp_path):
    out = reporting.OutputDir(tmp_path, {"b": 1, "a": [1.5, np.float64(0.1)]})
    out.write_config()
    out.csv("t.csv", ["x", "y"], [(1, 0.1), (2, 1 / 3)])
    out.json("r.json", {"z": np.array([1, 2]), "w": complex(1, -2)})
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == f"# schema {reporting.SCHEMA_VERSION}; config-hash {out.hash}"
    assert lines[1:] == ["x,y", "1,0.1", "2,0.3333333333333333"]
    body = json.loads((tmp_path / "r.json").read_text())
    assert body == {"z": [1, 2], "w": [1.0, -2.0], "schema_version": reporting.SCHEMA_VERSION,
                    "config_hash": out.hash}
    text = (tmp_path / "r.json").read_text()
    assert text.index('"config_hash"') < text.index('"schema_version"') < text.index('"w"')
    header, rows = reporting.read_csv(tmp_path / "t.csv")
    assert header == ["x", "y"] and float(rows[1][1]) == 1 / 3


def test_config_hash_is_order_independent():
    assert reporting.config_hash({"a": 1, "b": 2}) == reporting.config_hash({"b": 2, "a": 1})
    assert reporting.config_hash({"a": 1}) != reporting.config_hash({"a": 2})

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heliasdo import fileio
from heliasdo.errors import ConfigError
from heliasdo.numerics import OddRatioExponent
from heliasdo.scenario import (
    COLUMNS,
    TABULATED,
    DisturbanceProfile,
    Scenario,
    TimeSeries,
    preset_case1,
    preset_case2,
)


def _series(n=5, step=1e-3):
    rng = np.random.default_rng(1)
    data = {c: rng.normal(size=n) for c in COLUMNS}
    data["t"] = np.arange(n) * step
    return TimeSeries(data, step)


def test_scenario_round_trip():
    for sc in (Scenario(), preset_case1("asosmo", "sinusoid"), preset_case2()):
        assert fileio.loads_scenario(fileio.dumps_scenario(sc)) == sc


def test_round_trip_special_values(tmp_path):
    tab = DisturbanceProfile(TABULATED, table=((0.0, 0.1), (50.0, -0.2), (100.0, 0.3)))
    ctrl = replace(Scenario().elev.ctrl, r=OddRatioExponent(7, 9))
    sc = replace(preset_case2(), d1=tab, elev=replace(Scenario().elev, ctrl=ctrl))
    text = fileio.dumps_scenario(sc)
    assert "elev.ctrl.r = 7/9" in text and "d1.table = 0.0:0.1, 50.0:-0.2, 100.0:0.3" in text
    fileio.write_scenario(sc, tmp_path / "s.cfg")
    assert fileio.read_scenario(tmp_path / "s.cfg") == sc


@settings(max_examples=50)
@given(st.floats(min_value=1e-6, max_value=1e6, allow_nan=False),
       st.floats(min_value=-10.0, max_value=10.0))
def test_float_fields_survive_text(k4, x0):
    sc = replace(Scenario(), init=Scenario().init._replace(x1=x0),
                 elev=replace(Scenario().elev, asdo=replace(Scenario().elev.asdo, k4=k4)))
    assert fileio.loads_scenario(fileio.dumps_scenario(sc)) == sc


def test_partial_file_keeps_defaults():
    sc = fileio.loads_scenario("# tweak\nelev.ctrl.mu = 0.2  # leakage\n\nduration = 5\n")
    assert sc.elev.ctrl.mu == 0.2 and sc.duration == 5.0
    assert sc.pitch == Scenario().pitch


@pytest.mark.parametrize("text, match", [
    ("elev.asdo.k9 = 1", "elev.asdo.k9"),
    ("elev.nope.k1 = 1", "elev.nope"),
    ("elev = 1", "elev"),
    ("step 0.1", "line 1"),
    ("step = 0.1\nstep = 0.2", "duplicate"),
    ("step = fast", "step"),
    ("elev.ctrl.r = 2/5", "elev.ctrl.r"),
])
def test_bad_config(text, match):
    with pytest.raises(ConfigError, match=match):
        fileio.loads_scenario(text)


def test_csv_round_trip_is_exact(tmp_path):
    ts = _series()
    path = tmp_path / "s.csv"
    fileio.write_csv(ts, path)
    back = fileio.read_csv(path)
    assert back.equals(ts)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(COLUMNS) and len(lines) == 6


def test_csv_header_only(tmp_path):
    path = tmp_path / "e.csv"
    fileio.write_csv(TimeSeries.from_rows([], 1e-3), path)
    assert path.read_text() == ",".join(COLUMNS) + "\n"
    assert len(fileio.read_csv(path)) == 0
    (tmp_path / "bad.csv").write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        fileio.read_csv(tmp_path / "bad.csv")


def test_plot_data(tmp_path):
    ts = _series()
    fileio.emit_plot_data(ts, ["Vf", "Vb"], tmp_path / "p.dat")
    names, arr = fileio.read_plot_data(tmp_path / "p.dat")
    assert names == ["t", "Vf", "Vb"]
    np.testing.assert_array_equal(arr[:, 2], ts["Vb"])
    fileio.emit_plot_data({"a": ts, "b": ts}, ["a.d1", "b.d1_hat"], tmp_path / "m.dat")
    names, arr = fileio.read_plot_data(tmp_path / "m.dat")
    assert names == ["t", "a.d1", "b.d1_hat"] and arr.shape == (5, 3)
    with pytest.raises(ValueError):
        fileio.emit_plot_data(ts, [], tmp_path / "x.dat")
    with pytest.raises(KeyError):
        fileio.emit_plot_data(ts, ["bogus"], tmp_path / "x.dat")
    with pytest.raises(ValueError):
        fileio.emit_plot_data({"a": ts, "b": _series(4)}, ["a.d1"], tmp_path / "x.dat")


def test_flatten_keys():
    flat = fileio.flatten(Scenario())
    assert flat["elev.asdo.k1"] == "2.0" and flat["pitch.ctrl.kbar1"] == "3.0"
    assert flat["init.x1"] == repr(-2 * math.pi / 15)
    assert flat["filter_substeps"] == "10"

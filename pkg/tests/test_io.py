import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from degmap import io as dio
from degmap.errors import InvalidArgumentError
from degmap.reference import data_dir
from degmap.types import (
    BatteryConfig,
    CurrentGrid,
    DegradationMap,
    NormalizedMap,
    PwaMap,
    RateBands,
    SocGrid,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
positive = st.floats(1e-6, 1e6, allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, finite, finite), min_size=1, max_size=20))
def test_pwa_csv_round_trip(planes):
    pwa = PwaMap(tuple(planes))
    assert dio.parse_pwa_csv(dio.format_pwa_csv(pwa)) == pwa


@pytest.mark.parametrize("name", ["lfp", "nmc_lmo", "lco"])
def test_shipped_tables_are_canonical(name):
    text = (data_dir() / f"{name}.csv").read_text()
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#")) + "\n"
    assert dio.format_pwa_csv(dio.parse_pwa_csv(text)) == body


@given(st.integers(1, 500), st.integers(1, 500), positive, positive)
def test_config_round_trip(tmp_path_factory, n_par, n_ser, v, c):
    cfg = BatteryConfig(n_par, n_ser, v, c)
    path = tmp_path_factory.mktemp("cfg") / "c.json"
    dio.write_config(cfg, path)
    assert dio.read_config(path) == cfg


@given(st.integers(0, 10_000))
def test_map_json_round_trip(seed):
    rng = np.random.default_rng(seed)
    centers = tuple(np.sort(rng.uniform(0.01, 0.99, 4)) + np.arange(4) * 1e-6)
    rates = tuple(np.cumsum(rng.uniform(0.1, 2, 3)))
    values = rng.uniform(0, 1e-4, (4, 3))
    bands = tuple(RateBands(r, centers[:2], tuple(values[:2, j])) for j, r in enumerate(rates))
    dmap = DegradationMap(SocGrid(centers), CurrentGrid(rates), values, rng.uniform(1, 5), bands)
    text = dio.dumps_json(dio.map_to_dict(dmap))
    assert dio.map_from_dict(json.loads(text)) == dmap


@given(st.integers(0, 10_000))
def test_nmap_json_round_trip(seed):
    rng = np.random.default_rng(seed)
    nmap = NormalizedMap(np.linspace(0, 1, 5), np.linspace(-2, 2, 7), rng.uniform(0, 1, (5, 7)))
    assert dio.nmap_from_dict(json.loads(dio.dumps_json(dio.nmap_to_dict(nmap)))) == nmap


def test_schedule_and_solution_round_trip():
    t = np.arange(4) * 0.25
    s = dio.Schedule(t, np.array([1.0, -0.5, 0.1, 0.0]), np.array([0.2, 0.3, 0.1, 1 / 3]))
    back = dio.parse_schedule_csv(dio.format_schedule_csv(s))
    assert np.array_equal(back.e_kwh, s.e_kwh) and np.array_equal(back.p_kw, s.p_kw)
    sol = dio.parse_solution_csv(dio.format_solution_csv(t, s.p_kw, s.e_kwh, s.e_kwh / 7))
    assert np.array_equal(sol["j_kwh_per_h"], s.e_kwh / 7)


def test_cycle_csv_ships_published_tests(wang_rows):
    assert len(wang_rows) == 8
    assert sorted({r["i_bat_a"] for r in wang_rows}) == [3.0, 5.25]
    assert all(r["c_q_ah"] == 1.5 for r in wang_rows)


@pytest.mark.parametrize("text", [
    "",
    "a1,a2,a3\n1,2,3\n",
    "a1,a2_per_h,a3_per_h\n1,x,3\n",
])
def test_bad_pwa_csv(text):
    with pytest.raises(InvalidArgumentError):
        dio.parse_pwa_csv(text)


def test_wrong_document_kind():
    with pytest.raises(InvalidArgumentError):
        dio.map_from_dict({"format": "degmap/normalized-map"})
    with pytest.raises(InvalidArgumentError):
        dio.nmap_from_dict({})
    with pytest.raises(InvalidArgumentError):
        dio.config_from_dict({"n_parallel": 1})
    with pytest.raises(InvalidArgumentError):
        dio.fn_from_dict({})


def test_invalid_json(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{nope")
    with pytest.raises(InvalidArgumentError):
        dio.read_json(path)


def test_ocv_csv():
    curve = dio.parse_ocv_csv("# comment\nsoc,v_oc\n0,3.0\n1,4.0\n")
    assert curve.soc_points == (0.0, 1.0) and curve.voltage_points == (3.0, 4.0)

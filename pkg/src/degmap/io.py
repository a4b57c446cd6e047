"""File codecs for maps, planes, configs, schedules and cycle tests.

Floats are written in shortest round-trip form (``repr``), so every codec
reproduces its input exactly on re-parse. Data files carry a format tag and
version but no timestamps, keeping output byte-identical across runs.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np

from .analytic import AnalyticDegradationFn, OcvCurve
from .errors import InvalidArgumentError
from .types import (
    BatteryConfig,
    CurrentGrid,
    DegradationMap,
    NormalizedMap,
    PwaMap,
    RateBands,
    SocGrid,
)

FORMAT_VERSION = 1
PWA_HEADER = ("a1", "a2_per_h", "a3_per_h")
CYCLE_HEADER = ("i_bat_a", "c_q_ah", "dod", "n_cyc", "q_s_ah")
SCHEDULE_HEADER = ("t_h", "p_bat_kw", "e_kwh")
PRICE_HEADER = ("t_h", "price")
SOLUTION_HEADER = ("t_h", "p_kw", "e_kwh", "j_kwh_per_h")

PathLike = Union[str, Path]


def fmt(x: float) -> str:
    return repr(float(x))


def _data_lines(text: str) -> List[str]:
    return [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


def _read_table(text: str, header: Sequence[str]) -> List[dict]:
    lines = _data_lines(text)
    if not lines:
        raise InvalidArgumentError(f"empty table; expected header {','.join(header)}")
    reader = csv.DictReader(lines)
    found = tuple(h.strip() for h in reader.fieldnames or ())
    if found != tuple(header):
        raise InvalidArgumentError(f"bad header {','.join(found)}; expected {','.join(header)}")
    rows = []
    for row in reader:
        try:
            rows.append({k.strip(): float(v) for k, v in row.items()})
        except (TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed row {row}: {exc}") from None
    return rows


def _write_table(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    out = [",".join(header)]
    out.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(out) + "\n"


# --- PWA planes -----------------------------------------------------------

def parse_pwa_csv(text: str) -> PwaMap:
    rows = _read_table(text, PWA_HEADER)
    return PwaMap(tuple((r["a1"], r["a2_per_h"], r["a3_per_h"]) for r in rows))


def format_pwa_csv(pwa: PwaMap) -> str:
    return _write_table(PWA_HEADER, pwa.planes)


def read_pwa_csv(path: PathLike) -> PwaMap:
    return parse_pwa_csv(Path(path).read_text())


def write_pwa_csv(pwa: PwaMap, path: PathLike) -> None:
    Path(path).write_text(format_pwa_csv(pwa))


# --- battery config ---------------------------------------------------------

def config_to_dict(config: BatteryConfig) -> dict:
    return {
        "n_parallel": config.n_parallel,
        "n_series": config.n_series,
        "mean_ocv_v": config.mean_ocv_v,
        "cell_capacity_ah": config.cell_capacity_ah,
    }


def config_from_dict(data: dict) -> BatteryConfig:
    try:
        return BatteryConfig(
            data["n_parallel"], data["n_series"], data["mean_ocv_v"], data["cell_capacity_ah"]
        )
    except KeyError as exc:
        raise InvalidArgumentError(f"battery config is missing key {exc}") from None


def read_config(path: PathLike) -> BatteryConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


def write_config(config: BatteryConfig, path: PathLike) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")


# --- degradation maps ---------------------------------------------------------

def map_to_dict(dmap: DegradationMap) -> dict:
    data = {
        "format": "degmap/degradation-map",
        "version": FORMAT_VERSION,
        "cell_capacity_ah": dmap.cell_capacity_ah,
        "soc_band_centers": list(dmap.soc_grid.band_centers),
        "current_rates_a": list(dmap.current_grid.rates),
        "side_current_a": dmap.side_current.tolist(),
    }
    if dmap.per_rate_bands is not None:
        data["per_rate_bands"] = [
            {"rate_a": b.rate, "soc_band_centers": list(b.band_centers), "side_current_a": list(b.side_current)}
            for b in dmap.per_rate_bands
        ]
    return data


def map_from_dict(data: dict) -> DegradationMap:
    if data.get("format") != "degmap/degradation-map":
        raise InvalidArgumentError("not a degradation map document")
    per_rate = data.get("per_rate_bands")
    if per_rate is not None:
        per_rate = tuple(
            RateBands(b["rate_a"], tuple(b["soc_band_centers"]), tuple(b["side_current_a"]))
            for b in per_rate
        )
    return DegradationMap(
        SocGrid(tuple(data["soc_band_centers"])),
        CurrentGrid(tuple(data["current_rates_a"])),
        np.array(data["side_current_a"], dtype=float),
        data["cell_capacity_ah"],
        per_rate,
    )


def nmap_to_dict(nmap: NormalizedMap) -> dict:
    return {
        "format": "degmap/normalized-map",
        "version": FORMAT_VERSION,
        "soe_axis": nmap.soe_axis.tolist(),
        "power_axis_per_h": nmap.power_axis.tolist(),
        "values_per_h": nmap.values.tolist(),
    }


def nmap_from_dict(data: dict) -> NormalizedMap:
    if data.get("format") != "degmap/normalized-map":
        raise InvalidArgumentError("not a normalized map document")
    return NormalizedMap(
        np.array(data["soe_axis"], dtype=float),
        np.array(data["power_axis_per_h"], dtype=float),
        np.array(data["values_per_h"], dtype=float),
    )


def dumps_json(data: dict) -> str:
    return json.dumps(data, indent=1) + "\n"


def read_json(path: PathLike) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: invalid JSON ({exc})") from None


# --- analytic inputs ---------------------------------------------------------

def fn_from_dict(data: dict) -> AnalyticDegradationFn:
    if "betas" not in data:
        raise InvalidArgumentError("degradation function document needs a 'betas' list")
    return AnalyticDegradationFn(tuple(data["betas"]))


def parse_ocv_csv(text: str) -> OcvCurve:
    rows = _read_table(text, ("soc", "v_oc"))
    return OcvCurve(tuple(r["soc"] for r in rows), tuple(r["v_oc"] for r in rows))


# --- cycle tests ---------------------------------------------------------------

def parse_cycle_csv(text: str) -> List[dict]:
    return _read_table(text, CYCLE_HEADER)


# --- schedules, prices and dispatch results ------------------------------------

@dataclass(frozen=True, eq=False)
class Schedule:
    """Power and SoE trajectory sampled at uniform times ``t_h`` (h)."""

    t_h: np.ndarray
    p_kw: np.ndarray
    e_kwh: np.ndarray

    def __len__(self):
        return len(self.t_h)


def parse_schedule_csv(text: str) -> Schedule:
    rows = _read_table(text, SCHEDULE_HEADER)
    return Schedule(
        np.array([r["t_h"] for r in rows]),
        np.array([r["p_bat_kw"] for r in rows]),
        np.array([r["e_kwh"] for r in rows]),
    )


def format_schedule_csv(schedule: Schedule) -> str:
    return _write_table(SCHEDULE_HEADER, zip(schedule.t_h, schedule.p_kw, schedule.e_kwh))


def parse_prices_csv(text: str):
    rows = _read_table(text, PRICE_HEADER)
    return np.array([r["t_h"] for r in rows]), np.array([r["price"] for r in rows])


def format_solution_csv(t_h, power, soe, deg_rate) -> str:
    return _write_table(SOLUTION_HEADER, zip(t_h, power, soe, deg_rate))


def parse_solution_csv(text: str):
    rows = _read_table(text, SOLUTION_HEADER)
    return {k: np.array([r[k] for r in rows]) for k in SOLUTION_HEADER}


__all__ = [
    "FORMAT_VERSION",
    "Schedule",
    "fmt",
    "parse_pwa_csv",
    "format_pwa_csv",
    "read_pwa_csv",
    "write_pwa_csv",
    "config_to_dict",
    "config_from_dict",
    "read_config",
    "write_config",
    "map_to_dict",
    "map_from_dict",
    "nmap_to_dict",
    "nmap_from_dict",
    "dumps_json",
    "read_json",
    "fn_from_dict",
    "parse_ocv_csv",
    "parse_cycle_csv",
    "parse_schedule_csv",
    "format_schedule_csv",
    "parse_prices_csv",
    "format_solution_csv",
    "parse_solution_csv",
]

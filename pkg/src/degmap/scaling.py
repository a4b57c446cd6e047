"""Scaling of cell-level maps to battery systems and to normalized form.

A system of ``N_par`` strings of ``N_ser`` cells shares current and charge
evenly between strings, so its degradation (kW, energy capacity lost per
hour) is::

    J_deg = N_par * h(Q / N_par, I / N_par) * N_ser * V_oc

Dividing by the energy capacity gives a map over (E/C_E, P/C_E) that no
longer depends on N_par, N_ser or V_oc.

Maps are identified from current magnitudes, so the normalized map is
mirrored to negative power (charging and discharging wear the same).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidArgumentError
from .types import (
    BatteryConfig,
    CurrentGrid,
    DegradationMap,
    NormalizedMap,
    energy_capacity,
    symmetric_axis,
    unit_axis,
)

_CLAMP_TOL = 1e-12


class Evaluation(NamedTuple):
    """A degradation value and whether the query left the map's grid."""

    value: float
    clamped: bool


def _bracket(axis: np.ndarray, x):
    """Indices and weights for linear interpolation, clamping at both ends."""
    x = np.asarray(x, dtype=float)
    if axis.size == 1:
        zero = np.zeros(x.shape, dtype=int)
        return zero, zero, np.zeros(x.shape), np.abs(x - axis[0]) > _CLAMP_TOL * max(1.0, abs(axis[0]))
    span = max(1.0, abs(axis[-1]))
    clamped = (x < axis[0] - _CLAMP_TOL * span) | (x > axis[-1] + _CLAMP_TOL * span)
    xc = np.clip(x, axis[0], axis[-1])
    hi = np.clip(np.searchsorted(axis, xc, side="right"), 1, axis.size - 1)
    lo = hi - 1
    t = (xc - axis[lo]) / (axis[hi] - axis[lo])
    return lo, hi, t, clamped


def bilinear(x_axis, y_axis, values, x, y):
    """Bilinear interpolation of ``values[i, j]`` given on ``x_axis[i] x y_axis[j]``.

    Returns ``(result, clamped)`` where ``clamped`` marks queries outside the
    grid hull that were moved to the nearest edge.
    """
    x_axis = np.asarray(x_axis, dtype=float)
    y_axis = np.asarray(y_axis, dtype=float)
    i0, i1, s, cx = _bracket(x_axis, x)
    j0, j1, t, cy = _bracket(y_axis, y)
    v = np.asarray(values, dtype=float)
    out = (
        (1 - s) * (1 - t) * v[i0, j0]
        + s * (1 - t) * v[i1, j0]
        + (1 - s) * t * v[i0, j1]
        + s * t * v[i1, j1]
    )
    return out, cx | cy


def side_current_at(dmap: DegradationMap, q_c, i_c):
    """Interpolated side current (A) at absolute cell charge ``q_c`` and current ``i_c``."""
    soc = np.asarray(q_c, dtype=float) / dmap.cell_capacity_ah
    return bilinear(
        dmap.soc_grid.as_array(), dmap.current_grid.as_array(), dmap.side_current, soc, np.abs(i_c)
    )


def cell_degradation_energy(dmap: DegradationMap, q_c: float, i_c: float, v_oc_mean: float) -> Evaluation:
    """Cell energy-capacity loss rate in kW at charge ``q_c`` (Ah), current ``i_c`` (A)."""
    if not v_oc_mean > 0:
        raise InvalidArgumentError("mean OCV must be positive")
    h, clamped = side_current_at(dmap, q_c, i_c)
    return Evaluation(float(h) * v_oc_mean / 1000.0, bool(clamped))


def system_degradation(dmap: DegradationMap, config: BatteryConfig, q_abs: float, i_bat: float) -> Evaluation:
    """Energy-capacity loss rate (kW) of a sized system at charge ``q_abs`` and current ``i_bat``."""
    n_par = config.n_parallel
    h, clamped = side_current_at(dmap, q_abs / n_par, i_bat / n_par)
    value = n_par * float(h) * config.n_series * config.mean_ocv_v / 1000.0
    return Evaluation(value, bool(clamped))


def replicate(dmap: DegradationMap, n_parallel: int) -> DegradationMap:
    """Map of ``n_parallel`` identical cells in parallel, seen as one cell.

    Capacity, current axis and side currents all scale by ``n_parallel``;
    the SoC axis is unchanged.
    """
    if int(n_parallel) != n_parallel or n_parallel < 1:
        raise InvalidArgumentError("n_parallel must be a positive integer")
    lam = float(n_parallel)
    return DegradationMap(
        dmap.soc_grid,
        CurrentGrid(tuple(lam * r for r in dmap.current_grid.rates)),
        lam * dmap.side_current,
        lam * dmap.cell_capacity_ah,
    )


def normalize_map(
    dmap: DegradationMap, v_oc_mean: float, soe_samples: int = 21, power_samples: int = 21
) -> NormalizedMap:
    """Sample J_deg/C_E on a regular (E_n, P/C_E) grid.

    The SoE axis spans [0, 1]; the power axis spans +-(largest rate / C_Q)
    in 1/h and is exactly symmetric about zero. ``v_oc_mean`` only enters
    through the power and energy conversions and cancels in the result; it
    is validated but does not change the values.
    """
    if not v_oc_mean > 0:
        raise InvalidArgumentError("mean OCV must be positive")
    if soe_samples < 2 or power_samples < 2:
        raise InvalidArgumentError("need at least two samples per axis")
    c_q = dmap.cell_capacity_ah
    soe = unit_axis(soe_samples)
    power = symmetric_axis(dmap.current_grid.rates[-1] / c_q, power_samples)
    ee, pp = np.meshgrid(soe, power, indexing="ij")
    h, _ = side_current_at(dmap, ee * c_q, np.abs(pp) * c_q)
    return NormalizedMap(soe, power, h / c_q)


def eval_normalized(nmap: NormalizedMap, soe_n, p_ratio):
    """Bilinear lookup of a normalized map at (E_n, P/C_E); returns (value, clamped)."""
    return bilinear(nmap.soe_axis, nmap.power_axis, nmap.values, soe_n, p_ratio)


def system_degradation_normalized(nmap: NormalizedMap, config: BatteryConfig, e_kwh: float, p_kw: float) -> Evaluation:
    """Sized-system loss rate (kW) read from a normalized map."""
    c_e = energy_capacity(config)
    value, clamped = eval_normalized(nmap, e_kwh / c_e, p_kw / c_e)
    return Evaluation(float(value) * c_e, bool(clamped))


def power_of_current(config: BatteryConfig, i_bat: float) -> float:
    """System power in kW drawn at battery current ``i_bat``."""
    return i_bat * config.n_series * config.mean_ocv_v / 1000.0


def energy_of_charge(config: BatteryConfig, q_abs: float) -> float:
    """Stored energy in kWh at absolute charge ``q_abs``."""
    return q_abs * config.n_series * config.mean_ocv_v / 1000.0


__all__ = [
    "Evaluation",
    "bilinear",
    "side_current_at",
    "cell_degradation_energy",
    "system_degradation",
    "replicate",
    "normalize_map",
    "eval_normalized",
    "system_degradation_normalized",
    "power_of_current",
    "energy_of_charge",
]

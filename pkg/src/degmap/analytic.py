"""Discretization of closed-form degradation functions.

The supported form is the seven-coefficient polynomial in current magnitude
and open-circuit voltage::

    h(I, V) = b1 + b2 |I| + b3 V + b4 |I|^2 + b5 V^2 + b6 |I| V + b7 V^3

returning capacity loss in Ah/s. Voltage is replaced by SoC through a
monotone OCV curve before evaluation on a (SoC band, current) grid.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from .errors import InvalidArgumentError
from .types import CurrentGrid, DegradationMap, SocGrid

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class AnalyticDegradationFn:
    betas: Tuple[float, ...]

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if len(betas) != 7:
            raise InvalidArgumentError(f"expected 7 coefficients, got {len(betas)}")
        object.__setattr__(self, "betas", betas)


@dataclass(frozen=True)
class OcvCurve:
    """Open-circuit voltage (V) as a piecewise linear function of SoC."""

    soc_points: Tuple[float, ...]
    voltage_points: Tuple[float, ...]

    def __post_init__(self):
        soc = tuple(float(s) for s in self.soc_points)
        volts = tuple(float(v) for v in self.voltage_points)
        if len(soc) != len(volts) or len(soc) < 2:
            raise InvalidArgumentError("OCV curve needs at least two (soc, voltage) pairs")
        if soc[0] < 0 or soc[-1] > 1 or any(b <= a for a, b in zip(soc, soc[1:])):
            raise InvalidArgumentError("OCV SoC points must be strictly ascending within [0, 1]")
        if any(b < a for a, b in zip(volts, volts[1:])):
            raise InvalidArgumentError("OCV must be non-decreasing in SoC")
        object.__setattr__(self, "soc_points", soc)
        object.__setattr__(self, "voltage_points", volts)


class Discretization(NamedTuple):
    map: DegradationMap
    clamped: int


def eval_side_current(fn: AnalyticDegradationFn, i_bat, v_oc):
    """Evaluate the polynomial at current ``i_bat`` (A) and voltage ``v_oc`` (V).

    Works elementwise on arrays. Result in Ah/s.
    """
    b1, b2, b3, b4, b5, b6, b7 = fn.betas
    i = np.abs(i_bat)
    v = v_oc
    out = b1 + b2 * i + b3 * v + b4 * i * i + b5 * v * v + b6 * i * v + b7 * v * v * v
    return float(out) if np.ndim(out) == 0 else out


def ocv_of_soc(curve: OcvCurve, soc):
    soc_arr = np.asarray(soc, dtype=float)
    if np.any((soc_arr < 0) | (soc_arr > 1)) or not np.all(np.isfinite(soc_arr)):
        raise InvalidArgumentError(f"SoC must lie in [0, 1], got {soc!r}")
    v = np.interp(soc_arr, curve.soc_points, curve.voltage_points)
    return float(v) if v.ndim == 0 else v


def discretize(
    fn: AnalyticDegradationFn,
    curve: OcvCurve,
    soc_grid: SocGrid,
    current_grid: CurrentGrid,
    c_q: float,
) -> Discretization:
    """Sample the polynomial on band centres and current rates, in Ah/h.

    Negative samples are set to zero; their number is returned as
    ``clamped`` and a warning is emitted.
    """
    volts = ocv_of_soc(curve, soc_grid.as_array())
    vv, ii = np.meshgrid(volts, current_grid.as_array(), indexing="ij")
    values = SECONDS_PER_HOUR * eval_side_current(fn, ii, vv)
    negative = int(np.count_nonzero(values < 0))
    if negative:
        warnings.warn(f"{negative} negative side-current samples clamped to zero", stacklevel=2)
    return Discretization(
        DegradationMap(soc_grid, current_grid, np.maximum(values, 0.0), c_q), negative
    )


__all__ = [
    "AnalyticDegradationFn",
    "OcvCurve",
    "Discretization",
    "eval_side_current",
    "ocv_of_soc",
    "discretize",
    "SECONDS_PER_HOUR",
]

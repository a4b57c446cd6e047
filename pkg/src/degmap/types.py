"""Shared domain types, grids and unit conventions.

Units used everywhere in the package:

* current in A, charge in Ah, time in h
* power in kW, energy in kWh
* SoC and normalized SoE as fractions in [0, 1], DoD as a fraction in (0, 1]
* normalized map values (degradation per energy capacity) in 1/h

All types are immutable once built. Array fields are stored as read-only
numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidArgumentError


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise InvalidArgumentError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


def _strictly_increasing(arr: np.ndarray) -> bool:
    return bool(np.all(np.diff(arr) > 0))


@dataclass(frozen=True)
class SocGrid:
    """SoC band centres, fractions in the open interval (0, 1).

    Uniform grids come from :func:`uniform_soc_grid`; any strictly increasing
    set of centres is accepted.
    """

    band_centers: Tuple[float, ...]

    def __post_init__(self):
        centers = tuple(float(c) for c in self.band_centers)
        if not centers:
            raise InvalidArgumentError("SocGrid needs at least one band")
        if any(not 0.0 < c < 1.0 for c in centers):
            raise InvalidArgumentError(f"band centres must lie in (0, 1): {centers}")
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise InvalidArgumentError(f"band centres must be strictly increasing: {centers}")
        object.__setattr__(self, "band_centers", centers)

    @property
    def band_count(self) -> int:
        return len(self.band_centers)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.band_centers)


@dataclass(frozen=True)
class CurrentGrid:
    """Battery current magnitudes in A, strictly increasing and positive."""

    rates: Tuple[float, ...]

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        if not rates:
            raise InvalidArgumentError("CurrentGrid needs at least one rate")
        if any(not r > 0 for r in rates):
            raise InvalidArgumentError(f"current rates must be positive: {rates}")
        if any(b <= a for a, b in zip(rates, rates[1:])):
            raise InvalidArgumentError(f"current rates must be strictly increasing: {rates}")
        object.__setattr__(self, "rates", rates)

    @property
    def rate_count(self) -> int:
        return len(self.rates)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.rates)


@dataclass(frozen=True)
class RateBands:
    """Side currents identified on the native SoC bands of one current rate."""

    rate: float
    band_centers: Tuple[float, ...]
    side_current: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class DegradationMap:
    """Cell-level side current I_s (A, i.e. Ah lost per hour) over SoC x current.

    ``side_current[l, j]`` belongs to band ``soc_grid.band_centers[l]`` and rate
    ``current_grid.rates[j]``. When the map was identified from tests with
    differing SoC discretizations, ``per_rate_bands`` keeps the native axes and
    ``side_current`` is the linearly interpolated view on the union grid.
    """

    soc_grid: SocGrid
    current_grid: CurrentGrid
    side_current: np.ndarray
    cell_capacity_ah: float
    per_rate_bands: Optional[Tuple[RateBands, ...]] = None

    def __post_init__(self):
        values = _frozen_array(self.side_current, 2, "side_current")
        shape = (self.soc_grid.band_count, self.current_grid.rate_count)
        if values.shape != shape:
            raise InvalidArgumentError(f"side_current shape {values.shape} does not match grid {shape}")
        if np.any(values < 0):
            raise InvalidArgumentError("side currents must be nonnegative")
        if not self.cell_capacity_ah > 0:
            raise InvalidArgumentError("cell capacity must be positive")
        object.__setattr__(self, "side_current", values)
        object.__setattr__(self, "cell_capacity_ah", float(self.cell_capacity_ah))
        if self.per_rate_bands is not None:
            object.__setattr__(self, "per_rate_bands", tuple(self.per_rate_bands))

    def __eq__(self, other):
        if not isinstance(other, DegradationMap):
            return NotImplemented
        return (
            self.soc_grid == other.soc_grid
            and self.current_grid == other.current_grid
            and self.cell_capacity_ah == other.cell_capacity_ah
            and np.array_equal(self.side_current, other.side_current)
            and self.per_rate_bands == other.per_rate_bands
        )


@dataclass(frozen=True, eq=False)
class NormalizedMap:
    """Size-independent degradation map J_deg/C_E in 1/h.

    ``values[i, k]`` is taken at normalized SoE ``soe_axis[i]`` and
    power-to-capacity ratio ``power_axis[k]`` (1/h).
    """

    soe_axis: np.ndarray
    power_axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        soe = _frozen_array(self.soe_axis, 1, "soe_axis")
        power = _frozen_array(self.power_axis, 1, "power_axis")
        values = _frozen_array(self.values, 2, "values")
        if not (_strictly_increasing(soe) and _strictly_increasing(power)):
            raise InvalidArgumentError("map axes must be strictly increasing")
        if soe.size and (soe[0] < 0 or soe[-1] > 1):
            raise InvalidArgumentError("normalized SoE axis must lie in [0, 1]")
        if values.shape != (soe.size, power.size):
            raise InvalidArgumentError(
                f"values shape {values.shape} does not match axes ({soe.size}, {power.size})"
            )
        if np.any(values < 0):
            raise InvalidArgumentError("normalized map values must be nonnegative")
        object.__setattr__(self, "soe_axis", soe)
        object.__setattr__(self, "power_axis", power)
        object.__setattr__(self, "values", values)

    def nodes(self) -> np.ndarray:
        """Return an (N, 3) array of (power/C_E, E_n, value) rows."""
        yy, xx = np.meshgrid(self.soe_axis, self.power_axis, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel(), self.values.ravel()])

    def __eq__(self, other):
        if not isinstance(other, NormalizedMap):
            return NotImplemented
        return (
            np.array_equal(self.soe_axis, other.soe_axis)
            and np.array_equal(self.power_axis, other.power_axis)
            and np.array_equal(self.values, other.values)
        )


Plane = Tuple[float, float, float]


@dataclass(frozen=True)
class PwaMap:
    """Convex piecewise affine map, the max over planes of a1*x + a2*y + a3.

    ``a1`` multiplies P/C_E (dimensionless result per 1/h), ``a2`` multiplies
    the normalized SoE (1/h) and ``a3`` is the offset (1/h).
    """

    planes: Tuple[Plane, ...]

    def __post_init__(self):
        planes = tuple(tuple(float(a) for a in p) for p in self.planes)
        if not planes:
            raise InvalidArgumentError("PwaMap needs at least one plane")
        if any(len(p) != 3 for p in planes):
            raise InvalidArgumentError("each plane must have three coefficients")
        if not all(np.isfinite(p).all() for p in planes):
            raise InvalidArgumentError("plane coefficients must be finite")
        object.__setattr__(self, "planes", planes)

    def __len__(self):
        return len(self.planes)

    def as_array(self) -> np.ndarray:
        return np.array(self.planes, dtype=float)


@dataclass(frozen=True)
class BatteryConfig:
    """Battery system of ``n_parallel`` strings with ``n_series`` cells each."""

    n_parallel: int
    n_series: int
    mean_ocv_v: float
    cell_capacity_ah: float

    def __post_init__(self):
        for name in ("n_parallel", "n_series"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise InvalidArgumentError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not self.mean_ocv_v > 0 or not self.cell_capacity_ah > 0:
            raise InvalidArgumentError("mean OCV and cell capacity must be positive")
        object.__setattr__(self, "mean_ocv_v", float(self.mean_ocv_v))
        object.__setattr__(self, "cell_capacity_ah", float(self.cell_capacity_ah))

    @property
    def energy_capacity_kwh(self) -> float:
        return energy_capacity(self)


def uniform_soc_grid(n_bd: int) -> SocGrid:
    """Return ``n_bd`` equally wide SoC bands with centres (2l - 1) / (2 n_bd)."""
    if isinstance(n_bd, bool) or int(n_bd) != n_bd or n_bd < 1:
        raise InvalidArgumentError(f"band count must be a positive integer, got {n_bd!r}")
    n_bd = int(n_bd)
    return SocGrid(tuple((2 * l - 1) / (2 * n_bd) for l in range(1, n_bd + 1)))


def energy_capacity(config: BatteryConfig) -> float:
    """Energy capacity N_par * C_Q * N_ser * V_oc of a battery system in kWh."""
    return (
        config.n_parallel * config.cell_capacity_ah * config.n_series * config.mean_ocv_v / 1000.0
    )


def symmetric_axis(limit: float, samples: int) -> np.ndarray:
    """Axis on [-limit, limit] whose entries are exact negations of each other."""
    if samples < 2:
        raise InvalidArgumentError("an axis needs at least two samples")
    steps = np.arange(samples, dtype=float) * 2 - (samples - 1)
    axis = limit * (steps / (samples - 1))
    axis.setflags(write=False)
    return axis


def unit_axis(samples: int) -> np.ndarray:
    if samples < 2:
        raise InvalidArgumentError("an axis needs at least two samples")
    axis = np.arange(samples, dtype=float) / (samples - 1)
    axis.setflags(write=False)
    return axis


def as_planes(rows: Sequence[Sequence[float]]) -> PwaMap:
    return PwaMap(tuple(tuple(r) for r in rows))


__all__ = [
    "SocGrid",
    "CurrentGrid",
    "RateBands",
    "DegradationMap",
    "NormalizedMap",
    "PwaMap",
    "Plane",
    "BatteryConfig",
    "uniform_soc_grid",
    "energy_capacity",
    "symmetric_axis",
    "unit_axis",
    "as_planes",
]

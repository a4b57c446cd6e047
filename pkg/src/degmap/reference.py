"""Published PWA degradation maps for three lithium-ion chemistries.

The bundled CSVs hold the appendix plane tables in canonical float form;
``data/raw/`` keeps the verbatim transcription for audit. Set
``DEGMAP_DATA_DIR`` to load the tables from another directory.
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .convexify import eval_pwa, is_convex
from .errors import InvalidArgumentError, InvalidTrajectoryError, NotFoundError
from .io import Schedule, parse_pwa_csv
from .types import BatteryConfig, PwaMap, energy_capacity

CHEMISTRIES: Dict[str, Tuple[str, str]] = {
    "LFP": ("LiFePO4", "analytic capacity-fade function of an A123 LiFePO4 cell (Forman et al.)"),
    "NMC_LMO": ("LiMnNiCo/LiMn2O4", "cycle-test data of a blended-cathode cell (Wang et al.)"),
    "LCO": ("LiCoO2", "DUALFOIL electrochemical cell model, identified online"),
}
EXPECTED_PLANES = {"LFP": 18, "NMC_LMO": 12, "LCO": 13}


@dataclass(frozen=True)
class ReferenceChemistry:
    id: str
    cathode: str
    pwa: PwaMap
    provenance: str


def data_dir() -> Path:
    override = os.environ.get("DEGMAP_DATA_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("degmap") / "data"))


def _normalize_id(chem_id: str) -> str:
    key = chem_id.strip().upper().replace("/", "_").replace("-", "_")
    if key not in CHEMISTRIES:
        raise NotFoundError(f"unknown chemistry {chem_id!r}; known: {', '.join(CHEMISTRIES)}")
    return key


@lru_cache(maxsize=None)
def _load(key: str, directory: str) -> ReferenceChemistry:
    path = Path(directory) / f"{key.lower()}.csv"
    if not path.exists():
        raise NotFoundError(f"reference table {path} not found")
    pwa = parse_pwa_csv(path.read_text())
    if not is_convex(pwa):
        raise InvalidArgumentError(f"reference map {key} failed the midpoint convexity check")
    cathode, provenance = CHEMISTRIES[key]
    return ReferenceChemistry(key, cathode, pwa, provenance)


def load_reference(chem_id: str) -> ReferenceChemistry:
    """Load a bundled chemistry by id (``LFP``, ``NMC_LMO`` or ``LCO``, any case)."""
    return _load(_normalize_id(chem_id), str(data_dir()))


def has_sign_pairs(pwa: PwaMap, tol: float = 0.0) -> bool:
    """True if every plane (a1, a2, a3) has a partner (-a1, a2, a3)."""
    arr = pwa.as_array()
    for a1, a2, a3 in arr:
        mirror = np.abs(arr - (-a1, a2, a3)).max(axis=1) <= tol
        if not np.any(mirror):
            return False
    return True


def cumulative_fade(pwa: PwaMap, c_e: float, schedule: Schedule, dt: Optional[float] = None) -> float:
    """Capacity lost (kWh) over ``schedule`` by the rectangle rule.

    Sample ``k`` is held for one time step, so a schedule of ``n`` samples
    covers ``n * dt`` hours. ``dt`` is inferred from ``t_h`` when omitted.
    Negative loss rates are summed as they are, with a warning.
    """
    n = len(schedule)
    if n == 0:
        return 0.0
    if dt is None:
        if n < 2:
            raise InvalidTrajectoryError("cannot infer the time step from a single sample; pass dt")
        steps = np.diff(schedule.t_h)
        dt = float(steps[0])
        if dt <= 0 or not np.allclose(steps, dt, rtol=1e-9, atol=0.0):
            raise InvalidTrajectoryError("schedule time steps must be uniform and positive")
    e = schedule.e_kwh
    if np.any(e < 0) or np.any(e > c_e):
        bad = int(np.flatnonzero((e < 0) | (e > c_e))[0])
        raise InvalidTrajectoryError(f"SoE {e[bad]} kWh at sample {bad} is outside [0, {c_e}]")
    rates = np.array([eval_pwa(pwa, p, ek, c_e).value for p, ek in zip(schedule.p_kw, e)])
    negative = int(np.count_nonzero(rates < 0))
    if negative:
        # published surfaces dip below zero off their support; reported, not clamped
        warnings.warn(f"{negative} of {n} samples have a negative loss rate", stacklevel=2)
    return float(dt * np.sum(rates))


def compare_chemistries(
    configs: Sequence[Tuple[ReferenceChemistry, BatteryConfig]],
    schedule: Schedule,
    dt: Optional[float] = None,
) -> Dict[str, float]:
    """Cumulative fade (kWh) of each chemistry/config pair on the same schedule."""
    return {
        chem.id: cumulative_fade(chem.pwa, energy_capacity(config), schedule, dt)
        for chem, config in configs
    }


__all__ = [
    "CHEMISTRIES",
    "EXPECTED_PLANES",
    "ReferenceChemistry",
    "data_dir",
    "load_reference",
    "has_sign_pairs",
    "cumulative_fade",
    "compare_chemistries",
]

"""Grid dumps of normalized maps and PWA surfaces for external plotting."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .convexify import eval_pwa
from .errors import InvalidArgumentError
from .io import fmt
from .scaling import eval_normalized
from .types import NormalizedMap, PwaMap, symmetric_axis, unit_axis


@dataclass(frozen=True, eq=False)
class PlotSurfaceDump:
    """Surface sampled on a tensor grid; ``z[i, j]`` sits at ``(x[j], y[i])``."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    labels: Tuple[str, str, str] = ("p_over_ce_per_h", "soe_n", "value_per_h")

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if z.shape != (y.size, x.size):
            raise InvalidArgumentError(f"z has shape {z.shape}, axes need {(y.size, x.size)}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def rows(self) -> np.ndarray:
        """(x, y, z) triples, x varying fastest."""
        xx, yy = np.meshgrid(self.x, self.y)
        return np.column_stack([xx.ravel(), yy.ravel(), self.z.ravel()])

    def to_csv(self) -> str:
        lines = [",".join(self.labels)]
        lines.extend(",".join(fmt(v) for v in row) for row in self.rows())
        return "\n".join(lines) + "\n"

    def to_gnuplot(self) -> str:
        """Whitespace columns with a blank line after each scan line, for ``splot``."""
        lines = ["# " + " ".join(self.labels)]
        for i, yv in enumerate(self.y):
            lines.extend(f"{fmt(xv)} {fmt(yv)} {fmt(zv)}" for xv, zv in zip(self.x, self.z[i]))
            lines.append("")
        return "\n".join(lines) + "\n"


def dump_surface(
    source: Union[NormalizedMap, PwaMap],
    power_samples: int = 21,
    soe_samples: int = 21,
    power_limit: Optional[float] = None,
) -> PlotSurfaceDump:
    """Sample a normalized map (bilinear) or a PWA surface (C_E = 1) on a grid.

    The power axis is symmetric, spanning ``+-power_limit`` (1/h); it defaults
    to the map's own range, or to 1 for a PWA surface. The SoE axis spans [0, 1].
    """
    if power_samples < 2 or soe_samples < 2:
        raise InvalidArgumentError("need at least two samples per axis")
    if power_limit is None:
        power_limit = float(source.power_axis[-1]) if isinstance(source, NormalizedMap) else 1.0
    if not power_limit > 0:
        raise InvalidArgumentError("power limit must be positive")
    x = symmetric_axis(power_limit, power_samples)
    y = unit_axis(soe_samples)
    if isinstance(source, NormalizedMap):
        xx, yy = np.meshgrid(x, y)
        z, _ = eval_normalized(source, yy, xx)
    elif isinstance(source, PwaMap):
        z = np.array([[eval_pwa(source, xv, yv, 1.0).value for xv in x] for yv in y])
    else:
        raise InvalidArgumentError(f"cannot dump {type(source).__name__}")
    return PlotSurfaceDump(x, y, z)


__all__ = ["PlotSurfaceDump", "dump_surface"]

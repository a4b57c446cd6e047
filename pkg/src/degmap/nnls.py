"""Nonnegative least squares identification of discretized side currents."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidArgumentError, SolverFailure
from .patterns import PatternSystem
from .types import CurrentGrid, DegradationMap, RateBands, SocGrid

DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class NnlsSolution:
    x: np.ndarray
    residual_norm: float
    active_set: Tuple[int, ...]
    iterations: int


def nnls(matrix, rhs, tol: float = DEFAULT_TOL, max_iter: Optional[int] = None) -> NnlsSolution:
    """Minimize ``||matrix @ x - rhs||_2`` subject to ``x >= 0``.

    Lawson-Hanson active set method run on a copy of the problem whose
    columns have unit norm and whose right-hand side has unit norm, so that
    ``tol`` bounds the scaled gradient. The solution is returned in the
    original units.

    Parameters
    ----------
    matrix : array_like, shape (m, n)
    rhs : array_like, shape (m,)
    tol : float
        KKT tolerance on the scaled gradient.
    max_iter : int, optional
        Cap on passive-set changes, ``10 * n`` by default.

    Returns
    -------
    NnlsSolution
        ``active_set`` holds the indices clamped at zero.

    Raises
    ------
    SolverFailure
        The iteration cap was hit before the KKT conditions held.
    """
    A = np.array(matrix, dtype=float)
    b = np.array(rhs, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise InvalidArgumentError("matrix must be a non-empty 2-D array")
    if b.shape != (A.shape[0],):
        raise InvalidArgumentError("rhs length must equal the matrix row count")
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    m, n = A.shape
    if max_iter is None:
        max_iter = 10 * n

    col_scale = np.linalg.norm(A, axis=0)
    col_scale[col_scale == 0] = 1.0
    b_scale = np.linalg.norm(b) or 1.0
    As = A / col_scale
    bs = b / b_scale

    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = As.T @ bs
    iterations = 0

    def passive_lstsq():
        z = np.zeros(n)
        idx = np.flatnonzero(passive)
        z[idx] = np.linalg.lstsq(As[:, idx], bs, rcond=None)[0]
        return z

    while np.any(~passive) and np.max(np.where(passive, -np.inf, w)) > tol:
        if iterations >= max_iter:
            raise SolverFailure(
                f"NNLS did not converge in {max_iter} iterations",
                iterations=iterations,
                diagnostics={"max_gradient": float(np.max(np.where(passive, -np.inf, w)))},
            )
        t = int(np.argmax(np.where(passive, -np.inf, w)))
        passive[t] = True
        z = passive_lstsq()
        if z[t] <= 0:
            # rounding made the entering column useless; drop it for this pass
            passive[t] = False
            w[t] = 0.0
            iterations += 1
            continue
        while np.any(z[passive] <= 0):
            iterations += 1
            if iterations >= max_iter:
                raise SolverFailure(
                    f"NNLS inner loop did not converge in {max_iter} iterations",
                    iterations=iterations,
                )
            blocking = np.flatnonzero(passive & (z <= 0))
            ratios = x[blocking] / (x[blocking] - z[blocking])
            k = int(np.argmin(ratios))
            x = x + ratios[k] * (z - x)
            x[blocking[k]] = 0.0
            passive &= x > 0
            x[~passive] = 0.0
            z = passive_lstsq()
        x = z
        iterations += 1
        w = As.T @ (bs - As @ x)

    x_out = x * b_scale / col_scale
    x_out[~passive] = 0.0
    residual = float(np.linalg.norm(A @ x_out - b))
    return NnlsSolution(x_out, residual, tuple(int(i) for i in np.flatnonzero(~passive)), iterations)


def solve_nnls(system: PatternSystem, tol: float = DEFAULT_TOL) -> NnlsSolution:
    """Identify side currents of a pattern system with ``I_s >= 0``."""
    return nnls(system.matrix, system.rhs, tol)


def kkt_violation(matrix, rhs, x) -> float:
    """Largest KKT violation of ``x`` for the NNLS problem, in scaled units.

    Uses the same column and rhs scaling as :func:`nnls`: free coordinates
    must have zero gradient, clamped ones a nonpositive descent direction.
    """
    A = np.asarray(matrix, dtype=float)
    b = np.asarray(rhs, dtype=float)
    x = np.asarray(x, dtype=float)
    col_scale = np.linalg.norm(A, axis=0)
    col_scale[col_scale == 0] = 1.0
    b_scale = np.linalg.norm(b) or 1.0
    g = (A / col_scale).T @ (b / b_scale - (A / col_scale) @ (x * col_scale / b_scale))
    free = x > 0
    worst = 0.0
    if np.any(free):
        worst = float(np.max(np.abs(g[free])))
    if np.any(~free):
        worst = max(worst, float(np.max(g[~free])))
    return max(worst, float(-np.min(x, initial=0.0)))


def _merge_axes(axes):
    merged = sorted({round(c, 12) for axis in axes for c in axis})
    return tuple(merged)


def solve_map(
    system: PatternSystem, tol: float = DEFAULT_TOL, cell_capacity_ah: Optional[float] = None
) -> DegradationMap:
    """Solve a pattern system and arrange the side currents as a map.

    Unknowns are grouped per current rate using the column labels. If rates
    were identified on different SoC bands, the map keeps every native axis
    in ``per_rate_bands`` and its matrix is the linear interpolation (clamped
    at the ends) of each rate onto the union of all band centres.
    """
    capacity = cell_capacity_ah if cell_capacity_ah is not None else system.cell_capacity_ah
    if capacity is None:
        raise InvalidArgumentError("cell capacity is unknown; pass cell_capacity_ah")
    solution = solve_nnls(system, tol)
    per_rate: dict = {}
    for (soc, rate), value in zip(system.column_labels, solution.x):
        per_rate.setdefault(rate, []).append((soc, float(value)))
    rates = sorted(per_rate)
    native = []
    for rate in rates:
        pairs = sorted(per_rate[rate])
        native.append(RateBands(rate, tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)))

    union = _merge_axes(nb.band_centers for nb in native)
    uniform_axes = all(
        tuple(round(c, 12) for c in nb.band_centers) == union for nb in native
    )
    grid = SocGrid(union)
    values = np.column_stack(
        [np.interp(union, nb.band_centers, nb.side_current) for nb in native]
    )
    return DegradationMap(
        grid,
        CurrentGrid(tuple(rates)),
        np.maximum(values, 0.0),
        capacity,
        None if uniform_axes else tuple(native),
    )


__all__ = ["NnlsSolution", "nnls", "solve_nnls", "kkt_violation", "solve_map", "DEFAULT_TOL"]

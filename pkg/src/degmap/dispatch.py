"""Price-arbitrage dispatch of one battery with a PWA degradation cost.

The convex PWA cost enters the LP through its epigraph: one variable J_t per
step, constrained above every plane,

    J_t >= a1_k * P_t + a2_k * E_t + a3_k * C_E     for every plane k,

and charged at ``degradation_price`` per kWh of lost capacity. Minimization
pushes J_t down onto the max over planes whenever that price is positive.

Variable layout (N steps): charge power Pc_t >= 0, discharge power
Pd_t >= 0, SoE after each step E_{t+1} in [0, C_E], then J_t (free).
Net power is P_t = Pc_t - Pd_t (positive = charging) and
E_{t+1} = E_t + dt * (eta_c * Pc_t - Pd_t / eta_d).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .convexify import eval_pwa
from .errors import InvalidArgumentError
from .simplex import linprog
from .types import PwaMap

MAX_STEPS = 8760
MAX_PLANES = 64


@dataclass(frozen=True, eq=False)
class DispatchProblem:
    prices: np.ndarray
    dt: float
    p_min: float
    p_max: float
    e0: float
    c_e: float
    eta_c: float
    eta_d: float
    pwa: Optional[PwaMap]
    degradation_price: float

    def __post_init__(self):
        prices = np.array(self.prices, dtype=float).ravel()
        prices.setflags(write=False)
        object.__setattr__(self, "prices", prices)
        if not 1 <= prices.size <= MAX_STEPS:
            raise InvalidArgumentError(f"horizon must have 1..{MAX_STEPS} steps")
        if not self.dt > 0:
            raise InvalidArgumentError("time step must be positive")
        if not self.p_min <= 0 <= self.p_max:
            raise InvalidArgumentError("power limits must bracket zero")
        if not self.c_e > 0 or not 0 <= self.e0 <= self.c_e:
            raise InvalidArgumentError("initial SoE must lie in [0, C_E] with C_E > 0")
        if not (0 < self.eta_c <= 1 and 0 < self.eta_d <= 1):
            raise InvalidArgumentError("efficiencies must lie in (0, 1]")
        if self.pwa is not None and len(self.pwa) > MAX_PLANES:
            raise InvalidArgumentError(f"at most {MAX_PLANES} planes are supported")
        if self.degradation_price < 0:
            raise InvalidArgumentError("degradation price must be nonnegative")

    @property
    def horizon(self) -> int:
        return self.prices.size


@dataclass(frozen=True, eq=False)
class LinearProgram:
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    bounds: Tuple[Tuple[float, float], ...]
    problem: DispatchProblem

    @property
    def epigraph_rows(self) -> int:
        return self.A_ub.shape[0]


@dataclass(frozen=True, eq=False)
class DispatchSolution:
    """Optimal schedule. ``soe[t]`` is the SoE at the start of step ``t``."""

    power: np.ndarray
    charge: np.ndarray
    discharge: np.ndarray
    soe: np.ndarray
    soe_final: float
    deg_cost_rate: np.ndarray
    objective: float
    simultaneous: Tuple[int, ...]
    duality_gap: float


def _slices(n: int, with_epigraph: bool):
    pc = slice(0, n)
    pd = slice(n, 2 * n)
    e = slice(2 * n, 3 * n)
    j = slice(3 * n, 4 * n) if with_epigraph else None
    return pc, pd, e, j


def build_lp(prob: DispatchProblem) -> LinearProgram:
    """Assemble the dispatch LP; with ``pwa=None`` the epigraph part is left out."""
    n = prob.horizon
    dt = prob.dt
    with_epi = prob.pwa is not None
    pc, pd, e, j = _slices(n, with_epi)
    nvar = 4 * n if with_epi else 3 * n

    c = np.zeros(nvar)
    c[pc] = dt * prob.prices
    c[pd] = -dt * prob.prices
    if with_epi:
        c[j] = dt * prob.degradation_price

    A_eq = np.zeros((n, nvar))
    b_eq = np.zeros(n)
    for t in range(n):
        A_eq[t, e.start + t] = 1.0
        if t > 0:
            A_eq[t, e.start + t - 1] = -1.0
        else:
            b_eq[t] = prob.e0
        A_eq[t, pc.start + t] = -dt * prob.eta_c
        A_eq[t, pd.start + t] = dt / prob.eta_d

    if with_epi:
        planes = prob.pwa.as_array()
        k = planes.shape[0]
        A_ub = np.zeros((n * k, nvar))
        b_ub = np.zeros(n * k)
        for t in range(n):
            rows = slice(t * k, (t + 1) * k)
            A_ub[rows, pc.start + t] = planes[:, 0]
            A_ub[rows, pd.start + t] = -planes[:, 0]
            A_ub[rows, j.start + t] = -1.0
            b_ub[rows] = -planes[:, 2] * prob.c_e
            if t > 0:
                A_ub[rows, e.start + t - 1] = planes[:, 1]
            else:
                b_ub[rows] -= planes[:, 1] * prob.e0
    else:
        A_ub = np.zeros((0, nvar))
        b_ub = np.zeros(0)

    bounds = (
        [(0.0, prob.p_max)] * n
        + [(0.0, -prob.p_min)] * n
        + [(0.0, prob.c_e)] * n
        + ([(-np.inf, np.inf)] * n if with_epi else [])
    )
    return LinearProgram(c, A_ub, b_ub, A_eq, b_eq, tuple(bounds), prob)


def solve_lp(lp: LinearProgram, tol: float = 1e-7) -> DispatchSolution:
    """Solve a dispatch LP with the built-in simplex.

    Raises :class:`~degmap.errors.InfeasibleError` or
    :class:`~degmap.errors.UnboundedError` from the solver.
    """
    prob = lp.problem
    res = linprog(lp.c, lp.A_ub, lp.b_ub, lp.A_eq, lp.b_eq, lp.bounds)
    n = prob.horizon
    pc, pd, e, j = _slices(n, prob.pwa is not None)
    charge, discharge = res.x[pc], res.x[pd]
    after = res.x[e]
    soe = np.concatenate([[prob.e0], after[:-1]])
    power = charge - discharge
    if j is not None:
        deg = res.x[j]
    else:
        deg = np.zeros(n)
    both = tuple(int(t) for t in np.flatnonzero((charge > tol) & (discharge > tol)))
    return DispatchSolution(
        power, charge, discharge, soe, float(after[-1]), deg, res.fun, both, res.duality_gap
    )


def dispatch(prob: DispatchProblem) -> DispatchSolution:
    return solve_lp(build_lp(prob))


def epigraph_gap(prob: DispatchProblem, sol: DispatchSolution) -> np.ndarray:
    """``J_t - max_k plane_k(P_t, E_t, C_E)`` per step; nonnegative when feasible."""
    if prob.pwa is None:
        return np.zeros(prob.horizon)
    exact = np.array([eval_pwa(prob.pwa, p, e, prob.c_e).value for p, e in zip(sol.power, sol.soe)])
    return sol.deg_cost_rate - exact


__all__ = [
    "MAX_STEPS",
    "MAX_PLANES",
    "DispatchProblem",
    "LinearProgram",
    "DispatchSolution",
    "build_lp",
    "solve_lp",
    "dispatch",
    "epigraph_gap",
]

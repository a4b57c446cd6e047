"""Dense two-phase primal simplex for small linear programs.

Solves::

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                lo <= x <= hi

Bounds are folded into a standard-form problem (nonnegative variables,
equality rows). Entering columns follow Dantzig's rule; after a run of
degenerate pivots the solver switches to Bland's rule for the rest of the
phase, which rules out cycling. All ties break on the lowest index, so runs
are deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InfeasibleError, InvalidArgumentError, SolverFailure, UnboundedError

PIVOT_TOL = 1e-9
OPT_TOL = 1e-10
FEAS_TOL = 1e-9
DEGENERATE_RUN = 30
REFRESH_EVERY = 50


@dataclass(frozen=True, eq=False)
class LPResult:
    x: np.ndarray
    fun: float
    iterations: int
    duality_gap: float
    used_bland: bool


@dataclass
class _Standard:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    offset: float
    # per original variable: (kind, column(s), shift)
    mapping: List[Tuple[str, Tuple[int, ...], float]]
    n_orig: int
    row_origin: List[Tuple[str, int]]
    n_struct: int


def _to_standard(c, A_ub, b_ub, A_eq, b_eq, bounds) -> _Standard:
    n = c.size
    cols: List[np.ndarray] = []
    cost: List[float] = []
    mapping = []
    offset = 0.0
    extra_rows = []  # (column index, upper limit) for finite two-sided bounds
    eff_bub = b_ub.copy()
    eff_beq = b_eq.copy()

    def add_col(ub_col, eq_col, cj):
        cols.append((ub_col, eq_col))
        cost.append(cj)
        return len(cols) - 1

    for j in range(n):
        lo, hi = bounds[j]
        a_ub, a_eq = A_ub[:, j], A_eq[:, j]
        if np.isfinite(lo):
            eff_bub -= a_ub * lo
            eff_beq -= a_eq * lo
            offset += c[j] * lo
            k = add_col(a_ub, a_eq, c[j])
            mapping.append(("shift", (k,), lo))
            if np.isfinite(hi):
                extra_rows.append((k, hi - lo))
        elif np.isfinite(hi):
            eff_bub -= a_ub * hi
            eff_beq -= a_eq * hi
            offset += c[j] * hi
            k = add_col(-a_ub, -a_eq, -c[j])
            mapping.append(("mirror", (k,), hi))
        else:
            kp = add_col(a_ub, a_eq, c[j])
            km = add_col(-a_ub, -a_eq, -c[j])
            mapping.append(("free", (kp, km), 0.0))

    nv = len(cols)
    m_ub, m_eq, m_bd = A_ub.shape[0], A_eq.shape[0], len(extra_rows)
    n_slack = m_ub + m_bd
    A = np.zeros((m_ub + m_bd + m_eq, nv + n_slack))
    b = np.zeros(m_ub + m_bd + m_eq)
    for k, (ub_col, eq_col) in enumerate(cols):
        A[:m_ub, k] = ub_col
        A[m_ub + m_bd:, k] = eq_col
    A[:m_ub, nv:nv + m_ub] = np.eye(m_ub)
    b[:m_ub] = eff_bub
    for r, (k, width) in enumerate(extra_rows):
        A[m_ub + r, k] = 1.0
        A[m_ub + r, nv + m_ub + r] = 1.0
        b[m_ub + r] = width
    b[m_ub + m_bd:] = eff_beq
    origin = [("ub", i) for i in range(m_ub)] + [("bound", k) for k, _ in extra_rows] + [
        ("eq", i) for i in range(m_eq)
    ]
    c_std = np.concatenate([np.array(cost, dtype=float), np.zeros(n_slack)])
    return _Standard(A, b, c_std, offset, mapping, n, origin, nv)


def _recover(std: _Standard, z: np.ndarray) -> np.ndarray:
    x = np.zeros(std.n_orig)
    for j, (kind, ks, shift) in enumerate(std.mapping):
        if kind == "shift":
            x[j] = shift + z[ks[0]]
        elif kind == "mirror":
            x[j] = shift - z[ks[0]]
        else:
            x[j] = z[ks[0]] - z[ks[1]]
    return x


def _direction(std: _Standard, dz: np.ndarray) -> np.ndarray:
    d = np.zeros(std.n_orig)
    for j, (kind, ks, _) in enumerate(std.mapping):
        if kind == "shift":
            d[j] = dz[ks[0]]
        elif kind == "mirror":
            d[j] = -dz[ks[0]]
        else:
            d[j] = dz[ks[0]] - dz[ks[1]]
    return d


class _Tableau:
    """Dense tableau over ``[A | b]`` with the cost row last.

    Every ``REFRESH_EVERY`` pivots, and before optimality is declared, the
    tableau is rebuilt from the original data for the current basis so that
    rounding errors cannot accumulate across long pivot sequences.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, cost: np.ndarray, basis: List[int], max_iter: int):
        self.A = A
        self.b = b
        self.cost = cost
        self.basis = basis
        self.T = np.zeros((A.shape[0] + 1, A.shape[1] + 1))
        self.iterations = 0
        self.max_iter = max_iter
        self.used_bland = False
        self.refresh()

    def refresh(self):
        T, m = self.T, self.A.shape[0]
        if m:
            B = self.A[:, self.basis]
            T[:m, :-1] = np.linalg.solve(B, self.A)
            rhs = np.linalg.solve(B, self.b)
            # rounding can leave a degenerate basic value marginally negative
            floor = -FEAS_TOL * max(1.0, float(np.abs(rhs).max()))
            T[:m, -1] = np.where((rhs < 0) & (rhs > floor), 0.0, rhs)
        cb = self.cost[self.basis]
        T[-1, :-1] = self.cost - cb @ T[:m, :-1]
        T[-1, -1] = -cb @ T[:m, -1]
        T[:m, self.basis] = np.eye(m)
        T[-1, self.basis] = 0.0

    def pivot(self, r: int, k: int):
        T = self.T
        T[r] /= T[r, k]
        col = T[:, k].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, k] = 0.0
        T[r, k] = 1.0
        self.basis[r] = k

    def run(self, allowed: np.ndarray) -> Optional[int]:
        """Iterate to optimality; return an unbounded entering column or None."""
        T = self.T
        m = T.shape[0] - 1
        bland = False
        degenerate = 0
        since_refresh = 0
        while True:
            rc = T[-1, :-1]
            scale = max(1.0, float(np.max(np.abs(rc[allowed]))) if np.any(allowed) else 1.0)
            candidates = np.flatnonzero(allowed & (rc < -OPT_TOL * scale))
            if candidates.size == 0:
                if since_refresh == 0:
                    return None
                self.refresh()
                since_refresh = 0
                continue
            if self.iterations >= self.max_iter:
                raise SolverFailure(
                    f"simplex hit the iteration cap of {self.max_iter}",
                    iterations=self.iterations,
                )
            if bland:
                k = int(candidates[0])
            else:
                k = int(candidates[np.argmin(rc[candidates])])
            column = T[:m, k]
            rows = np.flatnonzero(column > PIVOT_TOL * max(1.0, float(np.max(np.abs(column), initial=0.0))))
            if rows.size == 0:
                if since_refresh == 0:
                    return k
                self.refresh()
                since_refresh = 0
                continue
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            if bland:
                r = int(min(ties, key=lambda i: self.basis[i]))
            else:
                r = int(ties[np.argmax(column[ties])])
            if best <= 1e-12:
                degenerate += 1
                if degenerate >= DEGENERATE_RUN and not bland:
                    bland = True
                    self.used_bland = True
            else:
                degenerate = 0
            self.pivot(r, k)
            self.iterations += 1
            since_refresh += 1
            if since_refresh >= REFRESH_EVERY:
                self.refresh()
                since_refresh = 0


def linprog(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    bounds: Optional[Sequence[Tuple[float, float]]] = None,
    max_iter: Optional[int] = None,
) -> LPResult:
    """Solve a small dense LP to optimality.

    ``bounds`` defaults to ``(0, inf)`` for every variable; use ``-np.inf`` /
    ``np.inf`` (or None) for missing bounds.

    Raises
    ------
    InfeasibleError
        Phase one ends with positive artificial variables; ``certificate``
        holds the residual infeasibility and the offending rows.
    UnboundedError
        ``ray`` is a feasible direction along which the objective decreases.
    SolverFailure
        Iteration cap reached.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if A_ub.shape != (b_ub.size, n) or A_eq.shape != (b_eq.size, n):
        raise InvalidArgumentError("constraint matrix shapes do not match")
    if bounds is None:
        bounds = [(0.0, np.inf)] * n
    bounds = [
        (-np.inf if lo is None else float(lo), np.inf if hi is None else float(hi)) for lo, hi in bounds
    ]
    if len(bounds) != n:
        raise InvalidArgumentError("one (lo, hi) pair per variable is required")
    for j, (lo, hi) in enumerate(bounds):
        if lo > hi:
            raise InfeasibleError(f"variable {j} has lower bound {lo} above upper bound {hi}",
                                  {"bound_conflict": [j]})

    std = _to_standard(c, A_ub, b_ub, A_eq, b_eq, bounds)
    A, b = std.A.copy(), std.b.copy()
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    m, nz = A.shape
    if max_iter is None:
        max_iter = 50 * (m + nz) + 100

    # reuse +1 slack columns as the starting basis where possible
    basis = [-1] * m
    for i in range(m):
        slack = np.flatnonzero(A[i, std.n_struct:] == 1.0)
        if slack.size:
            basis[i] = int(std.n_struct + slack[0])
    need = [i for i in range(m) if basis[i] < 0]

    # equilibrate: unit max-norm rows, then unit max-norm columns
    row_max = np.max(np.abs(A), axis=1, initial=0.0)
    row_s = np.where(row_max > 0, 1.0 / np.where(row_max > 0, row_max, 1.0), 1.0)
    A = A * row_s[:, None]
    b = b * row_s
    col_max = np.max(np.abs(A), axis=0, initial=0.0)
    col_s = np.where(col_max > 0, 1.0 / np.where(col_max > 0, col_max, 1.0), 1.0)
    A = A * col_s
    cost = std.c * col_s
    n_art = len(need)
    A1 = np.zeros((m, nz + n_art))
    A1[:, :nz] = A
    for a, i in enumerate(need):
        A1[i, nz + a] = 1.0
        basis[i] = nz + a
    cost1 = np.concatenate([np.zeros(nz), np.ones(n_art)])

    tab = _Tableau(A1, b, cost1, basis, max_iter)
    tab.run(np.ones(nz + n_art, dtype=bool))
    T = tab.T
    infeas = -T[-1, -1]
    if infeas > FEAS_TOL * max(1.0, float(np.max(np.abs(b), initial=0.0))):
        rows = sorted(
            std.row_origin[i] for i, k in enumerate(tab.basis) if k >= nz and T[i, -1] > FEAS_TOL
        )
        raise InfeasibleError(
            f"LP is infeasible (phase-one residual {infeas:.3e})",
            {"phase_one_residual": float(infeas), "violated_rows": rows},
        )

    # drive zero-valued artificials out of the basis; drop redundant rows
    keep_rows = list(range(m))
    for i in range(m):
        if tab.basis[i] >= nz:
            row = np.abs(T[i, :nz])
            nonzero = np.flatnonzero(row > PIVOT_TOL * max(1.0, float(row.max(initial=0.0))))
            if nonzero.size:
                tab.pivot(i, int(nonzero[np.argmax(row[nonzero])]))
            else:
                keep_rows.remove(i)
    basis = [tab.basis[i] for i in keep_rows]

    try:
        tab2 = _Tableau(A[keep_rows], b[keep_rows], cost, basis, max_iter - tab.iterations)
    except np.linalg.LinAlgError:
        raise SolverFailure("singular basis after phase one", iterations=tab.iterations) from None
    unbounded = tab2.run(np.ones(nz, dtype=bool))
    iterations = tab.iterations + tab2.iterations
    if unbounded is not None:
        dz = np.zeros(nz)
        dz[unbounded] = 1.0
        for i, k in enumerate(tab2.basis):
            dz[k] = -tab2.T[i, unbounded]
        raise UnboundedError("LP objective is unbounded below", ray=_direction(std, dz * col_s))

    # refine basic values against the original data
    B = A[keep_rows][:, tab2.basis]
    z = np.zeros(nz)
    try:
        z[tab2.basis] = np.linalg.solve(B, b[keep_rows])
    except np.linalg.LinAlgError:
        z[tab2.basis] = tab2.T[:-1, -1]
    z = np.maximum(z, 0.0)
    try:
        y = np.linalg.solve(B.T, cost[tab2.basis])
        dual = float(b[keep_rows] @ y)
    except np.linalg.LinAlgError:
        dual = float("nan")
    primal = float(cost @ z)
    gap = abs(primal - dual) / max(1.0, abs(primal))
    x = _recover(std, z * col_s)
    return LPResult(x, float(c @ x), iterations, gap, tab.used_bland or tab2.used_bland)


__all__ = ["LPResult", "linprog"]

"""Convex piecewise affine (PWA) degradation surfaces.

A normalized map is replaced by the max over the planes of its lower convex
envelope. For a system of energy capacity C_E the loss rate (kWh/h) is then::

    J_deg = max_k (a1_k * P + a2_k * E + a3_k * C_E)

which is linear in (P, E, C_E) within each region and convex overall.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Tuple

import numpy as np

from .errors import InvalidArgumentError
from .hull import lower_hull
from .types import NormalizedMap, PwaMap

DEDUP_TOL = 1e-14


class PwaValue(NamedTuple):
    value: float
    plane: int


class FitError(NamedTuple):
    rmse: float
    nrmse: float
    nrmse_defined: bool


def lower_convex_hull_pwa(nmap: NormalizedMap) -> PwaMap:
    """Planes of the lower convex envelope of a normalized map.

    Points are ``(P/C_E, E_n, value)``; each envelope facet yields one plane
    ``value = a1 * P/C_E + a2 * E_n + a3``. A flat map returns one plane.
    Planes equal within :data:`DEDUP_TOL` are merged.
    """
    hull = lower_hull(nmap.nodes())
    return dedup_planes(PwaMap(hull.planes))


def _dyadic(x: float) -> Tuple[int, int]:
    mant, exp = math.frexp(x)
    return int(math.ldexp(mant, 53)), exp - 53


def _exact_dot(plane, args) -> Tuple[int, int]:
    terms = []
    for a, x in zip(plane, args):
        (ma, ea), (mx, ex) = _dyadic(a), _dyadic(x)
        terms.append((ma * mx, ea + ex))
    base = min(e for _, e in terms)
    return sum(m << (e - base) for m, e in terms), base


def _to_float(mant: int, exp: int) -> float:
    if mant == 0:
        return 0.0
    if abs(mant).bit_length() < 1000 and -1000 < exp < 1000:
        return math.ldexp(float(mant), exp)
    return float(Fraction(mant) * Fraction(2) ** exp)


def eval_pwa(pwa: PwaMap, p_bat: float, e_abs: float, c_e: float) -> PwaValue:
    """Loss rate (kWh/h) of a system with capacity ``c_e`` at power ``p_bat``, SoE ``e_abs``.

    Each plane is evaluated exactly and the maximum rounded once, so the
    result is homogeneous of degree one up to a single rounding. The index
    of the first maximizing plane is returned alongside.
    """
    if not c_e > 0:
        raise InvalidArgumentError("energy capacity must be positive")
    args = (float(p_bat), float(e_abs), float(c_e))
    best, best_k = None, -1
    for k, plane in enumerate(pwa.planes):
        mant, exp = _exact_dot(plane, args)
        if best is None:
            best, best_k = (mant, exp), k
            continue
        bm, be = best
        base = min(exp, be)
        if (mant << (exp - base)) > (bm << (be - base)):
            best, best_k = (mant, exp), k
    return PwaValue(_to_float(*best), best_k)


def pwa_values(pwa: PwaMap, p_ratio, soe_n) -> np.ndarray:
    """Vectorized normalized evaluation (C_E = 1) at ``P/C_E`` and ``E_n`` arrays."""
    a = pwa.as_array()
    x = np.asarray(p_ratio, dtype=float)
    y = np.asarray(soe_n, dtype=float)
    vals = a[:, 0, None] * x.ravel() + a[:, 1, None] * y.ravel() + a[:, 2, None]
    return vals.max(axis=0).reshape(np.broadcast(x, y).shape)


def pwa_fit_error(nmap: NormalizedMap, pwa: PwaMap) -> FitError:
    """RMSE (1/h) of the PWA surface against the map nodes and NRMSE by value range.

    A constant map has no range; NRMSE is then NaN and ``nrmse_defined`` False.
    """
    nodes = nmap.nodes()
    resid = nodes[:, 2] - pwa_values(pwa, nodes[:, 0], nodes[:, 1])
    rmse = float(np.sqrt(np.mean(resid ** 2)))
    span = float(np.ptp(nmap.values))
    if span == 0:
        return FitError(rmse, float("nan"), False)
    return FitError(rmse, rmse / span, True)


def dedup_planes(pwa: PwaMap, tol: float = DEDUP_TOL) -> PwaMap:
    """Drop planes whose coefficients all match an earlier plane within ``tol``."""
    kept = []
    for plane in pwa.planes:
        if not any(all(abs(a - b) <= tol for a, b in zip(plane, other)) for other in kept):
            kept.append(plane)
    return PwaMap(tuple(kept))


def midpoint_violation(pwa: PwaMap, u, v) -> float:
    """Largest excess of f((u+v)/2) over (f(u)+f(v))/2 over point pairs.

    ``u`` and ``v`` are (N, 2) arrays of ``(P/C_E, E_n)``. A convex surface
    gives a value <= 0 up to rounding.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    mid = 0.5 * (u + v)
    fu = pwa_values(pwa, u[:, 0], u[:, 1])
    fv = pwa_values(pwa, v[:, 0], v[:, 1])
    fm = pwa_values(pwa, mid[:, 0], mid[:, 1])
    return float(np.max(fm - 0.5 * (fu + fv)))


def is_convex(pwa: PwaMap, samples: int = 1000, box=((-1.0, 1.0), (0.0, 1.0)), seed: int = 0, tol: float = 1e-12) -> bool:
    """Randomized midpoint convexity check over ``box``."""
    rng = np.random.default_rng(seed)
    lo = np.array([box[0][0], box[1][0]])
    hi = np.array([box[0][1], box[1][1]])
    u = lo + (hi - lo) * rng.random((samples, 2))
    v = lo + (hi - lo) * rng.random((samples, 2))
    return midpoint_violation(pwa, u, v) <= tol


def sensitivity_diagnostic(pwa: PwaMap, box=((-1.0, 1.0), (0.0, 1.0)), samples: int = 41) -> dict:
    """Mean slope of the active plane along power and along SoE over ``box``.

    A larger ``mean_abs_dpower`` relative to ``mean_abs_dsoe`` means the
    battery power drives wear more than the state of energy.
    """
    x = np.linspace(box[0][0], box[0][1], samples)
    y = np.linspace(box[1][0], box[1][1], samples)
    xx, yy = np.meshgrid(x, y)
    a = pwa.as_array()
    active = np.argmax(a[:, 0, None] * xx.ravel() + a[:, 1, None] * yy.ravel() + a[:, 2, None], axis=0)
    return {
        "mean_abs_dpower": float(np.mean(np.abs(a[active, 0]))),
        "mean_abs_dsoe": float(np.mean(np.abs(a[active, 1]))),
    }


__all__ = [
    "PwaValue",
    "FitError",
    "lower_convex_hull_pwa",
    "eval_pwa",
    "pwa_values",
    "pwa_fit_error",
    "dedup_planes",
    "midpoint_violation",
    "is_convex",
    "sensitivity_diagnostic",
    "DEDUP_TOL",
]

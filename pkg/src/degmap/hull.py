"""Lower convex envelope of a point cloud ``z = f(x, y)``.

The envelope is found by gift wrapping over the xy projection. Starting from
an edge on the boundary of the xy convex hull, the plane through each known
envelope edge is rotated until it rests on the point set; the resulting
facet collects every point lying exactly on that plane, and its xy outline
supplies further edges to wrap across. Coplanar points therefore end up in a
single facet, so flat regions need no special treatment.

Orientation tests use a floating point filter with Shewchuk's static error
bounds and fall back to exact rational arithmetic when the filter cannot
decide the sign.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidArgumentError

_EPS = 2.0 ** -53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_O3D_BOUND = (7.0 + 56.0 * _EPS) * _EPS


@dataclass(frozen=True)
class LowerHull:
    """Facets of a lower envelope.

    ``planes[k]`` is ``(a1, a2, a3)`` with ``z = a1 x + a2 y + a3`` on facet
    ``k`` and ``facets[k]`` the indices (into ``points``) of the facet's
    outline vertices in counterclockwise order.
    """

    points: np.ndarray
    planes: Tuple[Tuple[float, float, float], ...]
    exact_planes: Tuple[Tuple[Fraction, Fraction, Fraction], ...]
    facets: Tuple[Tuple[int, ...], ...]

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted({i for f in self.facets for i in f}))


def _orient2d_exact(a, b, c) -> int:
    ax, ay = a
    bx, by = b
    cx, cy = c
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def _orient3d_exact(a, b, c, d) -> int:
    adx, ady, adz = a[0] - d[0], a[1] - d[1], a[2] - d[2]
    bdx, bdy, bdz = b[0] - d[0], b[1] - d[1], b[2] - d[2]
    cdx, cdy, cdz = c[0] - d[0], c[1] - d[1], c[2] - d[2]
    det = (
        adx * (bdy * cdz - bdz * cdy)
        + bdx * (cdy * adz - cdz * ady)
        + cdx * (ady * bdz - adz * bdy)
    )
    return (det > 0) - (det < 0)


class _Predicates:
    """Sign-exact orientation tests over a fixed point array."""

    def __init__(self, pts: np.ndarray):
        self.pts = pts
        self._exact: List = [None] * len(pts)

    def exact(self, i):
        q = self._exact[i]
        if q is None:
            q = tuple(Fraction(float(v)) for v in self.pts[i])
            self._exact[i] = q
        return q

    def orient2d(self, a: int, b: int, idx: np.ndarray) -> np.ndarray:
        """Sign of the turn a -> b -> p for every p in ``idx`` (+1 = left)."""
        p = self.pts
        acx = p[a, 0] - p[idx, 0]
        bcx = p[b, 0] - p[idx, 0]
        acy = p[a, 1] - p[idx, 1]
        bcy = p[b, 1] - p[idx, 1]
        left = acx * bcy
        right = acy * bcx
        det = left - right
        bound = _CCW_BOUND * (np.abs(left) + np.abs(right))
        sign = np.sign(det).astype(int)
        unsure = np.flatnonzero(np.abs(det) <= bound)
        if unsure.size:
            ea, eb = self.exact(a)[:2], self.exact(b)[:2]
            for k in unsure:
                sign[k] = _orient2d_exact(ea, eb, self.exact(int(idx[k]))[:2])
        return sign

    def orient3d(self, a: int, b: int, c: int, idx: np.ndarray) -> np.ndarray:
        """Positive where p lies below the plane through a, b, c (a, b, c CCW in xy)."""
        p = self.pts
        d = p[idx]
        adx, ady, adz = (p[a] - d).T
        bdx, bdy, bdz = (p[b] - d).T
        cdx, cdy, cdz = (p[c] - d).T
        bc = bdx * cdy - cdx * bdy
        ca = cdx * ady - adx * cdy
        ab = adx * bdy - bdx * ady
        det = adz * bc + bdz * ca + cdz * ab
        perm = (
            (np.abs(bdx * cdy) + np.abs(cdx * bdy)) * np.abs(adz)
            + (np.abs(cdx * ady) + np.abs(adx * cdy)) * np.abs(bdz)
            + (np.abs(adx * bdy) + np.abs(bdx * ady)) * np.abs(cdz)
        )
        sign = np.sign(det).astype(int)
        unsure = np.flatnonzero(np.abs(det) <= _O3D_BOUND * perm)
        if unsure.size:
            ea, eb, ec = self.exact(a), self.exact(b), self.exact(c)
            for k in unsure:
                sign[k] = _orient3d_exact(ea, eb, ec, self.exact(int(idx[k])))
        return sign


def _convex_hull_2d(pred: _Predicates, idx: Sequence[int]) -> List[int]:
    """Strict counterclockwise convex hull (no collinear vertices) of xy points."""
    order = sorted(set(int(i) for i in idx), key=lambda i: (pred.exact(i)[0], pred.exact(i)[1]))
    if len(order) <= 2:
        return order

    def chain(seq):
        out: List[int] = []
        for i in seq:
            while len(out) >= 2 and _orient2d_exact(
                pred.exact(out[-2])[:2], pred.exact(out[-1])[:2], pred.exact(i)[:2]
            ) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    return lower[:-1] + upper[:-1]


def _plane_through(pred: _Predicates, a: int, b: int, c: int):
    (x1, y1, z1), (x2, y2, z2), (x3, y3, z3) = pred.exact(a), pred.exact(b), pred.exact(c)
    det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)
    a1 = ((z2 - z1) * (y3 - y1) - (z3 - z1) * (y2 - y1)) / det
    a2 = ((x2 - x1) * (z3 - z1) - (x3 - x1) * (z2 - z1)) / det
    a3 = z1 - a1 * x1 - a2 * y1
    return (a1, a2, a3)


def _lowest_on_line(pred: _Predicates, a: int, b: int, all_idx: np.ndarray) -> int:
    """Next vertex after ``a`` of the lower hull of points on segment a-b."""
    on_line = all_idx[pred.orient2d(a, b, all_idx) == 0]
    ea = pred.exact(a)
    eb = pred.exact(b)
    dx, dy = eb[0] - ea[0], eb[1] - ea[1]
    best, best_slope, best_t = None, None, None
    for i in on_line:
        i = int(i)
        e = pred.exact(i)
        t = (e[0] - ea[0]) * dx + (e[1] - ea[1]) * dy
        if t <= 0:
            continue
        slope = (e[2] - ea[2]) / t
        if best is None or slope < best_slope or (slope == best_slope and t > best_t):
            best, best_slope, best_t = i, slope, t
    return best


def _wrap(pred: _Predicates, u: int, v: int, all_idx: np.ndarray) -> int:
    """Point w left of u -> v such that plane(u, v, w) has no point below it."""
    left = all_idx[pred.orient2d(u, v, all_idx) > 0]
    p = pred.pts
    d = p[v, :2] - p[u, :2]
    rel = p[left, :2] - p[u, :2]
    tau = rel @ d / (d @ d)
    height = p[left, 2] - (p[u, 2] + tau * (p[v, 2] - p[u, 2]))
    # heuristic start only; the exact test below settles the choice
    dist = np.maximum(np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]), np.finfo(float).tiny)
    with np.errstate(over="ignore"):
        slope = height / dist
    w = int(left[int(np.argmin(slope))])
    for _ in range(len(left) + 1):
        below = pred.orient3d(u, v, w, left) > 0
        if not np.any(below):
            return w
        cand = np.flatnonzero(below)
        w = int(left[cand[int(np.argmin(slope[cand]))]])
    raise RuntimeError("gift wrapping failed to settle on a supporting plane")


def lower_hull(points) -> LowerHull:
    """Lower convex envelope of ``points`` given as rows ``(x, y, z)``.

    Points sharing an xy location are reduced to the lowest one.

    Raises
    ------
    InvalidArgumentError
        Fewer than three distinct xy locations, or all of them collinear.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidArgumentError("points must be an (N, 3) array")
    if not np.all(np.isfinite(pts)):
        raise InvalidArgumentError("points must be finite")
    lowest: dict = {}
    for i, (x, y, z) in enumerate(pts):
        key = (x, y)
        if key not in lowest or z < pts[lowest[key], 2]:
            lowest[key] = i
    keep = np.array(sorted(lowest.values()), dtype=int)
    if keep.size < 3:
        raise InvalidArgumentError("at least three distinct (x, y) nodes are required")
    pred = _Predicates(pts)

    xy_hull = _convex_hull_2d(pred, keep)
    if len(xy_hull) < 3:
        raise InvalidArgumentError("(x, y) nodes are collinear; the envelope has no facets")

    start = xy_hull[0]
    second = _lowest_on_line(pred, start, xy_hull[1], keep)
    seen = {}
    planes, exact, facets = [], [], []
    queue = deque([(start, second)])
    while queue:
        u, v = queue.popleft()
        w = _wrap(pred, u, v, keep)
        plane = _plane_through(pred, u, v, w)
        if plane in seen:
            continue
        contact = keep[pred.orient3d(u, v, w, keep) == 0]
        outline = _convex_hull_2d(pred, contact)
        seen[plane] = len(planes)
        exact.append(plane)
        planes.append(tuple(float(c) for c in plane))
        facets.append(tuple(outline))
        for a, b in zip(outline, outline[1:] + outline[:1]):
            if np.any(pred.orient2d(a, b, keep) < 0):
                queue.append((b, a))
    return LowerHull(pts, tuple(planes), tuple(exact), tuple(facets))


__all__ = ["LowerHull", "lower_hull"]

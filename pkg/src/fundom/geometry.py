"""Planar helpers: the Window rectangle, polyline intersections, distances, windings."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import shapely
from scipy.spatial import cKDTree


@dataclass(frozen=True)
class Window:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        vals = (self.sigma_min, self.sigma_max, self.t_min, self.t_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("window bounds must be finite")
        if not (self.sigma_min < self.sigma_max and self.t_min < self.t_max):
            raise ValueError(f"degenerate window {vals}")

    @classmethod
    def parse(cls, text: str) -> "Window":
        parts = [float(p) for p in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError("window needs four numbers: sigma_min,sigma_max,t_min,t_max")
        return cls(*parts)

    def as_tuple(self):
        return (self.sigma_min, self.sigma_max, self.t_min, self.t_max)

    @property
    def width(self):
        return self.sigma_max - self.sigma_min

    @property
    def height(self):
        return self.t_max - self.t_min

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.sigma_min - pad <= z.real <= self.sigma_max + pad
                and self.t_min - pad <= z.imag <= self.t_max + pad)

    def contains_array(self, Z, pad: float = 0.0):
        Z = np.asarray(Z)
        return ((Z.real >= self.sigma_min - pad) & (Z.real <= self.sigma_max + pad)
                & (Z.imag >= self.t_min - pad) & (Z.imag <= self.t_max + pad))

    def grid(self, nx: int, ny: int):
        x = np.linspace(self.sigma_min, self.sigma_max, nx)
        y = np.linspace(self.t_min, self.t_max, ny)
        return x[None, :] + 1j * y[:, None]

    def corners(self):
        a, b, c, d = self.as_tuple()
        return [complex(a, c), complex(b, c), complex(b, d), complex(a, d)]

    def perimeter_param(self, z: complex) -> float:
        """Counter-clockwise arclength parameter of a boundary point, starting at the lower-left corner."""
        a, b, c, d = self.as_tuple()
        w, h = b - a, d - c
        x = min(max(z.real, a), b)
        y = min(max(z.imag, c), d)
        dist = {"bottom": abs(y - c), "right": abs(x - b), "top": abs(y - d), "left": abs(x - a)}
        side = min(dist, key=dist.get)
        if side == "bottom":
            return x - a
        if side == "right":
            return w + (y - c)
        if side == "top":
            return w + h + (b - x)
        return 2 * w + h + (d - y)

    def perimeter_point(self, p: float) -> complex:
        a, b, c, d = self.as_tuple()
        w, h = b - a, d - c
        P = 2 * (w + h)
        p = p % P
        if p <= w:
            return complex(a + p, c)
        if p <= w + h:
            return complex(b, c + (p - w))
        if p <= 2 * w + h:
            return complex(b - (p - w - h), d)
        return complex(a, d - (p - 2 * w - h))

    @property
    def perimeter(self):
        return 2 * (self.width + self.height)

    def clip_segment_exit(self, z_in: complex, z_out: complex) -> complex:
        """Point where the segment from an inside point to an outside point crosses the boundary."""
        a, b, c, d = self.as_tuple()
        dz = z_out - z_in
        best = 1.0
        for lo, hi, p, q in ((a, b, z_in.real, dz.real), (c, d, z_in.imag, dz.imag)):
            if q > 0 and p + q > hi:
                best = min(best, (hi - p) / q)
            if q < 0 and p + q < lo:
                best = min(best, (lo - p) / q)
        best = max(0.0, best)
        return z_in + best * dz


def as_xy(points) -> np.ndarray:
    p = np.asarray(points, dtype=complex)
    return np.column_stack([p.real, p.imag])


def segment_intersections(polylines, skip_adjacent=True):
    """All proper intersections between segments of the given polylines.

    Returns a list of (i, si, j, sj, point) with (i, si) < (j, sj) lexicographically.
    Adjacent segments of the same polyline (sharing a vertex) are skipped.
    """
    starts, ends, owner, index = [], [], [], []
    for i, pts in enumerate(polylines):
        pts = np.asarray(pts, dtype=complex)
        if len(pts) < 2:
            continue
        starts.append(pts[:-1])
        ends.append(pts[1:])
        owner.append(np.full(len(pts) - 1, i))
        index.append(np.arange(len(pts) - 1))
    if not starts:
        return []
    A = np.concatenate(starts)
    B = np.concatenate(ends)
    own = np.concatenate(owner)
    idx = np.concatenate(index)
    coords = np.stack([as_xy(A), as_xy(B)], axis=1)
    segs = shapely.linestrings(coords)
    tree = shapely.STRtree(segs)
    left, right = tree.query(segs, predicate="intersects")
    keep = left < right
    left, right = left[keep], right[keep]
    same = own[left] == own[right]
    if skip_adjacent:
        adjacent = same & (np.abs(idx[left] - idx[right]) <= 1)
        # closed loops: first and last segments share the start point
        left, right = left[~adjacent], right[~adjacent]
    out = []
    for l, r in zip(left.tolist(), right.tolist()):
        p = _seg_intersection(A[l], B[l], A[r], B[r])
        if p is None:
            continue
        out.append((int(own[l]), int(idx[l]), int(own[r]), int(idx[r]), p))
    return out


def _seg_intersection(p1, p2, q1, q2):
    d1 = p2 - p1
    d2 = q2 - q1
    den = d1.real * d2.imag - d1.imag * d2.real
    w = q1 - p1
    if den == 0:
        # collinear overlap: report the midpoint of the overlap
        if abs(w.real * d1.imag - w.imag * d1.real) > 1e-15 * (abs(d1) + abs(w)):
            return None
        ts = sorted([0.0, 1.0])
        n2 = abs(d1) ** 2
        if n2 == 0:
            return p1
        a = ((q1 - p1) * d1.conjugate()).real / n2
        b = ((q2 - p1) * d1.conjugate()).real / n2
        lo, hi = max(ts[0], min(a, b)), min(ts[1], max(a, b))
        if lo > hi:
            return None
        return p1 + 0.5 * (lo + hi) * d1
    t = (w.real * d2.imag - w.imag * d2.real) / den
    u = (w.real * d1.imag - w.imag * d1.real) / den
    eps = 1e-12
    if -eps <= t <= 1 + eps and -eps <= u <= 1 + eps:
        return p1 + t * d1
    return None


class PolylineIndex:
    """Nearest-distance queries against a set of polylines (vertex KD-tree + segment refinement)."""

    def __init__(self, polylines):
        self.polylines = [np.asarray(p, dtype=complex) for p in polylines if len(p) > 0]
        if self.polylines:
            pts = np.concatenate(self.polylines)
            self.owner = np.concatenate([np.full(len(p), i) for i, p in enumerate(self.polylines)])
            self.local = np.concatenate([np.arange(len(p)) for p in self.polylines])
            self.tree = cKDTree(as_xy(pts))
        else:
            self.tree = None

    def distance(self, z: complex, k: int = 4):
        """(distance, polyline index) of the nearest point on any polyline."""
        if self.tree is None:
            return math.inf, -1
        k = min(k, self.tree.n)
        _, ids = self.tree.query([z.real, z.imag], k=k)
        ids = np.atleast_1d(ids)
        best, which = math.inf, -1
        for v in ids:
            o, j = int(self.owner[v]), int(self.local[v])
            pts = self.polylines[o]
            for a, b in ((j - 1, j), (j, j + 1)):
                if 0 <= a and b < len(pts):
                    d = point_segment_distance(z, pts[a], pts[b])
                elif len(pts) == 1:
                    d = abs(z - pts[0])
                else:
                    continue
                if d < best:
                    best, which = d, o
        return best, which


def point_segment_distance(z, a, b):
    d = b - a
    n2 = d.real * d.real + d.imag * d.imag
    if n2 == 0:
        return abs(z - a)
    t = ((z - a) * d.conjugate()).real / n2
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * d))


def polyline_distance(points, polyline) -> np.ndarray:
    """Distance from each point to a single polyline."""
    idx = PolylineIndex([polyline])
    return np.array([idx.distance(complex(p))[0] for p in points])


def winding_number(func, path, closed=True, max_depth=30, max_dphi=math.pi / 4):
    """Winding number of func (complex -> complex, nonvanishing on path) along a polyline path.

    Each path edge is refined recursively until the argument increment between
    consecutive samples is below max_dphi. Returns (winding, min |func| seen).
    """
    pts = [complex(p) for p in path]
    if closed and pts[0] != pts[-1]:
        pts.append(pts[0])
    vals = [func(p) for p in pts]
    total = 0.0
    fmin = min(abs(v) for v in vals)
    for k in range(len(pts) - 1):
        d, m = _arg_change(func, pts[k], pts[k + 1], vals[k], vals[k + 1], max_depth, max_dphi)
        total += d
        fmin = min(fmin, m)
    return int(round(total / (2 * math.pi))), fmin


def arg_change(func, a, b, fa, fb, depth=30, max_dphi=math.pi / 4):
    """Continuous argument change of func along [a, b], refined until each increment <= max_dphi.

    Returns (change, min |func| at the added samples); nan when func vanishes at a sample.
    """
    return _arg_change(func, a, b, fa, fb, depth, max_dphi)


def _arg_change(func, a, b, fa, fb, depth, max_dphi):
    stack = [(a, b, fa, fb, 0)]
    total = 0.0
    fmin = math.inf
    while stack:
        a, b, fa, fb, lvl = stack.pop()
        if fa == 0 or fb == 0 or not (cmath.isfinite(fa) and cmath.isfinite(fb)):
            return math.nan, 0.0
        dphi = np.angle(fb / fa)
        if abs(dphi) <= max_dphi or lvl >= depth:
            total += dphi
            continue
        m = 0.5 * (a + b)
        fm = func(m)
        fmin = min(fmin, abs(fm))
        stack.append((m, b, fm, fb, lvl + 1))
        stack.append((a, m, fa, fm, lvl + 1))
    return total, fmin


def circle_path(center: complex, r: float, n: int = 64):
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return center + r * np.exp(1j * th)


def rectangle_path(window: Window, n_per_side: int = 16):
    c = window.corners()
    out = []
    for k in range(4):
        a, b = c[k], c[(k + 1) % 4]
        for s in np.linspace(0, 1, n_per_side, endpoint=False):
            out.append(a + s * (b - a))
    return out

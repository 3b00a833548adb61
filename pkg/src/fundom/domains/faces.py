"""Faces of the upper half-window cut out by a nested chain of boundary-to-boundary curves.

Every chord (a traced curve running from the window boundary back to the window
boundary) splits the half-window in two. The side whose perimeter arc avoids the
lower-left corner defines a perimeter interval [p1, p2]; chords of an atlas are
laminar, so these intervals form a nested chain. A face is the region between two
consecutive chords of the chain.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import OrderingAmbiguity
from ..funcval import evaluator
from ..geometry import Window
from .model import AXIS, CURVE, EDGE, INDENT, BoundaryPiece

EDGE_SPACING = 0.05
INDENT_RADIUS = 1e-3


@dataclass
class Chord:
    ref: str
    points: np.ndarray   # oriented from the p1 end to the p2 end
    p1: float
    p2: float
    component: object = None

    @property
    def length(self):
        return self.p2 - self.p1


def clip_polyline(points, window: Window, pad: float = 1e-12):
    """Trim the outside ends of a polyline, ending exactly on the window boundary."""
    pts = np.asarray(points, dtype=complex)
    inside = window.contains_array(pts, pad=pad)
    idx = np.flatnonzero(inside)
    if len(idx) < 2:
        return None
    i, j = idx[0], idx[-1]
    core = list(pts[i:j + 1])
    if i > 0:
        core.insert(0, window.clip_segment_exit(pts[i], pts[i - 1]))
    if j < len(pts) - 1:
        core.append(window.clip_segment_exit(pts[j], pts[j + 1]))
    core[0] = snap_to_boundary(core[0], window)
    core[-1] = snap_to_boundary(core[-1], window)
    out = [core[0]]
    for z in core[1:]:
        if z != out[-1]:
            out.append(z)
    return np.array(out, dtype=complex)


def snap_to_boundary(z: complex, window: Window, tol: float = 1e-7) -> complex:
    a, b, c, d = window.as_tuple()
    x = min(max(z.real, a), b)
    y = min(max(z.imag, c), d)
    dists = {"l": abs(x - a), "r": abs(x - b), "b": abs(y - c), "t": abs(y - d)}
    side = min(dists, key=dists.get)
    if dists[side] > tol:
        return complex(x, y)
    if side == "l":
        x = a
    elif side == "r":
        x = b
    elif side == "b":
        y = c
    else:
        y = d
    return complex(x, y)


def refine_on_edge(fid, kind, z: complex, window: Window, iters: int = 40, max_move: float = 1e-2) -> complex:
    """Move a clipped end point along its window edge onto the exact level curve."""
    a, b, c, d = window.as_tuple()
    on_side = abs(z.real - a) < 1e-12 or abs(z.real - b) < 1e-12
    e = 1j if on_side else 1.0
    ev = evaluator(fid)
    z0 = zc = complex(z)
    for _ in range(iters):
        f0, f1, _ = ev(zc)
        if not (cmath.isfinite(f0) and cmath.isfinite(f1)) or f1 == 0:
            return z0
        g = float(kind.signed(f0))
        eps = 1e-7 * max(1.0, abs(f0))
        dg = (float(kind.signed(f0 + eps * f1 * e)) - g) / eps
        if dg == 0:
            return z0
        step = -g / dg
        zc = zc + step * e
        if abs(step) <= 1e-15 * (1 + abs(zc)):
            break
    if abs(zc - z0) > max_move or not window.contains(zc, pad=1e-12):
        return z0
    return zc


def make_chord(component, window: Window, points=None, ref=None, fid=None, end_kinds=None):
    """Chord from a traced component whose two ends lie on the window boundary.

    With fid given, both clipped ends are refined along the window edge onto the level
    curves of the given kinds (default: the component's own kind at both ends).
    """
    pts = clip_polyline(component.points if points is None else points, window)
    if pts is None:
        return None
    if fid is not None:
        ka, kb = end_kinds if end_kinds is not None else (component.kind, component.kind)
        pts = pts.copy()
        pts[0] = refine_on_edge(fid, ka, pts[0], window)
        pts[-1] = refine_on_edge(fid, kb, pts[-1], window)
    pa, pb = window.perimeter_param(pts[0]), window.perimeter_param(pts[-1])
    if pa > pb:
        pts = pts[::-1]
        pa, pb = pb, pa
    if pb - pa < 1e-9:
        return None
    return Chord(ref if ref is not None else component.id, pts, pa, pb, component)


def nest_chain(chords):
    """Sort chords from outermost to innermost; every interval must contain the next."""
    chain = sorted(chords, key=lambda c: (-c.length, c.p1))
    for a, b in zip(chain, chain[1:]):
        if not (a.p1 < b.p1 and b.p2 < a.p2):
            raise OrderingAmbiguity(
                f"chords {a.ref} [{a.p1:.4f},{a.p2:.4f}] and {b.ref} [{b.p1:.4f},{b.p2:.4f}] are not nested")
    return chain


def perimeter_pieces(window: Window, p_from: float, p_to: float, axis_bottom: bool = False,
                     poles=(), spacing: float = EDGE_SPACING, indent: float = INDENT_RADIUS):
    """Counter-clockwise walk along the window boundary from p_from to p_to (p_to may exceed P)."""
    P = window.perimeter
    if p_to < p_from:
        p_to += P
    w, h = window.width, window.height
    corners = [0.0, w, w + h, 2 * w + h]
    marks = [c + k * P for k in range(3) for c in corners]
    br = [p_from] + [m for m in marks if p_from < m < p_to] + [p_to]
    pieces = []
    for a, b in zip(br[:-1], br[1:]):
        if b - a <= 0:
            continue
        n = max(1, int(math.ceil((b - a) / spacing)))
        pts = [window.perimeter_point(a + (b - a) * k / n) for k in range(n + 1)]
        mid = (0.5 * (a + b)) % P
        bottom = mid < w
        if axis_bottom and bottom:
            pieces += _axis_with_indents(np.array(pts), poles, indent)
        else:
            pieces.append(BoundaryPiece(EDGE, np.array(pts)))
    return pieces


def _axis_with_indents(pts, poles, r):
    """Split a left-to-right real segment around real poles with upper half circles."""
    x0, x1 = pts[0].real, pts[-1].real
    inner = sorted(p.real for p in poles if abs(p.imag) == 0 and x0 + r < p.real < x1 - r)
    if not inner:
        return [BoundaryPiece(AXIS, pts)]
    out = []
    start = x0
    spacing = (x1 - x0) / max(1, len(pts) - 1)
    for q in inner:
        seg = _linspace(start, q - r, spacing)
        out.append(BoundaryPiece(AXIS, seg))
        th = np.linspace(math.pi, 0.0, 17)
        out.append(BoundaryPiece(INDENT, q + r * np.exp(1j * th), ref=f"pole:{q:g}"))
        start = q + r
    out.append(BoundaryPiece(AXIS, _linspace(start, x1, spacing)))
    return out


def _linspace(a, b, spacing):
    n = max(1, int(math.ceil((b - a) / spacing)))
    return np.linspace(a, b, n + 1).astype(complex)


def face_between(window: Window, outer, inner, axis_bottom=False, poles=()):
    """Boundary of the region inside `outer` and outside `inner` (either may be None)."""
    P = window.perimeter
    pieces = []
    if outer is None and inner is None:
        return perimeter_pieces(window, 0.0, P, axis_bottom, poles)
    if outer is None:
        # outside the outermost chord: perimeter p2 -> p1 (wrapping) then chord p1 -> p2
        pieces += perimeter_pieces(window, inner.p2, inner.p1 + P, axis_bottom, poles)
        pieces.append(BoundaryPiece(CURVE, inner.points, inner.ref))
        return pieces
    pieces.append(BoundaryPiece(CURVE, outer.points[::-1], outer.ref))
    if inner is None:
        pieces += perimeter_pieces(window, outer.p1, outer.p2, axis_bottom, poles)
        return pieces
    pieces += perimeter_pieces(window, outer.p1, inner.p1, axis_bottom, poles)
    pieces.append(BoundaryPiece(CURVE, inner.points, inner.ref))
    pieces += perimeter_pieces(window, inner.p2, outer.p2, axis_bottom, poles)
    return pieces

"""Predictor-corrector continuation of level curves of analytic functions.

A curve is the pre-image of an image curve C (real axis, circle, ray or
segment). Moving along C in the image corresponds to the z-direction
tangent(C)/f'(z); the corrector is Newton on the projection onto C,
z <- z + (P(f) - f)/f'. Near a critical point c lying on the curve the level
set has two crossing arcs whose tangents follow from f''(c); the march goes
straight through and records the crossing.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from ..errors import HigherOrderCritical, SeedInvalid, StepCollapse
from ..funcval import ESSENTIAL_RADIUS, FunctionId, evaluator
from ..geometry import Window, point_segment_distance
from .curves import (
    ABOVE_ONE,
    BELOW_ONE,
    BLACK,
    BRANCH,
    CIRCLE,
    CLOSED,
    COLLAPSE,
    LIFT,
    LIFT_END,
    MAX_POINTS,
    MIXED,
    NA,
    POLE,
    RAY,
    REAL_AXIS,
    RED,
    WHOLE,
    WINDOW,
    ZERO,
    CurveComponent,
    CurveKind,
    Endpoint,
    StepControl,
)


def _finite(v: complex) -> bool:
    return math.isfinite(v.real) and math.isfinite(v.imag)


def polish_critical(ev, z: complex, max_iter: int = 60):
    """Newton on f' from z. Returns (c, converged)."""
    c = complex(z)
    for _ in range(max_iter):
        _, f1, f2 = ev(c)
        if f2 == 0 or not _finite(f2) or not _finite(f1):
            return c, False
        dc = -f1 / f2
        c = c + dc
        if abs(dc) <= 4e-16 * (1.0 + abs(c)):
            return c, True
    _, f1, f2 = ev(c)
    return c, abs(f1) <= 1e-12 * max(1.0, abs(f2))


def resolution_floor(kind: CurveKind, z: complex, f0: complex, f1: complex) -> float:
    """Smallest residual reachable in double precision: the change of f over a few ulps of z."""
    scale = kind.rho if kind.variant == CIRCLE else max(1.0, abs(f0))
    return 4.0 * np.spacing(1.0 + abs(z)) * abs(f1) / scale


def correct(ev, kind: CurveKind, z: complex, tol: float, max_iter: int = 16):
    """Newton projection of z onto the level curve. Returns (z, (f, f', f''), converged).

    Convergence means residual <= max(tol, resolution_floor): near a pole the
    representable points are too coarse for tighter tolerances.
    """
    z = complex(z)
    vals = ev(z)
    best = None
    for _ in range(max_iter):
        f0, f1, _ = vals
        if not (_finite(f0) and _finite(f1)) or f1 == 0:
            return z, vals, False
        r = kind.residual(f0)
        if best is not None and r <= 1e-3 * max(tol, resolution_floor(kind, z, f0, f1)):
            return z, vals, True
        dz = (kind.project(f0) - f0) / f1
        if best is not None and r >= best and abs(dz) <= 1e-15 * (1 + abs(z)):
            break
        best = r if best is None else min(best, r)
        if dz == 0:
            break
        z = z + dz
        vals = ev(z)
    f0, f1, _ = vals
    return z, vals, kind.residual(f0) <= max(tol, resolution_floor(kind, z, f0, f1))


def branch_directions(kind: CurveKind, fc: complex, f2: complex):
    """Unit tangents of the two arcs of the level curve crossing at a simple critical point."""
    T = kind.image_tangent(fc)
    phi0 = 0.5 * cmath.phase(T / f2)
    return [cmath.exp(1j * (phi0 + k * math.pi / 2)) for k in range(4)]


def branch_continue(fid: FunctionId, at: complex, kind: CurveKind = None, tol: float = 1e-10):
    """Outgoing tangent angles (in [0, 2 pi)) of the level curve through a simple critical point."""
    kind = kind or CurveKind.real_axis()
    ev = evaluator(fid)
    c, ok = polish_critical(ev, complex(at))
    f0, f1, f2 = ev(c)
    if abs(f2) <= tol * max(1.0, abs(f0)):
        raise HigherOrderCritical(c)
    if abs(f1) > 1e-6 * abs(f2):
        raise SeedInvalid(f"{at!r} is not a critical point (|f'| = {abs(f1):.3g})")
    return sorted(cmath.phase(u) % (2 * math.pi) for u in branch_directions(kind, f0, f2))


def _curvature(a, b, c):
    u = b - a
    v = c - b
    w = c - a
    den = abs(u) * abs(v) * abs(w)
    if den == 0:
        return 0.0
    cross = u.real * v.imag - u.imag * v.real
    return 2.0 * abs(cross) / den


class _Tracer:
    def __init__(self, fid: FunctionId, kind: CurveKind, ctl: StepControl, window: Window):
        self.fid = fid
        self.kind = kind
        self.ctl = ctl
        self.window = window
        self.ev = evaluator(fid)
        self.ess = fid.essential_point
        self.check_poles = kind.variant != CIRCLE

    def tangent(self, vals, ref=None):
        f0, f1, _ = vals
        t = self.kind.image_tangent(f0) / f1
        t = t / abs(t)
        if ref is not None and (t * ref.conjugate()).real < 0:
            t = -t
        return t

    def eff_min_step(self, vals):
        f0, f1, _ = vals
        af1 = abs(f1)
        scale = max(1.0, abs(f0)) / af1 if af1 > 0 else 1.0
        return self.ctl.min_step * min(1.0, scale)

    def step_limit(self, z, vals, pts):
        ctl = self.ctl
        f0, f1, _ = vals
        h = ctl.max_step
        af1 = abs(f1)
        if af1 > 0:
            h = min(h, ctl.image_step * max(1.0, abs(f0)) / af1)
        p, dp = self.fid.nearest_pole(z)
        if p is not None:
            h = min(h, 0.5 * dp)
        if self.ess is not None:
            h = min(h, 0.5 * max(abs(z - self.ess) - ESSENTIAL_RADIUS, ESSENTIAL_RADIUS))
        if len(pts) >= 3:
            k = _curvature(pts[-3], pts[-2], pts[-1])
            if k > 0:
                h = min(h, ctl.curvature_target / k)
        return h

    def march(self, z, vals, d, record_crossings):
        """Continue from z in direction d until a terminal event."""
        ctl, kind, ev = self.ctl, self.kind, self.ev
        pts = [z]
        crossings = []
        last_cross = record_crossings[-1] if record_crossings else None
        start = z
        arc = 0.0
        h = min(ctl.max_step, self.step_limit(z, vals, pts))
        h_next = h
        while True:
            if len(pts) >= ctl.max_points:
                return pts, Endpoint(MAX_POINTS, pts[-1]), crossings
            f0, f1, f2 = vals
            emin = self.eff_min_step(vals)
            h = max(min(h_next, self.step_limit(z, vals, pts)), emin)
            af1, af2 = abs(f1), abs(f2)
            # critical point ahead?
            if af2 > 0 and af1 < 3.0 * h * af2:
                c, ok = polish_critical(ev, z)
                if ok and last_cross is not None and abs(c - last_cross) <= 1e-9 * (1 + abs(c)):
                    pass  # the crossing just passed
                elif ok and ((c - z) * d.conjugate()).real <= 0:
                    pass  # behind us: moving away from it
                elif ok and abs(c - z) < 3.0 * h:
                    cv = ev(c)
                    if kind.residual(cv[0]) <= ctl.cross_tol and kind.admissible(cv[0]):
                        res = self._cross(z, c, cv, d, h, pts, crossings)
                        if isinstance(res, Endpoint):
                            return pts, res, crossings
                        z, vals, d, h_next = res
                        last_cross = c
                        continue
                    h = max(min(h, 0.4 * abs(z - c)), emin)
                elif not ok:
                    h = max(min(h, 0.5 * af1 / af2), emin)
            t = self.tangent(vals, d)
            zp = z + h * t
            zc, vc, ok = correct(ev, kind, zp, ctl.corrector_tol)
            good = ok and abs(zc - zp) <= 0.25 * h
            if good:
                tn = self.tangent(vc, t)
                good = (tn * t.conjugate()).real > math.cos(0.5)
            if not good:
                h_next = 0.5 * h
                if h_next < emin:
                    return pts, Endpoint(COLLAPSE, z), crossings
                continue
            step = abs(zc - z)
            arc += step
            # closed loop: the start point lies on this step
            if (len(pts) > 3 and arc > 4.0 * step
                    and point_segment_distance(start, z, zc) <= max(0.25 * step, 1e-12)):
                pts.append(start)
                return pts, Endpoint(CLOSED, start), crossings
            end = self._terminal(z, zc, vc, pts)
            if end is not None:
                return pts, end, crossings
            pts.append(zc)
            z, vals, d = zc, vc, tn
            h_next = min(1.5 * h, ctl.max_step)

    def _cross(self, z, c, cv, d, h, pts, crossings):
        kind, ctl, ev = self.kind, self.ctl, self.ev
        fc, _, fc2 = cv
        if abs(fc2) <= 1e-10 * max(1.0, abs(fc)):
            raise HigherOrderCritical(c)
        if kind.variant == LIFT:
            lam = kind.param(fc)
            if abs(lam - 1.0) < 1e-7 or abs(lam) < 1e-7:
                pts.append(c)
                crossings.append(c)
                return Endpoint(BRANCH, c)
        din = c - z
        din = din / abs(din) if din != 0 else d
        dirs = branch_directions(kind, fc, fc2)
        out = max(dirs, key=lambda u: (u * din.conjugate()).real)
        pts.append(c)
        crossings.append(c)
        hh = max(min(h, ctl.max_step), 10 * ctl.min_step)
        for _ in range(40):
            zc, vc, ok = correct(ev, kind, c + hh * out, ctl.corrector_tol)
            if ok and abs(zc - c) > 0.5 * hh and ((zc - c) * out.conjugate()).real > 0.7 * hh:
                end = self._terminal(c, zc, vc, pts)
                if end is not None:
                    return end
                pts.append(zc)
                return zc, vc, self.tangent(vc, out), hh
            hh *= 0.5
        return Endpoint(COLLAPSE, c)

    def _terminal(self, z, zc, vc, pts):
        """Classify a terminal event on the accepted step z -> zc, or None."""
        kind, ctl, fid = self.kind, self.ctl, self.fid
        f0 = vc[0]
        if not self.window.contains(zc, pad=1e-12):
            pts.append(zc)
            return Endpoint(WINDOW, zc)
        if self.ess is not None and abs(zc - self.ess) < ESSENTIAL_RADIUS:
            pts.append(zc)
            return Endpoint(WINDOW, zc, flag="essential")
        if self.check_poles:
            p, dp = fid.nearest_pole(zc)
            if p is not None and (dp < ctl.pole_stop or (abs(f0) * ctl.pole_tol > 1 and dp < 0.1)):
                pts.append(zc)
                return Endpoint(POLE, p)
        if kind.variant == RAY and kind.param(f0) <= 0:
            zz = self._solve_value(zc, 0j)
            pts.append(zz)
            return Endpoint(ZERO, zz)
        if kind.variant == LIFT:
            lam = kind.param(f0)
            if lam > 1 or lam < 0:
                target = kind.w1 if lam > 1 else kind.w0
                zz = self._solve_value(z, target)
                _, g1, g2 = self.ev(zz)
                pts.append(zz)
                if abs(g1) <= 1e-6 * max(abs(g2), 1.0):
                    return Endpoint(BRANCH, zz)
                return Endpoint(LIFT_END, zz)
        return None

    def _solve_value(self, z, w):
        """Newton for f(z) = w starting near z."""
        for _ in range(60):
            f0, f1, _ = self.ev(z)
            if f1 == 0:
                break
            dz = (w - f0) / f1
            z = z + dz
            if abs(dz) <= 1e-15 * (1 + abs(z)):
                break
        return z


def _classify(fid, kind, pts):
    if kind.variant != REAL_AXIS or len(pts) == 0:
        return NA, NA
    ev = evaluator(fid)
    inner = pts[1:-1] if len(pts) > 2 else pts
    vals = np.array([ev(p)[0].real for p in inner])
    vals = vals[np.isfinite(vals)]
    if len(vals) == 0:
        return NA, NA
    nz = vals[np.abs(vals) > 1e-9]
    if len(nz) and np.all(nz < 0):
        color = RED
    elif len(nz) and np.all(nz > 0):
        color = BLACK
    else:
        color = MIXED
    off = vals[np.abs(vals - 1) > 1e-9]
    if len(off) and np.all(off > 1):
        interval = ABOVE_ONE
    elif len(off) and np.all(off < 1):
        interval = BELOW_ONE
    else:
        interval = WHOLE
    return color, interval


def trace(fid: FunctionId, kind: CurveKind, seed: complex, ctl: StepControl = None,
          window: Window = None) -> CurveComponent:
    """Bidirectional continuation of the level-curve component through seed."""
    ctl = ctl or StepControl()
    if window is None:
        raise ValueError("trace needs a window")
    tr = _Tracer(fid, kind, ctl, window)
    seed = complex(seed)
    z, vals, ok = correct(tr.ev, kind, seed, ctl.corrector_tol)
    if not ok or not kind.admissible(vals[0]):
        raise SeedInvalid(f"seed {seed!r} does not satisfy the constraint")
    if abs(z - seed) > 10 * ctl.max_step:
        raise SeedInvalid(f"seed {seed!r} is too far from the curve")
    f0, f1, f2 = vals
    if abs(f1) <= ctl.branch_tol * max(1.0, abs(f2) * ctl.max_step):
        raise SeedInvalid(f"seed {seed!r} is a critical point")
    t0 = tr.tangent(vals)
    fpts, fend, fcross = tr.march(z, vals, t0, [])
    if fend.kind == CLOSED:
        pts, start, end, crossings = fpts, fend, fend, fcross
    else:
        bpts, bend, bcross = tr.march(z, vals, -t0, [])
        pts = bpts[::-1] + fpts[1:]
        start, end = bend, fend
        crossings = bcross[::-1] + fcross
    nodes = []
    for i, c in enumerate(crossings):
        for c2 in crossings[:i]:
            if abs(c - c2) <= 1e-9 * (1 + abs(c)) and not any(abs(c - n) <= 1e-9 * (1 + abs(c)) for n in nodes):
                nodes.append(c)
    color, interval = _classify(fid, kind, pts)
    comp = CurveComponent(kind=kind, points=np.array(pts), color=color, image_interval=interval,
                          start=start, end=end, crossings=crossings, nodes=nodes, seed=seed)
    if start.kind == COLLAPSE or end.kind == COLLAPSE:
        last = end.at if end.kind == COLLAPSE else start.at
        raise StepCollapse(f"step collapse near {last!r}", last_point=last, partial=comp)
    return comp


def distance_to_curve(fid: FunctionId, kind: CurveKind, p: complex, polyline, iters: int = 8):
    """Distance from p to the exact level curve approximated by polyline.

    The foot point on the nearest chord is refined by alternating tangential
    projection and Newton correction onto the constraint.
    """
    ev = evaluator(fid)
    pts = np.asarray(polyline)
    j = int(np.argmin(np.abs(pts - p)))
    q = pts[j]
    for _ in range(iters):
        q, vals, ok = correct(ev, kind, q, 1e-13)
        if not ok:
            break
        f0, f1, _ = vals
        t = kind.image_tangent(f0) / f1
        t = t / abs(t)
        q = q + (t.conjugate() * (p - q)).real * t
    q, _, _ = correct(ev, kind, q, 1e-13)
    return abs(p - q)

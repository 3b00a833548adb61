"""Strips S_k of zeta and their subdivision into fundamental domains Omega_{k,j}.

The pre-image of the real axis is traced in the upper half-window [-12, 12] x [0, T].
Its unbounded components with image (1, +inf) that do not lie on the real axis are
the curves Gamma'_k; they all leave the window on the right edge (zeta -> 1 as
sigma -> +inf), which orders them by height. Consecutive Gamma'_k bound the strip S_k.
Inside an m-strip, each whole-axis component Gamma_{k,j} meets zeta = 1 at a point
u_{k,j}; the lift of the image segment [1, zeta(v_{k,j})] joins u_{k,j} to the branch
point v_{k,j} and continues through it to the right edge. Together with the (1, +inf)
part of Gamma_{k,j} these arcs form the curves C_{k,j} that cut S_k into m + 1 domains.
"""
from __future__ import annotations

import math

import numpy as np
from shapely.geometry import LineString

from ..critpoints import zeta_nontrivial_zeros, zeta_one_points, zeta_prime_zeros, zeta_trivial_zeros
from ..errors import (
    CurveCrossing, IncompleteBoundary, LiftMismatch, OrderingAmbiguity, SeedInvalid, StepCollapse,
)
from ..funcval import FunctionId, evaluator
from ..geometry import Window, point_segment_distance, segment_intersections
from ..tracer import CurveKind, StepControl, trace
from ..tracer.assembly import preimage_real_axis
from ..tracer.continuation import branch_directions
from ..tracer.curves import ABOVE_ONE, BELOW_ONE, BRANCH, RED, WHOLE, WINDOW
from .faces import face_between, make_chord, nest_chain
from .model import (
    DOMAIN, REMAINDER, Atlas, FundamentalDomain, ImageArc, RealInterval, SlitSpec, Strip, mirror_domain,
)

SIGMA_LO = -12.0
SIGMA_HI = 12.0
T_PAD = 15.0            # the window reaches this far above t_max so the last strip closes
MATCH_TOL = 1e-6        # an L' lift must end this close to its branch point
ONE_TOL = 0.05          # |zeta - 1| allowed where L'' leaves the window
SEPARATION_TOL = 1e-6   # Gamma'_k crossings of the ordering line closer than this are ambiguous
SEG_POINTS = 65         # samples of the image segments stored in slit specs
ON_CURVE_TOL = 5e-3     # a one-point this close to a traced polyline lies on that component


def zeta_window(t_max: float) -> Window:
    return Window(SIGMA_LO, SIGMA_HI, 0.0, float(t_max) + T_PAD)


class ZetaTrace:
    """The shared trace of one upper half-window: components and critical points."""

    def __init__(self, window: Window, ctl: StepControl = None, components=None):
        self.window = window
        self.ctl = ctl or StepControl()
        self.fid = FunctionId.zeta()
        self.prime_zeros = zeta_prime_zeros(window)
        if components is None:
            components = preimage_real_axis(self.fid, window, self.ctl,
                                            crit=[c.location for c in self.prime_zeros])
        self.components = list(components)
        t_top = window.t_max
        self.zeros = ([z for z in zeta_trivial_zeros(int(-window.sigma_min // 2)) if window.contains(z.location)]
                      + [z for z in zeta_nontrivial_zeros(t_top) if window.contains(z.location)])
        self.one_points = [u for u in zeta_one_points(window) if u.location.imag > 0]


# ---------------------------------------------------------------- strips

def _on_axis(c) -> bool:
    return bool(np.all(np.abs(c.points.imag) < 1e-9))


def _height_at(points, sigma: float):
    """Heights where a polyline crosses the vertical line Re s = sigma."""
    p = np.asarray(points)
    x = p.real - sigma
    out = []
    for i in np.flatnonzero(x[:-1] * x[1:] <= 0):
        a, b = p[i], p[i + 1]
        if a.real == b.real:
            out.append(a.imag)
            continue
        w = (sigma - a.real) / (b.real - a.real)
        out.append(a.imag + w * (b.imag - a.imag))
    return out


def gamma_primes(components, window: Window):
    """The Gamma'_k in increasing height order, with their heights on Re s = sigma_hi - 1."""
    line = window.sigma_max - 1.0
    found = []
    for c in components:
        if c.image_interval != ABOVE_ONE or _on_axis(c):
            continue
        if c.start.kind != WINDOW or c.end.kind != WINDOW:
            continue
        hs = _height_at(c.points, line)
        if not hs:
            continue
        found.append((min(hs), c))
    found.sort(key=lambda e: e[0])
    for (t1, c1), (t2, c2) in zip(found, found[1:]):
        if t2 - t1 < SEPARATION_TOL:
            raise OrderingAmbiguity(f"two (1,+inf) components cross Re s = {line} at t = {t1:.9f}; widen the window")
    return found


def _face_domain(window, outer, inner, poles=()):
    pieces = face_between(window, outer, inner, axis_bottom=True, poles=poles)
    return FundamentalDomain("face", pieces, SlitSpec(()), FunctionId.zeta(), role=REMAINDER)


def _inside(face, z) -> bool:
    return face.contains(complex(z))


def _component_inside(face, c) -> bool:
    pts = c.points
    mids = [pts[len(pts) // 2], pts[len(pts) // 3], pts[(2 * len(pts)) // 3]]
    votes = sum(face.contains(complex(z)) for z in mids)
    return votes >= 2


def zeta_strips(t_max: float, ctl: StepControl = None, trace_data: ZetaTrace = None):
    """Strips S_k between consecutive Gamma'_k whose lower boundary lies below t_max."""
    data = trace_data or ZetaTrace(zeta_window(t_max), ctl)
    window = data.window
    gp = gamma_primes(data.components, window)
    chords = [(t, make_chord(c, window, fid=FunctionId.zeta())) for t, c in gp]
    strips = []
    for k in range(len(chords) - 1):
        t_lo, lower = chords[k]
        _, upper = chords[k + 1]
        if t_lo > t_max:
            break
        face = _face_domain(window, lower, upper)
        interior = [c for c in data.components
                    if c is not lower.component and c is not upper.component
                    and c.image_interval in (BELOW_ONE, WHOLE) and not _on_axis(c)
                    and _component_inside(face, c)]
        whole = [c for c in interior if c.image_interval == WHOLE]
        zeros = [z for z in data.zeros if _inside(face, z.location)]
        ones = [u for u in data.one_points if _inside(face, u.location)]
        branch = [v for v in data.prime_zeros if v.location.imag > 0 and _inside(face, v.location)]
        strips.append(Strip(k + 1, lower.component, upper.component, interior, len(whole), zeros, ones,
                            branch, face))
    if not strips:
        raise IncompleteBoundary("no complete strip below t_max inside the window; enlarge it")
    return strips


# ---------------------------------------------------------------- subdivision curves

def _poly_dist(points, z) -> float:
    p = np.asarray(points)
    return float(min(point_segment_distance(z, p[k], p[k + 1]) for k in range(len(p) - 1)))


def _above_one_part(comp, u: complex, ev):
    """Part of a whole-axis component from its (1, +inf) window end to u (u appended)."""
    pts = np.asarray(comp.points)
    k = min(range(len(pts) - 1), key=lambda i: point_segment_distance(u, pts[i], pts[i + 1]))
    head = np.concatenate([pts[:k + 1], [u]])
    tail = np.concatenate([pts[k + 1:][::-1], [u]])
    return head if ev(complex(head[0]))[0].real > 1 else tail


def _lift_from_u(fid, u, v, fv, window, ctl):
    ev = evaluator(fid)
    kind = CurveKind.lift(1.0, fv)
    _, f1, _ = ev(u)
    d = (fv - 1.0) / f1
    d = d / abs(d)
    comp = trace(fid, kind, u + 1e-4 * d, ctl, window)
    pts = comp.points
    if comp.end.kind == BRANCH:
        end = comp.end.at
    elif comp.start.kind == BRANCH:
        end, pts = comp.start.at, pts[::-1]
    else:
        end = None
    if end is None or abs(end - v) > MATCH_TOL:
        return None
    pts = np.asarray(pts)
    if abs(pts[0] - u) > 1e-9:
        pts = np.concatenate([[u], pts])
    pts[-1] = v
    return pts, comp


def _lift_from_v(fid, v, fv, t_in, window, ctl):
    """Continuation of the lift through v on the other local branch, out to the window."""
    ev = evaluator(fid)
    kind = CurveKind.lift(1.0, fv)
    f0, _, f2 = ev(v)
    down = [d for d in branch_directions(kind, f0, f2)
            if ((f2 * d * d) * np.conj(1.0 - fv)).real > 0]
    d = max(down, key=lambda e: (e * np.conj(t_in)).real)
    comp = trace(fid, kind, v + 1e-3 * d, ctl, window)
    pts = np.asarray(comp.points)
    if abs(pts[0] - v) > abs(pts[-1] - v):
        pts = pts[::-1]
        far = comp.start
    else:
        far = comp.end
    if far.kind != WINDOW:
        raise LiftMismatch(f"the lift through {v} ends at {far.kind}, not on the window edge")
    w_end = ev(complex(pts[-1]))[0]
    if abs(w_end - 1.0) >= ONE_TOL:
        raise LiftMismatch(f"the lift through {v} leaves the window with |zeta - 1| = {abs(w_end - 1):.3g}")
    pts = pts.copy()
    pts[0] = v
    return pts


class CCurve:
    """The curve C_{k,j}: (1,+inf) part of Gamma_{k,j}, L'_{k,j} and L''_{k,j}."""

    def __init__(self, k, j, u, v, gamma_part, l1, l2, component):
        self.k, self.j = k, j
        self.u, self.v = u, v
        self.gamma_part, self.l1, self.l2 = gamma_part, l1, l2
        self.component = component

    @property
    def points(self):
        return np.concatenate([self.gamma_part, self.l1[1:], self.l2[1:]])

    @property
    def lift_kind(self):
        return CurveKind.lift(1.0, evaluator(FunctionId.zeta())(self.v)[0])

    @property
    def ref(self):
        return f"C_{self.k},{self.j}:{self.component.id}"

    def image_arc(self, fv_points=SEG_POINTS):
        fv = evaluator(FunctionId.zeta())(self.v)[0]
        lam = np.linspace(0.0, 1.0, fv_points)
        return ImageArc(tuple(complex(1.0 + s * (fv - 1.0)) for s in lam))


def strip_curves(strip: Strip, window: Window, ctl: StepControl = None):
    """Curves C_{k,j} of one strip, ordered bottom to top by their right-edge height."""
    ctl = ctl or StepControl()
    fid = FunctionId.zeta()
    ev = evaluator(fid)
    whole = strip.whole_components
    # every u lies on exactly one whole-axis component
    u_comp = {}
    for u in strip.one_points:
        best = min(whole, key=lambda c: _poly_dist(c.points, u.location)) if whole else None
        if best is not None and _poly_dist(best.points, u.location) < ON_CURVE_TOL:
            u_comp[u.location] = best
    used = set()
    curves = []
    for v in sorted(strip.branch_points, key=lambda c: c.location.imag):
        vz = v.location
        fv = ev(vz)[0]
        cands = sorted((u for u in u_comp if u not in used), key=lambda u: abs(u - vz))
        hit = None
        for u in cands:
            try:
                got = _lift_from_u(fid, u, vz, fv, window, ctl)
            except (SeedInvalid, StepCollapse):
                got = None
            if got is not None:
                hit = (u, got[0])
                break
        if hit is None:
            raise LiftMismatch(f"no one-point of strip {strip.k} lifts onto the branch point {vz}")
        u, l1 = hit
        used.add(u)
        t_in = l1[-1] - l1[-2]
        t_in = t_in / abs(t_in)
        l2 = _lift_from_v(fid, vz, fv, t_in, window, ctl)
        part = _above_one_part(u_comp[u], u, ev)
        curves.append(CCurve(strip.k, 0, u, vz, part, l1, l2, u_comp[u]))
    if len(curves) != strip.m:
        raise LiftMismatch(f"strip {strip.k}: {len(curves)} cut curves for m = {strip.m}")
    curves.sort(key=lambda c: c.points[-1].imag)
    for j, c in enumerate(curves, start=1):
        c.j = j
    hits = segment_intersections([c.points for c in curves])
    if any(i != j for i, _, j, _, _ in hits):
        raise CurveCrossing(f"cut curves of strip {strip.k} intersect")
    for c in curves:
        line = LineString(np.column_stack([c.points.real, c.points.imag]))
        if not line.is_simple:
            raise CurveCrossing(f"cut curve C_{c.k},{c.j} intersects itself")
    return curves


def _cut_chord(c: CCurve, window: Window):
    ch = make_chord(c.component, window, points=c.points, ref=c.ref, fid=FunctionId.zeta(),
                    end_kinds=(c.component.kind, c.lift_kind))
    if ch is None:
        raise IncompleteBoundary(f"C_{c.k},{c.j} does not run between window edges")
    ch.component = c
    return ch


def _strip_face_slit(outer_c, inner_c):
    pieces = [RealInterval(1.0, math.inf)]
    for c in (outer_c, inner_c):
        if isinstance(c, CCurve):
            pieces.append(c.image_arc())
    return SlitSpec(tuple(pieces))


def strip_subdivide(strip: Strip, window: Window, ctl: StepControl = None, curves=None):
    """The m + 1 domains Omega_{k,0..m} of one strip, bottom to top."""
    curves = strip_curves(strip, window, ctl) if curves is None else curves
    fid = FunctionId.zeta()
    lower = make_chord(strip.lower_boundary, window, ref=f"Gamma'_{strip.k}", fid=fid)
    upper = make_chord(strip.upper_boundary, window, ref=f"Gamma'_{strip.k + 1}", fid=fid)
    chain = [lower] + [_cut_chord(c, window) for c in curves] + [upper]
    nest_chain(chain)
    out = []
    for j in range(len(chain) - 1):
        pieces = face_between(window, chain[j], chain[j + 1])
        oc = chain[j].component if isinstance(chain[j].component, CCurve) else None
        ic = chain[j + 1].component if isinstance(chain[j + 1].component, CCurve) else None
        out.append(FundamentalDomain(f"Omega_{strip.k},{j}", pieces, _strip_face_slit(oc, ic),
                                     FunctionId.zeta(), j, role=DOMAIN, truncated=True))
    return out


# ---------------------------------------------------------------- atlas

def _red_axis_chords(data: ZetaTrace, window: Window):
    out = []
    for c in data.components:
        if c.color != RED or _on_axis(c):
            continue
        xs = [x.real for x in c.crossings if abs(x.imag) < 1e-9]
        if not xs:
            continue
        ch = make_chord(c, window, ref=f"red:{xs[0]:.6f}", fid=data.fid)
        if ch is not None:
            out.append((xs[0], ch))
    return out


def _left_slit(face: FundamentalDomain, data: ZetaTrace, ev, with_one: bool):
    """(-inf, max zeta(sigma_odd)] over the black real critical points on the face's axis part."""
    xs = []
    for p in face.boundary:
        if p.kind == "axis":
            xs.append((float(p.points.real.min()), float(p.points.real.max())))
    tops = []
    for c in data.prime_zeros:
        z = c.location
        if abs(z.imag) < 1e-12 and any(a <= z.real <= b for a, b in xs):
            val = ev(complex(z.real, 0.0))[0].real
            if val > 0:
                tops.append(val)
    if not tops:
        raise IncompleteBoundary(f"no real critical point with positive value on the axis of {face.label}")
    pieces = [RealInterval(-math.inf, max(tops))]
    if with_one:
        pieces.append(RealInterval(1.0, math.inf))
    return SlitSpec(tuple(pieces))


def zeta_domains(t_max: float, ctl: StepControl = None, trace_data: ZetaTrace = None, strips=None) -> Atlas:
    """Atlas of zeta domains in the upper half-window and their mirrors.

    Labels Omega_n count upward from the face just above Gamma'_1 (Omega_1); the face
    between the red curve through sigma_2 and Gamma'_1 is Omega_0 and the faces between
    the red curves through sigma_{2n+2} and sigma_{2n} are Omega_{-n}. Faces inside
    strip S_k carry the alias Omega_{k,j}.
    """
    ctl = ctl or StepControl()
    data = trace_data or ZetaTrace(zeta_window(t_max), ctl)
    window = data.window
    fid = data.fid
    ev = evaluator(fid)
    strips = strips if strips is not None else zeta_strips(t_max, ctl, data)
    reds = _red_axis_chords(data, window)
    gp = gamma_primes(data.components, window)
    gp_chords = [make_chord(c, window, ref=f"Gamma'_{k + 1}", fid=fid) for k, (_, c) in enumerate(gp)]
    anchor = gp_chords[0]
    alias = {}
    cut_chords = []
    for s in strips:
        for c in strip_curves(s, window, ctl):
            ch = _cut_chord(c, window)
            cut_chords.append(ch)
    chords = [ch for _, ch in reds] + gp_chords + cut_chords
    chain = nest_chain(chords)
    a = chain.index(anchor)
    top = chain.index(next(ch for ch in gp_chords if ch.component is strips[-1].upper_boundary))
    poles = [complex(1.0, 0.0)]
    gp_index = {id(ch): k + 1 for k, ch in enumerate(gp_chords)}
    regions = []
    strip_k, strip_j = None, 0
    for i in range(-1, len(chain)):
        outer = chain[i] if i >= 0 else None
        inner = chain[i + 1] if i + 1 < len(chain) else None
        n = i - a + 1
        if outer is not None and id(outer) in gp_index:
            strip_k, strip_j = gp_index[id(outer)], 0
        elif outer is not None and isinstance(outer.component, CCurve):
            strip_j += 1
        pieces = face_between(window, outer, inner, axis_bottom=True, poles=poles)
        if outer is None or inner is None or i >= top:
            regions.append(FundamentalDomain(f"remainder:{n}", pieces, SlitSpec(()), fid, n, role=REMAINDER))
            continue
        dom = FundamentalDomain(f"Omega_{n}", pieces, SlitSpec(()), fid, n, role=DOMAIN, truncated=True)
        if n >= 1:
            oc = outer.component if isinstance(outer.component, CCurve) else None
            ic = inner.component if isinstance(inner.component, CCurve) else None
            dom.slit = _strip_face_slit(oc, ic)
            dom.alias = f"Omega_{strip_k},{strip_j}"
        else:
            dom.slit = _left_slit(dom, data, ev, with_one=(n == 0))
        regions.append(dom)
    regions += [mirror_domain(d) for d in list(regions)]
    full = Window(window.sigma_min, window.sigma_max, -window.t_max, window.t_max)
    crit = [c.location for c in data.prime_zeros]
    return Atlas(fid, full, regions, data.components, strips=strips, crit=crit, min_step=ctl.min_step,
                 meta={"kind": "zeta", "t_max": float(t_max), "upper_window": list(window.as_tuple())})

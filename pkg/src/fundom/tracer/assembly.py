"""Seeding, full pre-image assembly, and topological audits of traced curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..errors import BracketFailure, NoSeedsFound, SeedInvalid, StepCollapse
from ..funcval import FunctionId, evaluator, values
from ..geometry import PolylineIndex, Window, as_xy, segment_intersections
from .continuation import branch_directions, correct, polish_critical, trace
from .curves import CIRCLE, LIFT, RAY, REAL_AXIS, CurveComponent, CurveKind, StepControl

COVER_TOL = 5e-4   # a seed this close to a traced polyline is already covered
MERGE_TOL = 5e-4   # vertex distance used when detecting duplicate components


class Assembly(list):
    """List of traced components plus the failures met while tracing them."""

    def __init__(self, items=(), failures=(), seeds=0):
        super().__init__(items)
        self.failures = list(failures)
        self.seeds = seeds


# ---------------------------------------------------------------- seeding

def _sign_change_points(Z, G):
    """Linear-interpolation candidates on grid edges where G changes sign."""
    out = []
    for a, b, ga, gb in ((Z[:, :-1], Z[:, 1:], G[:, :-1], G[:, 1:]),
                         (Z[:-1, :], Z[1:, :], G[:-1, :], G[1:, :])):
        m = np.isfinite(ga) & np.isfinite(gb) & (ga * gb < 0)
        if np.any(m):
            w = ga[m] / (ga[m] - gb[m])
            out.append(a[m] + w * (b[m] - a[m]))
    return np.concatenate(out) if out else np.zeros(0, complex)


def _boundary_samples(window: Window, n: int):
    c = window.corners()
    segs = []
    for k in range(4):
        a, b = c[k], c[(k + 1) % 4]
        segs.append(a + np.linspace(0, 1, n + 1) * (b - a))
    return segs


def real_critical_points(fid: FunctionId, window: Window, n: int = 4000):
    """Real zeros of f' inside the window for real-symmetric f (sign scan + Newton)."""
    if not fid.real_symmetric or not (window.t_min <= 0 <= window.t_max):
        return []
    ev = evaluator(fid)
    xs = np.linspace(window.sigma_min, window.sigma_max, n)
    d = np.array([_safe(ev, complex(x, 0))[1].real for x in xs])
    out = []
    for i in range(n - 1):
        if np.isfinite(d[i]) and np.isfinite(d[i + 1]) and d[i] * d[i + 1] < 0:
            # discard sign changes across poles
            p, _ = fid.nearest_pole(complex(0.5 * (xs[i] + xs[i + 1]), 0))
            if p is not None and xs[i] <= p.real <= xs[i + 1] and p.imag == 0:
                continue
            c, ok = polish_critical(ev, complex(0.5 * (xs[i] + xs[i + 1]), 0))
            if ok and xs[i] - 1e-9 <= c.real <= xs[i + 1] + 1e-9:
                out.append(complex(c.real, 0.0))
    return out


def _safe(ev, z):
    try:
        return ev(z)
    except ZeroDivisionError:
        return (complex(math.inf, 0),) * 3


def _radial_candidates(fid, kind, centers, window, n_dirs=8, n_r=80):
    out = []
    if kind.variant not in (CIRCLE, RAY):
        return out
    diag = math.hypot(window.width, window.height)
    rs = np.geomspace(1e-10, diag, n_r)
    for p in centers:
        for k in range(n_dirs):
            e = np.exp(1j * (2 * np.pi * k / n_dirs + 0.1))
            Z = p + rs * e
            F, _ = values(fid, Z)
            G = kind.signed(F)
            for i in range(n_r - 1):
                if np.isfinite(G[i]) and np.isfinite(G[i + 1]) and G[i] * G[i + 1] < 0:
                    lo, hi = rs[i], rs[i + 1]
                    glo = G[i]
                    for _ in range(60):
                        mid = 0.5 * (lo + hi)
                        gm = kind.signed(values(fid, np.array([p + mid * e]))[0])[0]
                        if gm * glo > 0:
                            lo, glo = mid, gm
                        else:
                            hi = mid
                    out.append(p + 0.5 * (lo + hi) * e)
    return out


def seeds_for(fid: FunctionId, kind: CurveKind, window: Window, grid_n: int = 64,
              ctl: StepControl = None, centers=(), boundary_factor: int = 16):
    """Points on the level curve found by sign-change scans of the grid and window edges."""
    if grid_n < 8:
        raise ValueError("grid_n must be at least 8")
    ctl = ctl or StepControl()
    ev = evaluator(fid)
    Z = window.grid(grid_n, grid_n)
    with np.errstate(all="ignore"):
        F, _ = values(fid, Z)
        G = kind.signed(F)
        axis_kind = fid.real_symmetric and kind.variant == REAL_AXIS
        if axis_kind:
            G[Z.imag == 0] = 0.0
        cands = [_sign_change_points(Z, G)]
        for seg in _boundary_samples(window, boundary_factor * grid_n):
            Fb, _ = values(fid, seg)
            Gb = kind.signed(Fb)
            if axis_kind:
                Gb[seg.imag == 0] = 0.0
            m = np.isfinite(Gb[:-1]) & np.isfinite(Gb[1:]) & (Gb[:-1] * Gb[1:] < 0)
            w = Gb[:-1][m] / (Gb[:-1][m] - Gb[1:][m])
            cands.append(seg[:-1][m] + w * (seg[1:][m] - seg[:-1][m]))
    extra = []
    if axis_kind and window.t_min <= 0 <= window.t_max:
        extra += _real_line_seeds(fid, window)
    extra += _radial_candidates(fid, kind, list(centers), window)
    cand = np.concatenate(cands + [np.array(extra, dtype=complex)])
    seeds = []
    for z in cand:
        zc, vals, ok = correct(ev, kind, complex(z), ctl.corrector_tol)
        if not ok or not window.contains(zc, pad=1e-9) or not kind.admissible(vals[0]):
            continue
        if abs(zc - z) > 2 * max(window.width, window.height) / grid_n:
            continue
        if abs(vals[1]) <= ctl.branch_tol * max(1.0, abs(vals[2]) * ctl.max_step):
            continue
        seeds.append(zc)
    seeds = _dedupe(seeds, ctl.min_step)
    if not seeds:
        raise NoSeedsFound(f"no {kind.variant} seeds in window {window.as_tuple()}")
    return seeds


def _real_line_seeds(fid, window):
    """One seed per real interval between consecutive poles (midpoints)."""
    poles = [p.real for p in fid.poles_in(window.sigma_min, window.sigma_max, -1e-300, 1e-300)]
    cuts = [window.sigma_min] + sorted(poles) + [window.sigma_max]
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a > 1e-9:
            out.append(complex(a + 0.37 * (b - a), 0.0))
    return out


def _dedupe(points, tol):
    if not points:
        return []
    pts = sorted(set(points), key=lambda z: (z.imag, z.real))
    tree = cKDTree(as_xy(pts))
    keep = []
    taken = np.zeros(len(pts), bool)
    for i, p in enumerate(pts):
        if taken[i]:
            continue
        keep.append(p)
        for j in tree.query_ball_point([p.real, p.imag], tol):
            taken[j] = True
    return keep


# ---------------------------------------------------------------- assembly

def assemble(fid: FunctionId, kind: CurveKind, window: Window, ctl: StepControl, seeds,
             priority_seeds=()) -> Assembly:
    """Trace every seed not already covered by a traced component; drop duplicates."""
    comps, failures = [], []
    polylines = []
    index = PolylineIndex([])
    ordered = list(priority_seeds) + sorted(seeds, key=lambda z: (z.imag, z.real))
    for s in ordered:
        if polylines and index.distance(s)[0] < COVER_TOL:
            continue
        try:
            c = trace(fid, kind, s, ctl, window)
        except StepCollapse as e:
            failures.append(e)
            c = e.partial
        except SeedInvalid:
            continue
        comps.append(c)
        polylines.append(c.points)
        index = PolylineIndex(polylines)
    comps = merge_duplicates(comps)
    return Assembly(comps, failures, seeds=len(ordered))


def merge_duplicates(comps, tol=MERGE_TOL, frac=0.9):
    keep = []
    for c in sorted(comps, key=lambda c: -len(c.points)):
        dup = False
        for k in keep:
            idx = PolylineIndex([k.points])
            near = sum(idx.distance(p)[0] < tol for p in c.points)
            if near >= frac * len(c.points):
                dup = True
                break
        if not dup:
            keep.append(c)
    keep.sort(key=lambda c: (c.points[0].imag, c.points[0].real, len(c.points)))
    return keep


def _crit_seeds(fid, kind, crit, window, eps=1e-3):
    ev = evaluator(fid)
    out = []
    for c in crit:
        f0, _, f2 = ev(c)
        if kind.residual(f0) > 1e-9:
            continue
        for u in branch_directions(kind, f0, f2):
            z = c + eps * u
            if window.contains(z):
                out.append(z)
    return out


def preimage_real_axis(fid: FunctionId, window: Window, ctl: StepControl = None, grid_n: int = 64,
                       crit=None) -> Assembly:
    """All components of f^{-1}(R) meeting the window."""
    ctl = ctl or StepControl()
    kind = CurveKind.real_axis()
    crit = real_critical_points(fid, window) if crit is None else list(crit)
    try:
        seeds = seeds_for(fid, kind, window, grid_n, ctl)
    except NoSeedsFound:
        seeds = []
    pri = _crit_seeds(fid, kind, crit, window)
    if fid.real_symmetric and window.t_min <= 0 <= window.t_max:
        pri = _real_line_seeds(fid, window) + pri
    asm = assemble(fid, kind, window, ctl, seeds, pri)
    asm.crit = crit
    return asm


def default_centers(fid: FunctionId, window: Window):
    """Zeros and poles in the window, used to seed small circle pre-images."""
    centers = list(fid.poles_in(*window.as_tuple()))
    if fid.variant == "Zeta":
        from ..critpoints import zeta_zeros_in_window
        centers += zeta_zeros_in_window(window)
    elif fid.variant == "Polynomial":
        centers += [complex(r) for r in np.roots(np.array(fid.coeffs)) if window.contains(complex(r))]
    return centers


def preimage_circle(fid: FunctionId, rho: float, window: Window, ctl: StepControl = None,
                    grid_n: int = 64, centers=None) -> Assembly:
    """All components of |f| = rho meeting the window."""
    ctl = ctl or StepControl()
    kind = CurveKind.circle(rho)
    centers = default_centers(fid, window) if centers is None else list(centers)
    try:
        seeds = seeds_for(fid, kind, window, grid_n, ctl, centers=centers)
    except NoSeedsFound:
        return Assembly([])
    return assemble(fid, kind, window, ctl, seeds)


def preimage_ray(fid: FunctionId, theta: float, window: Window, ctl: StepControl = None,
                 grid_n: int = 64, centers=None) -> Assembly:
    ctl = ctl or StepControl()
    kind = CurveKind.ray(theta)
    centers = default_centers(fid, window) if centers is None else list(centers)
    try:
        seeds = seeds_for(fid, kind, window, grid_n, ctl, centers=centers)
    except NoSeedsFound:
        return Assembly([])
    return assemble(fid, kind, window, ctl, seeds)


# ---------------------------------------------------------------- audits

@dataclass
class AuditReport:
    passed: bool
    intersections: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    detail: str = ""


def crossing_audit(components, crit, match_tol: float = 1e-6) -> AuditReport:
    """Every intersection between (or within) traced components must sit at a critical point
    or at a shared endpoint."""
    comps = list(components)
    crit = [complex(c) for c in crit]
    hits = segment_intersections([c.points for c in comps])
    ctree = cKDTree(as_xy(crit)) if crit else None
    ends = []
    for c in comps:
        if len(c.points):
            ends += [c.points[0], c.points[-1]]
    etree = cKDTree(as_xy(ends)) if ends else None
    found, bad = [], []
    seen = []
    for i, si, j, sj, p in hits:
        if any(abs(p - q) < 1e-12 for q in seen):
            continue
        seen.append(p)
        found.append(p)
        ok = False
        if ctree is not None and ctree.query([p.real, p.imag])[0] <= match_tol:
            ok = True
        elif etree is not None:
            near = etree.query_ball_point([p.real, p.imag], match_tol)
            ok = len(near) >= 2
        if i == j and comps[i].closed and {si, sj} == {0, len(comps[i].points) - 2}:
            ok = True  # closing vertex of a loop
        if not ok:
            bad.append((i, j, p))
    return AuditReport(not bad, found, bad,
                       f"{len(found)} intersections, {len(bad)} away from critical points")


def axis_crossings(components):
    """(x, color) for every recorded crossing of the real axis by a non-axis component."""
    out = []
    for c in components:
        if c.kind.variant != REAL_AXIS or np.all(np.abs(c.points.imag) < 1e-12):
            continue
        for x in c.crossings:
            if abs(x.imag) < 1e-12:
                out.append((x.real, c.color))
    return sorted(out)


def color_alternation(components) -> AuditReport:
    """Colors of the curves crossing the real axis alternate along the axis."""
    xs = axis_crossings(components)
    bad = [(a, b) for a, b in zip(xs, xs[1:]) if a[1] == b[1]]
    return AuditReport(not bad and len(xs) > 0, [x for x, _ in xs], bad,
                       f"{len(xs)} axis crossings, colors {''.join(c[0] for _, c in xs)}")


def circle_axis_alternation(fid: FunctionId, circle_components, axis_components) -> AuditReport:
    """Walking along each circle pre-image, the real-axis pre-images met alternate in sign."""
    ev = evaluator(fid)
    bad, total = [], 0
    axis_lines = [c.points for c in axis_components]
    for ci, circ in enumerate(circle_components):
        hits = segment_intersections([circ.points] + axis_lines)
        pos = []
        for i, si, j, sj, p in hits:
            if i == 0 and j > 0:
                a, b = circ.points[si], circ.points[si + 1]
                frac = abs(p - a) / abs(b - a) if b != a else 0.0
                pos.append((si + frac, p))
        pos.sort(key=lambda x: x[0])
        uniq = []
        for s, p in pos:
            if not uniq or abs(p - uniq[-1][1]) > 1e-9:
                uniq.append((s, p))
        signs = [np.sign(ev(p)[0].real) for _, p in uniq]
        total += len(signs)
        seq = signs + ([signs[0]] if circ.closed and len(signs) > 1 else [])
        for k in range(len(seq) - 1):
            if seq[k] == seq[k + 1]:
                bad.append((ci, uniq[k % len(uniq)][1]))
    return AuditReport(not bad, [], bad, f"{total} circle/axis intersections checked")


def near_nodes(components, crit, radius: float = 1e-2):
    """Critical points approached by at least two distinct arcs within radius."""
    out = []
    for v in crit:
        arcs = 0
        for c in components:
            close = np.abs(c.points - v) < radius
            if not np.any(close):
                continue
            runs = int(np.sum(close[1:] & ~close[:-1]) + (1 if close[0] else 0))
            if c.closed and close[0] and close[-1]:
                runs -= 1
            arcs += max(runs, 1)
        if arcs >= 2:
            out.append((v, arcs))
    return out


# ---------------------------------------------------------------- merge radius

@dataclass
class MergeResult:
    rho: float
    lo: float
    hi: float
    evaluations: int
    history: list = field(default_factory=list)   # (rho, closed, zeros enclosed)

    def to_dict(self):
        return {"rho": self.rho, "lo": self.lo, "hi": self.hi, "evaluations": self.evaluations,
                "history": [list(h) for h in self.history]}


def first_level_point(fid: FunctionId, center: complex, rho: float, direction: complex = 1.0,
                      r_max: float = 2.0, n: int = 2000) -> complex:
    """First point with |f| = rho on the ray from a zero of f in the given direction."""
    ev = evaluator(fid)
    e = direction / abs(direction)
    rs = np.linspace(0.0, r_max, n + 1)[1:]
    F, _ = values(fid, center + rs * e)
    g = np.abs(F) - rho
    idx = np.flatnonzero(np.isfinite(g) & (g > 0))
    if len(idx) == 0 or idx[0] == 0 and g[0] > 0:
        raise NoSeedsFound(f"|f| does not cross {rho} along the ray from {center}")
    i = idx[0]
    lo, hi = rs[i - 1], rs[i]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if abs(ev(center + mid * e)[0]) < rho:
            lo = mid
        else:
            hi = mid
    return center + 0.5 * (lo + hi) * e


def loop_around(fid: FunctionId, center: complex, rho: float, window: Window, ctl: StepControl = None,
                zeros=None):
    """The |f| = rho component bounding the sub-level region around a zero, and the zeros it encloses."""
    ctl = ctl or StepControl()
    seed = None
    for direction in (-1.0, 1j, -1j, 1.0):
        try:
            seed = first_level_point(fid, center, rho, direction, r_max=math.hypot(window.width, window.height))
            break
        except NoSeedsFound:
            continue
    if seed is None:
        raise NoSeedsFound(f"no point with |f| = {rho} on rays from {center}")
    comp = trace(fid, CurveKind.circle(rho), seed, ctl, window)
    zeros = default_centers(fid, window) if zeros is None else zeros
    if not comp.closed:
        return comp, None
    from shapely.geometry import Point, Polygon
    poly = Polygon(as_xy(comp.points))
    if not poly.is_valid:
        poly = poly.buffer(0)
    inside = sum(1 for z in zeros if poly.contains(Point(z.real, z.imag)) and abs(values(fid, np.array([z]))[0][0]) < 1e-6)
    return comp, inside


def merge_radius(fid: FunctionId, center: complex, window: Window, lo: float, hi: float, tol: float = 1e-4,
                 ctl: StepControl = None) -> MergeResult:
    """Bisection for the level rho at which the loop |f| = rho around a zero stops enclosing it alone.

    At rho = lo the component of |f| = rho around the zero must be a closed loop enclosing
    exactly that zero; at rho = hi it must either leave the window or enclose further zeros.
    """
    ctl = ctl or StepControl()
    zeros = default_centers(fid, window)
    history = []

    def isolated(rho):
        try:
            comp, n = loop_around(fid, center, rho, window, ctl, zeros)
        except StepCollapse as e:
            comp, n = e.partial, None
        history.append((rho, bool(comp is not None and comp.closed), n))
        return n == 1

    if not isolated(lo):
        raise BracketFailure(f"rho = {lo} does not give an isolated loop around {center}")
    if isolated(hi):
        raise BracketFailure(f"rho = {hi} still gives an isolated loop around {center}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if isolated(mid):
            lo = mid
        else:
            hi = mid
    return MergeResult(0.5 * (lo + hi), lo, hi, len(history), history)

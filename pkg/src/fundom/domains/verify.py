"""Winding-number verification of domains, point inversion inside a domain."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import shapely

from ..errors import NewtonEscape
from ..funcval import evaluator, values
from ..geometry import arg_change
from .model import CURVE, EDGE, INDENT, FundamentalDomain

TARGET_SLIT_DISTANCE = 0.1   # winding targets keep this distance (times min(1, |w|)) from the slit
IMG_TOL = 1e-6


# ---------------------------------------------------------------- winding

class BoundaryWinding:
    """Winding numbers of f - w along the closed boundary of a domain, for many targets w."""

    def __init__(self, dom: FundamentalDomain):
        self.dom = dom
        self.ev = evaluator(dom.fid)
        path = dom.path
        self.Z = np.concatenate([path, path[:1]])
        with np.errstate(all="ignore"):
            self.F = values(dom.fid, self.Z)[0]
        self.edge_mask = np.zeros(len(self.Z), bool)
        k = 0
        for p in dom.boundary:
            n = len(p.points)
            if p.kind in (EDGE, INDENT):
                self.edge_mask[k:k + n] = True
            k += n
        self.edge_mask = self.edge_mask[: len(self.Z)]

    def winding(self, w: complex) -> float:
        A = self.F - w
        with np.errstate(all="ignore"):
            d = np.angle(A[1:] / A[:-1])
        bad = ~np.isfinite(d) | (np.abs(d) > math.pi / 4)
        total = float(np.sum(d[~bad]))
        g = lambda z: self.ev(z)[0] - w  # noqa: E731
        for i in np.flatnonzero(bad):
            ch, _ = arg_change(g, self.Z[i], self.Z[i + 1], A[i], A[i + 1])
            if not math.isfinite(ch):
                return math.nan
            total += ch
        return total / (2 * math.pi)

    def near_edge_image(self, w: complex, rel: float = TARGET_SLIT_DISTANCE) -> bool:
        """True when w is close to the image of the window-edge part of the boundary."""
        E = self.F[self.edge_mask]
        E = E[np.isfinite(E)]
        if len(E) == 0:
            return False
        return bool(np.min(np.abs(E - w)) / max(1.0, abs(w)) < rel)


# ---------------------------------------------------------------- sampling

def interior_samples(dom: FundamentalDomain, n: int, rng: np.random.Generator, margin: float = 2e-3,
                     max_rounds: int = 200):
    """n uniformly random points of the domain at distance > margin from its boundary."""
    poly = dom.polygon
    inner = poly.buffer(-margin)
    if inner.is_empty:
        return np.zeros(0, complex)
    x0, y0, x1, y1 = inner.bounds
    out = []
    for _ in range(max_rounds):
        k = max(64, 4 * n)
        xs = rng.uniform(x0, x1, k)
        ys = rng.uniform(y0, y1, k)
        ok = shapely.contains_xy(inner, xs, ys)
        out += list(xs[ok] + 1j * ys[ok])
        if len(out) >= n:
            break
    return np.array(out[:n], dtype=complex)


# ---------------------------------------------------------------- inversion

def _chordal(a, b):
    a = np.asarray(a)
    with np.errstate(all="ignore"):
        d = np.abs(a - b) / np.sqrt((1 + np.abs(a) ** 2) * (1 + abs(b) ** 2))
    return np.where(np.isfinite(d), d, np.where(np.isinf(np.abs(a)), 1.0 / np.sqrt(1 + abs(b) ** 2), 2.0))


class Inverter:
    """Inverse of f restricted to one domain, by continuation from interior anchors."""

    def __init__(self, dom: FundamentalDomain, n_grid: int = 28, margin: float = 2e-3):
        self.dom = dom
        self.ev = evaluator(dom.fid)
        poly = dom.polygon
        inner = poly.buffer(-margin)
        x0, y0, x1, y1 = poly.bounds
        xs = np.linspace(x0, x1, n_grid + 2)[1:-1]
        ys = np.linspace(y0, y1, n_grid + 2)[1:-1]
        X, Y = np.meshgrid(xs, ys)
        X, Y = X.ravel(), Y.ravel()
        ok = shapely.contains_xy(inner, X, Y) if not inner.is_empty else np.zeros(len(X), bool)
        anchors = list(X[ok] + 1j * Y[ok])
        for p in dom.boundary:
            if p.kind == INDENT:
                c = 0.5 * (p.points[0] + p.points[-1])
                r = abs(p.points[0] - c)
                for th in np.linspace(0.2, math.pi - 0.2, 7):
                    for s in (3.0, 10.0, 30.0):
                        z = c + s * r * cmath.exp(1j * th * (1 if p.points[len(p.points) // 2].imag >= c.imag else -1))
                        if dom.contains(z):
                            anchors.append(z)
            elif p.kind == CURVE and len(p.points) > 4:
                # anchors just inside the curve pieces
                for k in range(2, len(p.points) - 2, max(1, len(p.points) // 24)):
                    a, b = p.points[k - 1], p.points[k + 1]
                    t = (b - a) / abs(b - a) if b != a else 1
                    for s in (0.01, 0.05):
                        for side in (1j, -1j):
                            z = p.points[k] + s * side * t
                            if dom.contains(z) and dom.boundary_distance(z) > margin:
                                anchors.append(z)
        self.anchors = np.array(anchors, dtype=complex)
        pad = 0.25
        self.box = (x0 - pad, x1 + pad, y0 - pad, y1 + pad)
        with np.errstate(all="ignore"):
            self.FA = values(dom.fid, self.anchors)[0] if len(anchors) else np.zeros(0, complex)
        good = np.isfinite(self.FA)
        self.anchors, self.FA = self.anchors[good], self.FA[good]

    def invert(self, w: complex, tries: int = 8, tol: float = 1e-12):
        """The unique z in the domain with f(z) = w."""
        w = complex(w)
        if len(self.anchors) == 0:
            raise NewtonEscape(f"no anchors in {self.dom.label}")
        order = np.argsort(_chordal(self.FA, w), kind="stable")
        for i in order[:tries]:
            z = self._continue(self.anchors[i], self.FA[i], w)
            if z is None:
                continue
            if self.dom.contains(z) and abs(self.ev(z)[0] - w) <= tol * max(1.0, abs(w)) * 100:
                return z
        raise NewtonEscape(f"inversion of {w} in {self.dom.label} left the domain from every anchor")

    def _continue(self, z, w0, w1, max_steps=150):
        ev = self.ev
        s, ds = 0.0, 1.0
        zc = complex(z)
        f0 = complex(w0)
        steps = 0
        while s < 1.0 and steps < max_steps:
            steps += 1
            ds = min(ds, 1.0 - s)
            wt = w0 + (s + ds) * (w1 - w0)
            # limit the relative image change per step
            lim = 0.3 * max(abs(f0), 1e-3)
            if abs(wt - f0) > lim:
                ds *= lim / abs(wt - f0)
                wt = w0 + (s + ds) * (w1 - w0)
            zn = self._newton(zc, wt)
            if zn is not None and not self._in_box(zn):
                return None  # the path leaves the (truncated) domain
            if zn is None or abs(zn - zc) > 0.5:
                ds *= 0.5
                if ds < 1e-12:
                    return None
                continue
            zc, f0, s = zn, wt, s + ds
            ds = min(2 * ds, 1.0)
        if s < 1.0:
            return None
        return self._newton(zc, w1, iters=20, tol=1e-15)

    def _in_box(self, z) -> bool:
        a, b, c, d = self.box
        return a <= z.real <= b and c <= z.imag <= d

    def _newton(self, z, w, iters=12, tol=1e-13):
        ev = self.ev
        for _ in range(iters):
            try:
                f0, f1, _ = ev(z)
            except (ZeroDivisionError, OverflowError):
                return None
            if f1 == 0 or not (cmath.isfinite(f0) and cmath.isfinite(f1)):
                return None
            with np.errstate(all="ignore"):
                dz = complex((f0 - w) / f1)
            if not cmath.isfinite(dz):
                return None
            z = z - dz
            if not self._in_box(z):
                return None
            if abs(dz) <= tol * (1 + abs(z)):
                return z
        f0 = ev(z)[0]
        return z if abs(f0 - w) <= 1e-10 * max(1.0, abs(w)) else None


def target_allowed(slit, w: complex) -> bool:
    """Off-slit target test: distance from the slit above 0.1 * min(1, |w|)."""
    return slit.raw_distance(w) > TARGET_SLIT_DISTANCE * min(1.0, abs(w))


# ---------------------------------------------------------------- report

@dataclass
class VerifyReport:
    label: str
    max_slit_distance: float
    containment_ok: bool
    n_targets: int
    winding_counts: dict
    pass_rate: float
    flagged: int
    interior_checked: int
    interior_max_error: float
    passed: bool
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {k: (v if not isinstance(v, float) or math.isfinite(v) else str(v))
                for k, v in self.__dict__.items()}


def slit_distance_max(dom: FundamentalDomain) -> float:
    worst = 0.0
    for p in dom.slit_pieces():
        with np.errstate(all="ignore"):
            F = values(dom.fid, p.points)[0]
        for w in F:
            if np.isfinite(w):
                worst = max(worst, dom.slit.distance(complex(w)))
    return worst


def domain_verify(dom: FundamentalDomain, n_samples: int = 200, seed: int = 0, img_tol: float = IMG_TOL,
                  n_interior: int = 20, min_pass: float = 0.99) -> VerifyReport:
    """Slit containment, winding-1 sampling and inversion consistency for one domain.

    Targets are w = f(p) for random interior points p, kept when their distance from
    the slit exceeds 0.1 * min(1, |w|); the winding of f - w along the (window-truncated)
    boundary then counts the pre-images of w inside the truncated domain.
    """
    rng = np.random.default_rng(seed)
    dmax = slit_distance_max(dom)
    bw = BoundaryWinding(dom)
    ev = evaluator(dom.fid)
    pts = interior_samples(dom, 4 * n_samples, rng)
    targets, sources = [], []
    for p in pts:
        w = ev(p)[0]
        if cmath.isfinite(w) and target_allowed(dom.slit, w):
            targets.append(w)
            sources.append(p)
        if len(targets) >= n_samples:
            break
    counts, ok, flagged = {}, 0, 0
    for w in targets:
        wn = bw.winding(w)
        key = str(int(round(wn))) if math.isfinite(wn) else "nan"
        counts[key] = counts.get(key, 0) + 1
        if key == "1" and abs(wn - 1) < 1e-6:
            ok += 1
        elif bw.near_edge_image(w):
            flagged += 1
    rate = ok / len(targets) if targets else 0.0
    inv = Inverter(dom)
    errs = []
    for p, w in list(zip(sources, targets))[:n_interior]:
        try:
            z = inv.invert(w)
            errs.append(abs(z - p))
        except NewtonEscape:
            errs.append(math.inf)
    emax = max(errs) if errs else 0.0
    notes = []
    if dom.truncated:
        notes.append("boundary closed along the window edge")
    passed = dmax < img_tol and rate >= min_pass and len(targets) > 0
    return VerifyReport(dom.label, dmax, dmax < img_tol, len(targets), counts, rate, flagged,
                        len(errs), emax, passed, notes)

"""Data types of the domain atlas: slits, boundary pieces, domains, strips and the atlas."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import shapely
from shapely.geometry import Point, Polygon
from shapely.prepared import prep

from ..errors import OnBoundary, OutsideAtlas
from ..funcval import FunctionId
from ..geometry import Window, as_xy, point_segment_distance

CURVE = "curve"      # traced pre-image curve (image inside the slit)
AXIS = "axis"        # real-axis piece (image inside the slit)
EDGE = "window"      # truncation along the window edge
INDENT = "indent"    # small half circle around a pole on the real axis

DOMAIN = "domain"
REMAINDER = "remainder"  # window region missing one of its defining curves


@dataclass(frozen=True)
class RealInterval:
    a: float
    b: float

    def distance(self, w: complex) -> float:
        x = min(max(w.real, self.a), self.b)
        return math.hypot(w.real - x, w.imag)

    def to_dict(self):
        return {"type": "RealInterval", "a": _num(self.a), "b": _num(self.b)}


@dataclass(frozen=True)
class ImageArc:
    points: tuple

    def distance(self, w: complex) -> float:
        p = self.points
        if len(p) == 1:
            return abs(w - p[0])
        return min(point_segment_distance(w, p[k], p[k + 1]) for k in range(len(p) - 1))

    def to_dict(self):
        return {"type": "ImageArc", "points": [[z.real, z.imag] for z in self.points]}


def _num(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _unnum(x):
    return float(x) if not isinstance(x, str) else (math.inf if x == "inf" else -math.inf)


@dataclass(frozen=True)
class SlitSpec:
    pieces: tuple

    def distance(self, w: complex) -> float:
        """Scale-aware distance: Euclidean distance divided by max(1, |w|)."""
        if not self.pieces:
            return math.inf
        d = min(p.distance(w) for p in self.pieces)
        return d / max(1.0, abs(w))

    def raw_distance(self, w: complex) -> float:
        if not self.pieces:
            return math.inf
        return min(p.distance(w) for p in self.pieces)

    def to_dict(self):
        return {"pieces": [p.to_dict() for p in self.pieces]}

    @classmethod
    def from_dict(cls, d):
        out = []
        for p in d["pieces"]:
            if p["type"] == "RealInterval":
                out.append(RealInterval(_unnum(p["a"]), _unnum(p["b"])))
            else:
                out.append(ImageArc(tuple(complex(*q) for q in p["points"])))
        return cls(tuple(out))

    def describe(self) -> str:
        parts = []
        for p in self.pieces:
            if isinstance(p, RealInterval):
                parts.append(f"[{p.a:.6g}, {p.b:.6g}]")
            else:
                parts.append(f"arc {p.points[0]:.4g} -> {p.points[-1]:.4g}")
        return " U ".join(parts)

    def conjugate(self) -> "SlitSpec":
        out = []
        for p in self.pieces:
            if isinstance(p, RealInterval):
                out.append(p)
            else:
                out.append(ImageArc(tuple(z.conjugate() for z in p.points)))
        return SlitSpec(tuple(out))


@dataclass(eq=False)
class BoundaryPiece:
    kind: str
    points: np.ndarray
    ref: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)

    def __eq__(self, other):
        return (isinstance(other, BoundaryPiece) and self.kind == other.kind and self.ref == other.ref
                and np.array_equal(self.points, other.points))

    def to_dict(self):
        return {"kind": self.kind, "ref": self.ref,
                "points": [[z.real, z.imag] for z in self.points.tolist()]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], np.array([complex(*p) for p in d["points"]], dtype=complex), d["ref"])


@dataclass(eq=False)
class FundamentalDomain:
    label: str
    boundary: list
    slit: SlitSpec
    fid: FunctionId
    index: int = 0
    mirror: bool = False
    role: str = DOMAIN
    alias: str = ""
    truncated: bool = True
    empirical_hull: tuple = ()
    _poly: Optional[Polygon] = field(default=None, repr=False)
    _prep: object = field(default=None, repr=False)

    def __eq__(self, other):
        return (isinstance(other, FundamentalDomain) and self.label == other.label
                and self.boundary == other.boundary and self.slit == other.slit
                and self.fid == other.fid and self.index == other.index and self.mirror == other.mirror
                and self.role == other.role and self.alias == other.alias
                and self.truncated == other.truncated and tuple(self.empirical_hull) == tuple(other.empirical_hull))

    @property
    def path(self) -> np.ndarray:
        """Closed boundary polyline (first point not repeated)."""
        pts = np.concatenate([p.points for p in self.boundary])
        keep = np.ones(len(pts), bool)
        keep[1:] = np.abs(np.diff(pts)) > 0
        pts = pts[keep]
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts = pts[:-1]
        return pts

    @property
    def polygon(self) -> Polygon:
        if self._poly is None:
            poly = Polygon(as_xy(self.path))
            if not poly.is_valid:
                poly = shapely.make_valid(poly)
                if poly.geom_type != "Polygon":
                    poly = max(getattr(poly, "geoms", [poly]), key=lambda g: g.area)
            self._poly = poly
            self._prep = prep(poly)
        return self._poly

    def contains(self, z: complex) -> bool:
        self.polygon
        return bool(self._prep.contains(Point(z.real, z.imag)))

    def boundary_distance(self, z: complex) -> float:
        return float(self.polygon.exterior.distance(Point(z.real, z.imag)))

    def slit_pieces(self):
        """Boundary pieces whose image must lie in the slit."""
        return [p for p in self.boundary if p.kind in (CURVE, AXIS)]

    def to_dict(self):
        return {"label": self.label, "alias": self.alias, "index": self.index, "mirror": self.mirror,
                "role": self.role, "truncated": self.truncated, "fid": self.fid.to_dict(),
                "slit": self.slit.to_dict(), "boundary": [p.to_dict() for p in self.boundary],
                "empirical_hull": [list(h) for h in self.empirical_hull]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["label"], [BoundaryPiece.from_dict(p) for p in d["boundary"]],
                   SlitSpec.from_dict(d["slit"]), FunctionId.from_dict(d["fid"]), int(d["index"]),
                   bool(d["mirror"]), d["role"], d.get("alias", ""), bool(d["truncated"]),
                   tuple(tuple(h) for h in d.get("empirical_hull", [])))


def mirror_domain(dom: FundamentalDomain) -> FundamentalDomain:
    """The domain symmetric with respect to the real axis (orientation kept counter-clockwise)."""
    pieces = [BoundaryPiece(p.kind, np.conj(p.points[::-1]), p.ref) for p in reversed(dom.boundary)]
    label = ("~" + dom.label) if not dom.mirror else dom.label.lstrip("~")
    alias = ("~" + dom.alias) if dom.alias and not dom.mirror else dom.alias.lstrip("~")
    return FundamentalDomain(label, pieces, dom.slit.conjugate(), dom.fid, dom.index, not dom.mirror,
                             dom.role, alias, dom.truncated, dom.empirical_hull)


@dataclass(eq=False)
class Strip:
    k: int
    lower_boundary: object          # CurveComponent
    upper_boundary: object          # CurveComponent
    interior_components: list
    m: int
    zeros: list                     # CritPoint
    one_points: list                # CritPoint
    branch_points: list             # CritPoint
    region: object = None           # FundamentalDomain-shaped face of the whole strip

    @property
    def gamma_k0(self):
        from ..tracer.curves import BELOW_ONE
        return [c for c in self.interior_components if c.image_interval == BELOW_ONE]

    @property
    def whole_components(self):
        from ..tracer.curves import WHOLE
        return [c for c in self.interior_components if c.image_interval == WHOLE]

    def summary(self) -> dict:
        return {"k": self.k, "m": self.m, "zeros": len(self.zeros), "one_points": len(self.one_points),
                "branch_points": len(self.branch_points), "gamma_k0": len(self.gamma_k0),
                "zero_t": [round(z.location.imag, 6) for z in self.zeros]}


@dataclass(eq=False)
class Atlas:
    fid: FunctionId
    window: Window
    regions: list                   # FundamentalDomain (domains, mirrors and remainders)
    components: list = field(default_factory=list)
    strips: list = field(default_factory=list)
    crit: list = field(default_factory=list)
    min_step: float = 1e-6
    meta: dict = field(default_factory=dict)

    @property
    def domains(self):
        return [d for d in self.regions if d.role == DOMAIN]

    def by_label(self, label: str) -> FundamentalDomain:
        for d in self.regions:
            if d.label == label and d.role == DOMAIN:
                return d
        raise KeyError(label)

    def labels(self):
        return [d.label for d in self.domains]

    def locate(self, z: complex) -> str:
        """Label of the unique domain containing z."""
        return self.locate_domain(z).label

    def locate_domain(self, z: complex) -> FundamentalDomain:
        z = complex(z)
        if not self.window.contains(z):
            raise OutsideAtlas(f"{z} lies outside the atlas window")
        if abs(z.imag) <= self.min_step:
            raise OnBoundary(f"{z} lies on the real axis")
        hits = [d for d in self.regions if d.contains(z)]
        for d in self.regions:
            if d.boundary_distance(z) <= self.min_step and _inner_boundary(d, z, self.window, self.min_step):
                raise OnBoundary(f"{z} lies on the boundary of {d.label}")
        if not hits:
            raise OutsideAtlas(f"{z} is not inside any region of the atlas")
        if len(hits) > 1:
            raise OnBoundary(f"{z} is claimed by {[h.label for h in hits]}")
        if hits[0].role != DOMAIN:
            raise OutsideAtlas(f"{z} lies in a truncated remainder region")
        return hits[0]


def _inner_boundary(dom, z, window, tol):
    """True when the nearest boundary of dom near z is not just the window edge."""
    for p in dom.boundary:
        if p.kind == EDGE:
            continue
        pts = p.points
        if len(pts) == 1:
            if abs(pts[0] - z) <= tol:
                return True
            continue
        d = np.min(np.abs(pts - z))
        if d <= tol + 1.0:
            for k in range(len(pts) - 1):
                if point_segment_distance(z, pts[k], pts[k + 1]) <= tol:
                    return True
    return False

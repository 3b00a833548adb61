"""Data types of the tracer: curve kinds, step control, endpoints and components."""
from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

REAL_AXIS = "PreimageRealAxis"
CIRCLE = "PreimageCircle"
RAY = "PreimageRay"
LIFT = "LiftSegment"

RED = "Red"
BLACK = "Black"
MIXED = "Mixed"  # real-axis component through a zero of f: red and black arcs joined there
NA = "NA"

BELOW_ONE = "(-inf,1)"
ABOVE_ONE = "(1,+inf)"
WHOLE = "whole"

# endpoint kinds
WINDOW = "WindowBoundary"
POLE = "Pole"
BRANCH = "BranchPointCrossing"
CLOSED = "ClosedLoop"
ZERO = "Zero"          # a ray pre-image reaching a zero of f (image reaches 0)
LIFT_END = "LiftEnd"   # a segment lift reaching an end of the image segment
COLLAPSE = "StepCollapse"
MAX_POINTS = "MaxPoints"


@dataclass(frozen=True)
class CurveKind:
    variant: str
    rho: Optional[float] = None
    theta: Optional[float] = None
    w0: Optional[complex] = None
    w1: Optional[complex] = None

    def __post_init__(self):
        if self.variant == CIRCLE and not (self.rho is not None and self.rho > 0):
            raise ValueError("circle pre-image needs rho > 0")
        if self.variant == RAY and self.theta is None:
            raise ValueError("ray pre-image needs theta")
        if self.variant == LIFT and (self.w0 is None or self.w1 is None or self.w0 == self.w1):
            raise ValueError("segment lift needs two distinct end points")

    @classmethod
    def real_axis(cls):
        return cls(REAL_AXIS)

    @classmethod
    def circle(cls, rho):
        return cls(CIRCLE, rho=float(rho))

    @classmethod
    def ray(cls, theta):
        return cls(RAY, theta=float(theta))

    @classmethod
    def lift(cls, w0, w1):
        return cls(LIFT, w0=complex(w0), w1=complex(w1))

    # image-plane geometry -------------------------------------------------
    def project(self, f: complex) -> complex:
        """Nearest point of the image curve (the line/circle carrying it)."""
        v = self.variant
        if v == REAL_AXIS:
            return complex(f.real, 0.0)
        if v == CIRCLE:
            a = abs(f)
            return self.rho * f / a if a > 0 else complex(self.rho, 0)
        if v == RAY:
            e = cmath.exp(1j * self.theta)
            return e * (f / e).real
        d = self.w1 - self.w0
        return self.w0 + ((f - self.w0) / d).real * d

    def image_tangent(self, f: complex) -> complex:
        v = self.variant
        if v == REAL_AXIS:
            return 1 + 0j
        if v == CIRCLE:
            a = abs(f)
            return 1j * f / a if a > 0 else 1j
        if v == RAY:
            return cmath.exp(1j * self.theta)
        d = self.w1 - self.w0
        return d / abs(d)

    def residual(self, f: complex) -> float:
        """Scale-aware constraint residual (relative to max(1, |f|), or rho for circles)."""
        v = self.variant
        if not (math.isfinite(f.real) and math.isfinite(f.imag)):
            return math.inf
        if v == CIRCLE:
            return abs(abs(f) - self.rho) / self.rho
        return abs(f - self.project(f)) / max(1.0, abs(f))

    def signed(self, F):
        """Signed scalar constraint on arrays, for sign-change scans."""
        F = np.asarray(F)
        v = self.variant
        if v == REAL_AXIS:
            return F.imag
        if v == CIRCLE:
            return np.abs(F) - self.rho
        if v == RAY:
            return (F * np.exp(-1j * self.theta)).imag
        return ((F - self.w0) / (self.w1 - self.w0)).imag

    def param(self, f: complex) -> float:
        """Position along the image curve: lambda in [0,1] for lifts, Re(e^{-i theta} f) for rays."""
        if self.variant == LIFT:
            return ((f - self.w0) / (self.w1 - self.w0)).real
        if self.variant == RAY:
            return (f * cmath.exp(-1j * self.theta)).real
        if self.variant == CIRCLE:
            return cmath.phase(f)
        return f.real

    def admissible(self, f: complex) -> bool:
        """Side conditions beyond the scalar constraint (ray sign, lift parameter range)."""
        if self.variant == RAY:
            return self.param(f) > 0
        if self.variant == LIFT:
            lam = self.param(f)
            return -1e-12 <= lam <= 1 + 1e-12
        return True

    def to_dict(self) -> dict:
        d = {"variant": self.variant}
        if self.rho is not None:
            d["rho"] = self.rho
        if self.theta is not None:
            d["theta"] = self.theta
        if self.w0 is not None:
            d["w0"] = [self.w0.real, self.w0.imag]
            d["w1"] = [self.w1.real, self.w1.imag]
        return d

    @classmethod
    def from_dict(cls, d):
        w0 = complex(*d["w0"]) if "w0" in d else None
        w1 = complex(*d["w1"]) if "w1" in d else None
        return cls(d["variant"], rho=d.get("rho"), theta=d.get("theta"), w0=w0, w1=w1)


@dataclass(frozen=True)
class StepControl:
    max_step: float = 0.05
    min_step: float = 1e-6
    corrector_tol: float = 1e-10
    curvature_target: float = 0.02
    max_points: int = 20000
    branch_tol: float = 1e-8
    pole_tol: float = 1e-12
    pole_stop: float = 1e-6      # stop this close to a known pole
    image_step: float = 0.25     # relative change of f allowed per step
    cross_tol: float = 1e-9      # constraint residual at a critical point that counts as on-curve

    def __post_init__(self):
        if not (0 < self.min_step < self.max_step):
            raise ValueError("need 0 < min_step < max_step")
        if self.corrector_tol <= 0 or self.curvature_target <= 0 or self.max_points < 2:
            raise ValueError("invalid step control")


@dataclass(frozen=True)
class Endpoint:
    kind: str
    at: Optional[complex] = None
    flag: Optional[str] = None

    def to_dict(self):
        d = {"kind": self.kind}
        if self.at is not None:
            d["at"] = [self.at.real, self.at.imag]
        if self.flag is not None:
            d["flag"] = self.flag
        return d

    @classmethod
    def from_dict(cls, d):
        at = complex(*d["at"]) if "at" in d else None
        return cls(d["kind"], at, d.get("flag"))


@dataclass(eq=False)
class CurveComponent:
    kind: CurveKind
    points: np.ndarray
    color: str = NA
    image_interval: str = NA
    start: Endpoint = Endpoint(WINDOW)
    end: Endpoint = Endpoint(WINDOW)
    crossings: list = field(default_factory=list)  # branch points passed through
    nodes: list = field(default_factory=list)      # self-intersection nodes
    seed: complex = 0j

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)

    def __eq__(self, other):
        if not isinstance(other, CurveComponent):
            return NotImplemented
        return (self.kind == other.kind
                and self.points.shape == other.points.shape
                and bool(np.array_equal(self.points, other.points))
                and self.color == other.color
                and self.image_interval == other.image_interval
                and self.start == other.start and self.end == other.end
                and list(self.crossings) == list(other.crossings)
                and list(self.nodes) == list(other.nodes)
                and self.seed == other.seed)

    @property
    def closed(self) -> bool:
        return self.start.kind == CLOSED or self.end.kind == CLOSED

    @property
    def id(self) -> str:
        """Stable content hash of the defining seed and kind."""
        key = json.dumps({"kind": self.kind.to_dict(), "seed": [self.seed.real, self.seed.imag]},
                         sort_keys=True)
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def __len__(self):
        return len(self.points)

    def arclength(self) -> float:
        return float(np.sum(np.abs(np.diff(self.points))))

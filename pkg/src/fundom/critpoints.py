"""Location and simplicity certification of the special points of Gamma and zeta.

Covers the critical points x_n of Gamma, the trivial and non-trivial zeros of
zeta, the solutions of zeta(s) = 1 and the zeros of zeta'. Complex searches use
argument-principle counts on a cell grid followed by damped Newton, so a cell
that reports a zero is never silently skipped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import BracketFailure, CountMismatch, IsolationFailure
from .funcval import FunctionId, evaluator, gamma_log_deriv, trigamma, values
from .funcval import _kernels as K
from .geometry import Window, circle_path, winding_number

ZERO_OF_F = "ZeroOfF"
ZERO_OF_FPRIME = "ZeroOfFPrime"
ONE_POINT = "OnePoint"

TARGETS = ("f", "f'", "f-1")
R_CERT = 0.05
RESIDUAL_TOL = 1e-9
ZERO_SCAN_STEP = 0.1
CELL = 0.5


@dataclass(frozen=True)
class CritPoint:
    location: complex
    fid: FunctionId
    kind: str
    residual: float
    simple: bool
    winding: int
    label: str = ""

    def to_dict(self) -> dict:
        return {"record": "CritPoint", "location": [self.location.real, self.location.imag],
                "fid": self.fid.to_dict(), "kind": self.kind, "residual": self.residual,
                "simple": self.simple, "winding": self.winding, "label": self.label}

    @classmethod
    def from_dict(cls, d):
        return cls(complex(*d["location"]), FunctionId.from_dict(d["fid"]), d["kind"],
                   float(d["residual"]), bool(d["simple"]), int(d["winding"]), d.get("label", ""))


# ---------------------------------------------------------------- helpers

def _target_funcs(fid: FunctionId, target: str):
    """(g, g') for the chosen target function of fid."""
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    ev = evaluator(fid)
    if target == "f":
        return (lambda z: ev(z)[0]), (lambda z: ev(z)[1])
    if target == "f'":
        return (lambda z: ev(z)[1]), (lambda z: ev(z)[2])
    return (lambda z: ev(z)[0] - 1.0), (lambda z: ev(z)[1])


def _pole_order(fid: FunctionId, target: str) -> int:
    return 2 if target == "f'" else 1


def newton(g, gp, z0: complex, tol: float = 1e-14, max_iter: int = 60, max_halvings: int = 20):
    """Damped Newton: the step is halved (up to max_halvings times) while |g| increases."""
    z = complex(z0)
    try:
        gz = g(z)
    except (ZeroDivisionError, OverflowError):
        return z, False
    for _ in range(max_iter):
        try:
            d = gp(z)
        except (ZeroDivisionError, OverflowError):
            return z, False
        if d == 0 or not np.isfinite(d):
            return z, False
        step = gz / d
        lam = 1.0
        for _ in range(max_halvings + 1):
            zn = z - lam * step
            try:
                gn = g(zn)
            except (ZeroDivisionError, OverflowError):
                gn = complex(math.inf)
            if np.isfinite(gn) and abs(gn) <= abs(gz):
                break
            lam *= 0.5
        else:
            return z, abs(gz) == 0
        z, gz = zn, gn
        if abs(lam * step) <= tol * (1 + abs(z)) or gz == 0:
            return z, True
    return z, abs(gz) < 1e-12 * (1 + abs(z))


def simplicity_check(fid: FunctionId, target: str, location: complex, r_cert: float = R_CERT):
    """(simple, winding): argument-principle count of the target on a circle of radius r_cert.

    Raises IsolationFailure when another zero (or a pole) of the target lies within 2 r_cert.
    """
    if r_cert <= 0:
        raise ValueError("r_cert must be positive")
    g, _ = _target_funcs(fid, target)
    location = complex(location)
    pole, dist = fid.nearest_pole(location)
    if pole is not None and dist <= 2 * r_cert:
        raise IsolationFailure(f"pole {pole} within {2 * r_cert} of {location}")
    w1, m1 = winding_number(g, circle_path(location, r_cert, 64))
    w2, m2 = winding_number(g, circle_path(location, 2 * r_cert, 64))
    if not (m1 > 0 and m2 > 0) or w1 != w2:
        raise IsolationFailure(f"another zero of {target} within {2 * r_cert} of {location}")
    return w1 == 1, w1


def _certify(fid, target, location, r_cert=R_CERT, halvings=6):
    r = r_cert
    for _ in range(halvings + 1):
        try:
            return simplicity_check(fid, target, location, r)
        except IsolationFailure:
            r *= 0.5
    raise IsolationFailure(f"could not isolate {location} down to radius {r}")


def _make(fid, target, z, kind, label=""):
    g, _ = _target_funcs(fid, target)
    simple, w = _certify(fid, target, z)
    return CritPoint(complex(z), fid, kind, float(abs(g(z))), simple, w, label)


def _sort(points):
    return sorted(points, key=lambda c: (c.location.imag, c.location.real))


# ---------------------------------------------------------------- Gamma

def gamma_crit_points(n_max: int):
    """x_0 in (1,2) and x_n in (-n,-n+1), n = 1..n_max: the zeros of Gamma'."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    fid = FunctionId.gamma()
    out = []
    for n in range(n_max + 1):
        lo, hi = (1.0, 2.0) if n == 0 else (-n + 1e-12, -n + 1 - 1e-12)
        x = _psi_root(lo, hi)
        g = gamma_value_real(x)
        if (g > 0) != (n % 2 == 0):
            raise BracketFailure(f"sign of Gamma(x_{n}) = {g} breaks the alternation")
        out.append(_make(fid, "f'", complex(x, 0.0), ZERO_OF_FPRIME, f"x_{n}"))
    return out


def gamma_value_real(x: float) -> float:
    return K.gamma_c(complex(x, 0.0)).real


def _psi_root(lo, hi):
    psi = lambda x: gamma_log_deriv(complex(x, 0.0)).real  # noqa: E731
    a, b = psi(lo), psi(hi)
    if not (a < 0 < b):
        raise BracketFailure(f"psi does not change sign on ({lo}, {hi}): {a}, {b}")
    for _ in range(60):
        m = 0.5 * (lo + hi)
        if psi(m) < 0:
            lo = m
        else:
            hi = m
    x = 0.5 * (lo + hi)
    for _ in range(3):
        x -= psi(x) / trigamma(complex(x, 0.0)).real
    return x


def psi_sign_changes(n: int, step: float = 1e-3) -> int:
    """Number of sign changes of psi sampled on (-n, -n+1) at the given step."""
    xs = np.arange(-n + step, -n + 1, step)
    v = np.array([gamma_log_deriv(complex(x, 0.0)).real for x in xs])
    return int(np.sum(np.sign(v[1:]) != np.sign(v[:-1])))


# ---------------------------------------------------------------- zeta zeros

def zeta_trivial_zeros(m_max: int):
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    fid = FunctionId.zeta()
    out = []
    for m in range(1, m_max + 1):
        p = _make(fid, "f", complex(-2 * m, 0.0), ZERO_OF_F, f"-{2 * m}")
        if p.residual >= RESIDUAL_TOL:
            raise BracketFailure(f"|zeta(-{2 * m})| = {p.residual}")
        out.append(p)
    return out


def critical_line_count(t_max: float, indent: float = 0.1) -> int:
    """Argument-principle count of zeta zeros in [-1,2] x (0, t_max], indented above s = 1."""
    ev = evaluator(FunctionId.zeta())
    g = lambda z: ev(z)[0]  # noqa: E731
    n = max(8, int(t_max))
    path = [complex(x, 0) for x in np.linspace(-1, 1 - indent, 16, endpoint=False)]
    path += list(1 + indent * np.exp(1j * np.linspace(math.pi, 0, 16, endpoint=False)))
    path += [complex(x, 0) for x in np.linspace(1 + indent, 2, 8, endpoint=False)]
    path += [complex(2, y) for y in np.linspace(0, t_max, n, endpoint=False)]
    path += [complex(x, t_max) for x in np.linspace(2, -1, 16, endpoint=False)]
    path += [complex(-1, y) for y in np.linspace(t_max, 0, n, endpoint=False)]
    w, fmin = winding_number(g, path, max_dphi=math.pi / 8)
    if not fmin > 0:
        raise CountMismatch(-1, -1)
    return w


@lru_cache(maxsize=32)
def _critical_line_zeros(t_max: float, step: float):
    fid = FunctionId.zeta()
    ev = evaluator(fid)
    g = lambda z: ev(z)[0]  # noqa: E731
    gp = lambda z: ev(z)[1]  # noqa: E731
    T = np.arange(0.0, t_max + step, step)
    T = T[T <= t_max]
    Z = np.empty_like(T)
    K.hardy_z_array(T, Z)
    roots = []
    for i in range(len(T) - 1):
        if Z[i] == 0:
            roots.append(T[i])
        elif Z[i] * Z[i + 1] < 0:
            roots.append(brentq(K.hardy_z, T[i], T[i + 1], xtol=1e-13))
    out = []
    for t in roots:
        z, ok = newton(g, gp, complex(0.5, t))
        if not ok or abs(z.real - 0.5) > 1e-8:
            z = complex(0.5, t)
        out.append(z)
    return tuple(out)


def zeta_nontrivial_zeros(t_max: float, step: float = ZERO_SCAN_STEP, check_count: bool = True):
    """Zeros 1/2 + it with 0 < t <= t_max, from sign changes of Z(t) and Newton polish."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    fid = FunctionId.zeta()
    expected = critical_line_count(t_max) if check_count else None
    found = None
    for _ in range(4):
        found = _critical_line_zeros(float(t_max), step)
        if expected is None or len(found) == expected:
            break
        step *= 0.5
    else:
        raise CountMismatch(len(found), expected)
    return [_make(fid, "f", z, ZERO_OF_F, f"rho_{k + 1}") for k, z in enumerate(found)]


def zeta_zeros_in_window(window: Window):
    """Trivial and non-trivial zeros of zeta inside a window (conjugates included)."""
    out = []
    m_lo = max(1, math.ceil(-window.sigma_max / 2))
    if window.t_min <= 0 <= window.t_max:
        for m in range(m_lo, int(math.floor(-window.sigma_min / 2)) + 1):
            out.append(complex(-2 * m, 0))
    if window.sigma_min <= 0.5 <= window.sigma_max:
        tm = max(abs(window.t_min), abs(window.t_max))
        if tm > 10:
            for z in _critical_line_zeros(float(math.ceil(tm)), ZERO_SCAN_STEP):
                for w in (z, z.conjugate()):
                    if window.contains(w):
                        out.append(w)
    return sorted(out, key=lambda z: (z.imag, z.real))


# ---------------------------------------------------------------- cell scans

def _edge_arg(func, a, b, fa, fb):
    """Continuous argument change of func along the segment [a, b]."""
    stack = [(a, b, fa, fb, 0)]
    total = 0.0
    while stack:
        a, b, fa, fb, lvl = stack.pop()
        if fa == 0 or fb == 0 or not (np.isfinite(fa) and np.isfinite(fb)):
            return math.nan
        d = np.angle(fb / fa)
        if abs(d) <= math.pi / 4 or lvl >= 30:
            total += d
            continue
        m = 0.5 * (a + b)
        fm = func(m)
        stack.append((m, b, fm, fb, lvl + 1))
        stack.append((a, m, fa, fm, lvl + 1))
    return total


def _cell_windings(func, xs, ys, F):
    """Winding of func around each grid cell, from shared edge argument changes."""
    ny, nx = F.shape
    H = np.empty((ny, nx - 1))
    V = np.empty((ny - 1, nx))
    for j in range(ny):
        for i in range(nx - 1):
            H[j, i] = _edge_arg(func, complex(xs[i], ys[j]), complex(xs[i + 1], ys[j]), F[j, i], F[j, i + 1])
    for j in range(ny - 1):
        for i in range(nx):
            V[j, i] = _edge_arg(func, complex(xs[i], ys[j]), complex(xs[i], ys[j + 1]), F[j, i], F[j + 1, i])
    W = (H[:-1, :] + V[:, 1:] - H[1:, :] - V[:, :-1]) / (2 * math.pi)
    return W


def cell_zeros(fid: FunctionId, target: str, window: Window, cell: float = CELL, min_cell: float = 1e-4):
    """All zeros of the target inside the window, by argument-principle counts on cells.

    Cells whose count is positive are refined until a Newton iterate converges inside
    the cell for each counted zero. Poles of the target are subtracted from the counts.
    """
    g, gp = _target_funcs(fid, target)
    order = _pole_order(fid, target)
    pad = 0.01 * cell
    # offset the grid so that lattice points (poles, integer zeros) never sit on cell edges
    x0 = window.sigma_min - pad - 0.0137 * cell
    y0 = window.t_min - pad - 0.0071 * cell
    nx = int(math.ceil((window.sigma_max + pad - x0) / cell)) + 1
    ny = int(math.ceil((window.t_max + pad - y0) / cell)) + 1
    xs = x0 + cell * np.arange(nx)
    ys = y0 + cell * np.arange(ny)
    Zg = xs[None, :] + 1j * ys[:, None]
    with np.errstate(all="ignore"):
        F0, F1 = values(fid, Zg)
    F = {"f": F0, "f'": F1, "f-1": F0 - 1.0}[target]
    W = _cell_windings(g, xs, ys, F)
    found = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            box = (xs[i], xs[i + 1], ys[j], ys[j + 1])
            w = W[j, i]
            if not np.isfinite(w):
                found += _refine(g, gp, fid, order, box, min_cell, None)
                continue
            w = int(round(w)) + order * _poles_inside(fid, box)
            if w > 0:
                found += _refine(g, gp, fid, order, box, min_cell, w)
    found = [z for z in _dedupe(found, 1e-9) if window.contains(z)]
    return sorted(found, key=lambda z: (z.imag, z.real))


def _poles_inside(fid, box):
    return len(fid.poles_in(box[0], box[1], box[2], box[3]))


def _box_winding(g, box, fid, order):
    a, b, c, d = box
    path = [complex(a, c), complex(b, c), complex(b, d), complex(a, d)]
    w, fmin = winding_number(g, path, max_dphi=math.pi / 4)
    if not fmin > 0 or not np.isfinite(fmin):
        return None
    return w + order * _poles_inside(fid, box)


def _refine(g, gp, fid, order, box, min_cell, count):
    a, b, c, d = box
    if count is None:
        count = _box_winding(g, box, fid, order)
    if count is not None and count <= 0:
        return []
    center = complex(0.5 * (a + b), 0.5 * (c + d))
    tol = 1e-9 * max(1.0, abs(center))
    if count == 1:
        z, ok = newton(g, gp, center)
        if ok and a - tol <= z.real <= b + tol and c - tol <= z.imag <= d + tol:
            return [z]
    if b - a < min_cell:
        z, ok = newton(g, gp, center)
        return [z] if ok else []
    # shift the split point slightly off-center to avoid symmetric degeneracies
    mx, my = a + 0.5007 * (b - a), c + 0.4993 * (d - c)
    out = []
    for sub in ((a, mx, c, my), (mx, b, c, my), (a, mx, my, d), (mx, b, my, d)):
        out += _refine(g, gp, fid, order, sub, min_cell, None)
    return out


def _dedupe(points, tol):
    out = []
    for z in sorted(points, key=lambda z: (z.imag, z.real)):
        if all(abs(z - w) > tol * max(1.0, abs(z)) for w in out):
            out.append(z)
    return out


# ---------------------------------------------------------------- one points, zeta' zeros

def zeta_one_points(window: Window):
    """Solutions of zeta(s) = 1 inside the window."""
    fid = FunctionId.zeta()
    pts = cell_zeros(fid, "f-1", window)
    return _sort([_make(fid, "f-1", z, ONE_POINT, "u") for z in pts])


def zeta_real_prime_zeros(n_max: int):
    """sigma_n in (-2n-2, -2n): the real zeros of zeta' between consecutive trivial zeros."""
    ev = evaluator(FunctionId.zeta())
    d = lambda x: ev(complex(x, 0.0))[1].real  # noqa: E731
    out = []
    for n in range(1, n_max + 1):
        lo, hi = -2.0 * n - 2, -2.0 * n
        xs = np.linspace(lo + 1e-9, hi - 1e-9, 65)
        v = [d(x) for x in xs]
        roots = [brentq(d, xs[i], xs[i + 1], xtol=1e-15)
                 for i in range(64) if v[i] * v[i + 1] < 0]
        if not roots:
            raise BracketFailure(f"no zero of zeta' between {lo} and {hi}")
        out += roots
    return out


def zeta_prime_zeros(window: Window):
    """Zeros of zeta' in the window: real ones labelled sigma_n, complex ones v-candidates."""
    fid = FunctionId.zeta()
    pts = cell_zeros(fid, "f'", window)
    if window.t_min <= 0 <= window.t_max and window.sigma_min < -2:
        n_max = int(math.floor((-window.sigma_min - 2) / 2)) + 1
        pts += [complex(x, 0.0) for x in zeta_real_prime_zeros(n_max) if window.contains(complex(x, 0))]
    pts = _dedupe(pts, 1e-9)
    real = sorted([z for z in pts if abs(z.imag) < 1e-12], key=lambda z: -z.real)
    out = []
    for k, z in enumerate(real):
        out.append(_make(fid, "f'", complex(z.real, 0.0), ZERO_OF_FPRIME, f"sigma_{k + 1}"))
    for z in pts:
        if abs(z.imag) >= 1e-12:
            out.append(_make(fid, "f'", z, ZERO_OF_FPRIME, "v"))
    return _sort(out)


def gamma_crit_in_window(window: Window):
    """x_n lying in the window."""
    if not (window.t_min <= 0 <= window.t_max) or window.sigma_max < -1e9:
        return []
    n_max = max(0, int(math.ceil(-window.sigma_min)))
    return [c for c in gamma_crit_points(n_max) if window.contains(c.location)]


def crit_for(fid: FunctionId, window: Window):
    """Zeros of f' of the supported functions inside the window (as complex points)."""
    if fid.variant == "Gamma":
        return [c.location for c in gamma_crit_in_window(window)]
    if fid.variant == "Zeta":
        return [c.location for c in zeta_prime_zeros(window)]
    return cell_zeros(fid, "f'", window)

"""Fundamental domains of Gamma built from the pre-image of the real axis."""
from __future__ import annotations

import math

import numpy as np

from ..critpoints import gamma_crit_in_window
from ..errors import IncompleteBoundary
from ..funcval import FunctionId, evaluator
from ..geometry import Window
from ..tracer import StepControl
from ..tracer.assembly import preimage_real_axis
from ..tracer.curves import BLACK, RED, WINDOW
from .faces import face_between, make_chord, nest_chain
from .model import DOMAIN, REMAINDER, Atlas, FundamentalDomain, RealInterval, SlitSpec, mirror_domain


def upper_window(window: Window) -> Window:
    return Window(window.sigma_min, window.sigma_max, 0.0, max(abs(window.t_min), abs(window.t_max)))


def _is_axis(c):
    return bool(np.all(np.abs(c.points.imag) < 1e-9))


def _crossing_x(c):
    xs = [x.real for x in c.crossings if abs(x.imag) < 1e-9]
    return xs[0] if xs else None


def gamma_domains(window: Window, n_range=None, ctl: StepControl = None, components=None) -> Atlas:
    """Atlas of Omega_n (upper half plane) and their mirrors for Gamma inside the window.

    Domains are the faces between consecutive black curves of the pre-image of the
    real axis in the upper half-window: the upper halves of the curves through
    x_0, x_2, x_4, ... and the black components that never meet the real axis.
    The face just inside the curve through x_0 is Omega_1; labels decrease to the
    left and increase towards the upper right.
    """
    ctl = ctl or StepControl()
    fid = FunctionId.gamma()
    up = upper_window(window)
    crit = [c.location for c in gamma_crit_in_window(up)]
    comps = list(components) if components is not None else list(preimage_real_axis(fid, up, ctl, crit=crit))
    chords, anchor = [], None
    for c in comps:
        if c.color != BLACK or _is_axis(c):
            continue
        if c.start.kind != WINDOW or c.end.kind != WINDOW:
            continue
        ch = make_chord(c, up, fid=fid)
        if ch is None:
            continue
        chords.append(ch)
        x = _crossing_x(c)
        if x is not None and 1.0 < x < 2.0:
            anchor = ch
    if anchor is None:
        raise IncompleteBoundary("the curve through x_0 is not inside the window")
    chain = nest_chain(chords)
    a = chain.index(anchor)
    poles = fid.poles_in(up.sigma_min, up.sigma_max, -1e-300, 1e-300)
    ev = evaluator(fid)
    reds = [(c, _crossing_x(c)) for c in comps if c.color == RED and not _is_axis(c) and _crossing_x(c) is not None]
    regions = []
    for i in range(-1, len(chain)):
        outer = chain[i] if i >= 0 else None
        inner = chain[i + 1] if i + 1 < len(chain) else None
        pieces = face_between(up, outer, inner, axis_bottom=True, poles=poles)
        label_n = i - a + 1
        if outer is None or inner is None:
            dom = FundamentalDomain(f"remainder:{label_n}", pieces, SlitSpec(()), fid, label_n, role=REMAINDER)
        else:
            dom = FundamentalDomain(f"Omega_{label_n}", pieces, _gamma_slit(label_n, dom_reds(pieces, reds, up), ev),
                                    fid, label_n, role=DOMAIN, truncated=True)
            dom.empirical_hull = _hull(dom)
        regions.append(dom)
    if n_range is not None:
        lo, hi = n_range
        have = {d.index for d in regions if d.role == DOMAIN}
        missing = [n for n in range(lo, hi + 1) if n not in have]
        if missing:
            raise IncompleteBoundary(f"domains {missing} are not closed inside the window; enlarge it")
    regions += [mirror_domain(d) for d in list(regions)]
    return Atlas(fid, Window(up.sigma_min, up.sigma_max, -up.t_max, up.t_max), regions, comps,
                 crit=crit, min_step=ctl.min_step, meta={"kind": "gamma", "upper_window": list(up.as_tuple())})


def dom_reds(pieces, reds, up):
    """Red curves crossing the real axis inside the face bounded by the given pieces."""
    tmp = FundamentalDomain("tmp", pieces, SlitSpec(()), FunctionId.gamma())
    out = []
    for c, x in reds:
        mid = c.points[len(c.points) // 2]
        probe = mid if mid.imag > 0 else complex(x, 1e-3)
        if tmp.contains(probe):
            out.append(x)
    return out


def _gamma_slit(n, red_x, ev):
    if n >= 1:
        return SlitSpec((RealInterval(0.0, math.inf),))
    if red_x:
        g = ev(complex(red_x[0], 0.0))[0].real
    else:
        from ..critpoints import gamma_crit_points
        g = ev(gamma_crit_points(2 * abs(n) + 1)[-1].location)[0].real
    return SlitSpec((RealInterval(-math.inf, g), RealInterval(0.0, math.inf)))


def _hull(dom):
    """Empirical real hull of the boundary image over curve and axis pieces."""
    from ..funcval import values
    vals = []
    for p in dom.slit_pieces():
        with np.errstate(all="ignore"):
            F = values(dom.fid, p.points)[0]
        F = F[np.isfinite(F)]
        vals.append(F.real)
    if not vals:
        return ()
    v = np.concatenate(vals)
    return ((float(v.min()), float(v.max())),) if len(v) else ()

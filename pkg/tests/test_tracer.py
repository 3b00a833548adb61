import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fundom import store
from fundom.acceptance import GAMMA_REF_WINDOW
from fundom.critpoints import crit_for
from fundom.errors import SeedInvalid
from fundom.funcval import FunctionId, evaluator
from fundom.geometry import Window, polyline_distance
from fundom.tracer import CurveComponent, CurveKind, Endpoint, StepControl, distance_to_curve, trace
from fundom.tracer.assembly import (
    axis_crossings,
    circle_axis_alternation,
    color_alternation,
    crossing_audit,
    preimage_circle,
    preimage_real_axis,
)
from fundom.tracer.curves import BLACK, CLOSED, RED


def _residuals(fid, comp):
    ev = evaluator(fid)
    return [comp.kind.residual(ev(z)[0]) for z in comp.points]


def _dist_to_set(points, fn):
    return max(fn(z) for z in points)


# ---------------------------------------------------------------- oracle providers

def test_square_minus_one_oracle():
    """Im(z^2 - 1) = 2xy vanishes on the two axes."""
    fid = FunctionId.polynomial((1.0, 0.0, -1.0))
    w = Window(-2, 2, -2, 2)
    comps = preimage_real_axis(fid, w)
    assert len(comps) >= 2
    for c in comps:
        assert _dist_to_set(c.points, lambda z: min(abs(z.real), abs(z.imag))) < 1e-6
    pts = np.concatenate([c.points for c in comps])
    for ref in np.concatenate([np.linspace(-1.9, 1.9, 39) + 0j, 1j * np.linspace(-1.9, 1.9, 39)]):
        assert np.min(np.abs(pts - ref)) < 0.06


def test_cubic_oracle():
    """Im(z^3 - z) = y (3x^2 - y^2 - 1): the real axis plus the hyperbola y^2 = 3x^2 - 1."""
    fid = FunctionId.polynomial((1.0, 0.0, -1.0, 0.0))
    w = Window(-2, 2, -2, 2)
    comps = preimage_real_axis(fid, w)

    def dist(z):
        x, y = z.real, z.imag
        # first-order distance |g| / |grad g| to the level set g = 3x^2 - y^2 - 1 = 0
        d_hyp = abs(3 * x * x - y * y - 1) / math.hypot(6 * x, 2 * y)
        return min(abs(y), d_hyp)

    for c in comps:
        assert _dist_to_set(c.points[::5], dist) < 1e-6
    hyper = [c for c in comps if np.max(np.abs(c.points.imag)) > 0.5]
    assert len(hyper) == 2  # one branch on each side


# ---------------------------------------------------------------- Gamma reference window

def test_constraint_residual(gamma_ref_assembly):
    ctl = StepControl()
    fid = FunctionId.gamma()
    for c in gamma_ref_assembly:
        assert max(_residuals(fid, c)) < ctl.corrector_tol


def test_color_alternation_gamma_ref(gamma_ref_assembly):
    rep = color_alternation(gamma_ref_assembly)
    assert rep.passed, rep.summary
    colors = [c for _, c in axis_crossings(gamma_ref_assembly)]
    assert len(colors) == 7
    assert set(colors) == {RED, BLACK}


def test_crossing_audit_gamma_ref(gamma_ref_assembly):
    rep = crossing_audit(gamma_ref_assembly, crit_for(FunctionId.gamma(), GAMMA_REF_WINDOW))
    assert rep.passed, rep.summary


def test_components_tagged(gamma_ref_assembly):
    for c in gamma_ref_assembly:
        assert c.color in (RED, BLACK, "Mixed")
        assert c.image_interval in ("(-inf,1)", "(1,+inf)", "whole")


def test_reversibility(gamma_ref_assembly):
    fid = FunctionId.gamma()
    ctl = StepControl()
    comps = sorted(gamma_ref_assembly, key=lambda c: -len(c.points))[:3]
    for c in comps:
        if np.all(np.abs(c.points.imag) < 1e-12):
            continue
        mid = c.points[len(c.points) // 3]
        again = trace(fid, c.kind, mid, ctl, GAMMA_REF_WINDOW)
        # every retraced vertex lies on the original curve, and vice versa; distances are
        # measured in the constraint metric |dz| |f'| / max(1, |f|) that corrector_tol bounds
        ev = evaluator(fid)

        def metric(p, poly):
            f0, f1, _ = ev(p)
            return distance_to_curve(fid, c.kind, p, poly) * abs(f1) / max(1.0, abs(f0))

        d1 = max(metric(p, c.points) for p in again.points[::7])
        d2 = max(metric(p, again.points) for p in c.points[::7])
        assert max(d1, d2) <= 2 * ctl.corrector_tol
        # and the two polylines span the same set inside the window (the final step past the
        # edge depends on where the march started)
        a_in = again.points[GAMMA_REF_WINDOW.contains_array(again.points)]
        c_in = c.points[GAMMA_REF_WINDOW.contains_array(c.points)]
        assert np.max(polyline_distance(a_in, c.points)) < 1e-3
        assert np.max(polyline_distance(c_in, again.points)) < 1e-3


def test_circle_axis_alternation_small_window():
    fid = FunctionId.gamma()
    w = Window(-6, 3, -4, 4)
    axis = preimage_real_axis(fid, w, crit=crit_for(fid, w))
    circles = preimage_circle(fid, 2.0, w)
    rep = circle_axis_alternation(fid, circles, axis)
    assert rep.passed, rep.summary


def test_pole_loops_close():
    fid = FunctionId.gamma()
    w = Window(-2.5, 0.5, -1, 1)
    comps = preimage_circle(fid, 1e3, w, StepControl(max_step=1e-4, min_step=1e-10))
    closed = [c for c in comps if c.closed]
    assert len(closed) == 3  # around 0, -1, -2
    for c in closed:
        assert c.start.kind == CLOSED


def test_seed_off_curve_rejected():
    fid = FunctionId.gamma()
    with pytest.raises(SeedInvalid):
        trace(fid, CurveKind.real_axis(), 0.5 + 0.5j, StepControl(), GAMMA_REF_WINDOW)


def test_trace_needs_window():
    with pytest.raises(ValueError):
        trace(FunctionId.gamma(), CurveKind.real_axis(), 0.5 + 0j)


def test_step_control_invariants():
    with pytest.raises(ValueError):
        StepControl(max_step=1e-3, min_step=1e-2)
    with pytest.raises(ValueError):
        StepControl(corrector_tol=0.0)


def test_curve_kind_invariants():
    with pytest.raises(ValueError):
        CurveKind.circle(0.0)
    with pytest.raises(ValueError):
        CurveKind.circle(-1.0)


# ---------------------------------------------------------------- store round-trip

@st.composite
def components(draw):
    n = draw(st.integers(2, 30))
    xs = draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2 * n, max_size=2 * n))
    pts = np.array(xs[::2]) + 1j * np.array(xs[1::2])
    kind = draw(st.sampled_from([CurveKind.real_axis(), CurveKind.circle(1.042), CurveKind.ray(0.3),
                                 CurveKind.lift(1 + 0j, 0.5 + 0.25j)]))
    end = Endpoint("Pole", complex(-3, 0)) if draw(st.booleans()) else Endpoint("WindowBoundary")
    return CurveComponent(kind, pts, draw(st.sampled_from([RED, BLACK, "NA"])), "whole", Endpoint("ClosedLoop"),
                          end, [complex(xs[0], 0.0)], [], complex(xs[2], xs[3]))


@settings(max_examples=60, deadline=None)
@given(st.lists(components(), min_size=0, max_size=4))
def test_curve_store_roundtrip(tmp_path_factory, comps):
    path = tmp_path_factory.mktemp("curves") / "c.json"
    w = Window(-1, 1, -1, 1)
    store.save_curves(path, FunctionId.zeta(), comps, w, {"seed": 0})
    fid, back, w2 = store.load_curves(path)
    assert fid == FunctionId.zeta() and w2 == w
    assert back == comps
    text = path.read_text()
    store.save_curves(path, fid, back, w2, {"seed": 0})
    assert path.read_text() == text


def test_gamma_assembly_store_roundtrip(tmp_path, gamma_ref_assembly):
    path = tmp_path / "gamma_ref.json"
    store.save_curves(path, FunctionId.gamma(), list(gamma_ref_assembly), GAMMA_REF_WINDOW)
    _, back, _ = store.load_curves(path)
    assert back == list(gamma_ref_assembly)
    for a, b in zip(back, gamma_ref_assembly):
        assert a.id == b.id


def test_component_ids_stable(gamma_ref_assembly):
    ids = store.component_ids(list(gamma_ref_assembly))
    assert len(set(ids)) == len(ids)
    assert all(len(i) >= 16 for i in ids)
    assert math.isfinite(sum(c.arclength() for c in gamma_ref_assembly))

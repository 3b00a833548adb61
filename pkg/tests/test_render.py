import hashlib
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from fundom import render
from fundom.critpoints import zeta_nontrivial_zeros
from fundom.funcval import FunctionId
from fundom.geometry import Window
from fundom.render import ColorScheme


# ---------------------------------------------------------------- scheme

def test_scheme_defaults():
    s = ColorScheme()
    assert s.n_bands == 12 and s.sector_count == 6
    assert s.modulus_bands[-1] == math.inf


@pytest.mark.parametrize("kw", [
    {"modulus_bands": (0.5, 0.2, math.inf), "band_palette": ((0, 0, 0),) * 3},
    {"modulus_bands": (0.5, 1.0, 2.0), "band_palette": ((0, 0, 0),) * 3},
    {"modulus_bands": (0.0, 1.0, math.inf), "band_palette": ((0, 0, 0),) * 3},
    {"modulus_bands": (0.5, 1.0, math.inf), "band_palette": ((0, 0, 0),) * 2},
    {"sector_count": 0},
])
def test_scheme_invariants(kw):
    with pytest.raises(ValueError):
        ColorScheme(**kw)


def test_scheme_roundtrip():
    s = ColorScheme(sector_count=8)
    assert ColorScheme.from_dict(json.loads(json.dumps(s.to_dict()))) == s


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e12), st.floats(0, 1e12))
def test_band_monotone(a, b):
    s = ColorScheme()
    (ba, fa), (bb, fb) = s.band_of(np.array([a])), s.band_of(np.array([b]))
    if a <= b:
        assert ba[0] <= bb[0]
        if ba[0] == bb[0]:
            assert fa[0] <= fb[0] + 1e-12
    assert 0 <= ba[0] < s.n_bands and 0.0 <= fa[0] <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10))
def test_sector_mirror_is_conjugation(theta):
    s = ColorScheme()
    sec, pos = s.sector_of(np.array([theta]))
    msec, mpos = s.mirror(sec, pos)
    csec, cpos = s.sector_of(np.array([-theta]))
    assert 0 <= sec[0] < s.sector_count and 0.0 <= pos[0] < 1.0
    if 1e-9 < pos[0] < 1 - 1e-9:
        assert msec[0] == csec[0]
        assert abs(mpos[0] - cpos[0]) < 1e-9
    back = s.mirror(*s.mirror(sec, pos))
    assert back[0][0] == sec[0] and abs(back[1][0] - pos[0]) < 1e-12


# ---------------------------------------------------------------- rasters

def test_pixel_centers_symmetric():
    xs, ys = render.pixel_centers(Window(-6, 4, -5, 5), 10, 20)
    assert np.all(ys == -ys[::-1])
    assert xs[0] == pytest.approx(-5.5) and xs[-1] == pytest.approx(3.5)


def test_square_pixel_shape():
    w, h = render.square_pixel_shape(Window(-1, 2, 0, 60), 1024 * 1024)
    assert w * h <= 1024 * 1024
    assert abs((3 / w) / (60 / h) - 1) < 0.01


def test_determinism_and_threads():
    fid, win = FunctionId.zeta(), Window(-2, 3, 0, 30)
    a = render.domain_color(fid, win, 160, 200)
    b = render.domain_color(fid, win, 160, 200, threads=2)
    assert a.png_bytes() == b.png_bytes()
    assert a.meta == b.meta


def test_gamma_mirror_symmetry():
    dc = render.domain_color(FunctionId.gamma(), Window(-6, 4, -5, 5), 400, 400)
    r = render.mirror_agreement(dc)
    assert r["fraction_interior"] >= 0.999
    assert r["fraction_all"] >= 0.99


def test_gamma_pole_pixels_outermost():
    s = ColorScheme()
    dc = render.domain_color(FunctionId.gamma(), Window(-4.5, 0.5, -1, 1), 101, 41)
    assert dc.meta["error_pixels"] == 0
    for p in (-4, -3, -2, -1, 0):
        i = int(math.floor((p + 4.5) / 5 * 101))
        j = int(math.floor((1 - 0) / 2 * 41))
        assert dc.band[j, i] == s.outermost


def test_exact_pole_centre_uses_pole_color():
    s = ColorScheme()
    dc = render.domain_color(FunctionId.gamma(), Window(-2.5, 0.5, -1.5, 1.5), 3, 3)
    assert dc.pole_mask[1, 1] and dc.meta["pole_pixels"] >= 1
    assert tuple(dc.rgb[1, 1]) == s.pole_color


def test_gamma_overflow_outermost():
    s = ColorScheme()
    dc = render.domain_color(FunctionId.gamma(), Window(150, 200, -1, 1), 50, 4)
    assert dc.meta["overflow_pixels"] > 0
    assert dc.meta["error_pixels"] == 0
    assert np.all(dc.band[:, -5:] == s.outermost)


def test_zeta_innermost_islands_match_zero_count():
    win = Window(-1, 2, 0, 30)
    w, h = render.square_pixel_shape(win, 400 * 400)
    dc = render.domain_color(FunctionId.zeta(), win, w, h)
    zeros = [z for z in zeta_nontrivial_zeros(30.0) if z.location.imag < 30]
    assert render.band_islands(dc.band, 0) == len(zeros) == 3
    centres = render.island_centers(dc.band, 0, win)
    for z in zeros:
        assert min(abs(c - z.location) for c in centres) < 0.1


def test_sector_frames_shrink():
    dc, frames = render.sector_frames(FunctionId.gamma(), Window(-6, 4, -5, 5), 200, 200)
    counts = [n for _, _, n in frames]
    assert len(frames) == 3
    assert counts[0] > counts[1] > counts[2] > 0
    for alpha, rgb, _ in frames:
        assert rgb.shape == dc.rgb.shape


def test_resolution_limits():
    with pytest.raises(ValueError):
        render.domain_color(FunctionId.gamma(), Window(0, 1, 0, 1), 0, 10)


def test_png_and_sidecar(tmp_path):
    dc = render.domain_color(FunctionId.gamma(), Window(-1, 1, -1, 1), 32, 16)
    path = render.save_png(tmp_path / "g.png", dc.rgb, dc.meta)
    data = path.read_bytes()
    meta = json.loads((tmp_path / "g.png.json").read_text())
    assert meta["sha256"] == hashlib.sha256(data).hexdigest()
    assert meta["error_pixels"] == 0 and meta["window"] == [-1, 1, -1, 1]
    img = np.asarray(Image.open(io.BytesIO(data)))
    assert np.array_equal(img, dc.rgb)
    render.save_png(tmp_path / "g2.png", dc.rgb, dc.meta)
    assert (tmp_path / "g2.png").read_bytes() == data


# ---------------------------------------------------------------- overlays

def test_empty_overlay_has_axes_only():
    ov = render.curve_overlay([], Window(-6, 4, -5, 5), 200, 200)
    assert 'id="axes"' in ov.svg
    assert "<path" not in ov.svg and "<polygon" not in ov.svg
    assert ov.meta["components"] == 0
    assert ov.rgb.shape == (200, 200, 3)


def test_overlay_one_path_per_component(gamma_ref_assembly, tmp_path):
    comps = list(gamma_ref_assembly)
    ov = render.curve_overlay(comps, Window(-6, 4, -5, 5), 300, 300, markers=[(1.4616 + 0j, "ZeroOfFPrime")])
    assert ov.svg.count("<path") == len(comps)
    assert ov.svg.count("<rect") >= 3  # background, frame, marker
    svg, png = ov.save(tmp_path / "ov")
    again = render.curve_overlay(comps, Window(-6, 4, -5, 5), 300, 300, markers=[(1.4616 + 0j, "ZeroOfFPrime")])
    assert again.svg == svg.read_text()
    assert png.exists() and (tmp_path / "ov.png.json").exists()


def test_overlay_colours_follow_tags(gamma_ref_assembly):
    ov = render.curve_overlay(list(gamma_ref_assembly), Window(-6, 4, -5, 5), 300, 300)
    for c in gamma_ref_assembly:
        assert render.CURVE_COLORS[c.color] in ov.svg

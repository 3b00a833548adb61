import math

import numpy as np
import pytest
import shapely

from fundom import store
from fundom.domains import (
    ImageArc,
    RealInterval,
    SlitSpec,
    domain_verify,
    mirror_domain,
    slit_distance_max,
)
from fundom.domains.model import DOMAIN
from fundom.errors import OnBoundary, OutsideAtlas
from fundom.funcval import evaluator


def _grid_counts(atlas, n=512, roles=None):
    w = atlas.window
    xs = w.sigma_min + (np.arange(n) + 0.5) * w.width / n
    ys = w.t_min + (np.arange(n) + 0.5) * w.height / n
    X, Y = np.meshgrid(xs, ys)
    cnt = np.zeros(X.shape, int)
    for d in atlas.regions:
        if roles is None or d.role in roles:
            cnt += shapely.contains_xy(d.polygon, X, Y)
    return cnt


# ---------------------------------------------------------------- partition

@pytest.mark.parametrize("name", ["gamma_atlas", "zeta_atlas"])
def test_partition_disjoint_and_covering(request, name):
    atlas = request.getfixturevalue(name)
    cnt = _grid_counts(atlas)
    assert int((cnt > 1).sum()) == 0
    assert float((cnt >= 1).mean()) >= 0.99


def test_gamma_atlas_labels(gamma_atlas):
    labels = set(gamma_atlas.labels())
    for d in gamma_atlas.domains:
        assert d.role == DOMAIN
        twin = ("~" + d.label) if not d.mirror else d.label[1:]
        assert twin in labels
    assert "Omega_0" in labels and "Omega_1" in labels


def test_gamma_slit_containment(gamma_atlas):
    for d in gamma_atlas.domains:
        assert slit_distance_max(d) < 1e-6, d.label


def test_zeta_slit_containment(zeta_atlas):
    for d in zeta_atlas.domains:
        assert slit_distance_max(d) < 1e-6, d.label


def test_zeta_slits_start_with_one_to_infinity(zeta_atlas):
    strip_domains = [d for d in zeta_atlas.domains if d.alias]
    assert strip_domains
    for d in strip_domains:
        first = d.slit.pieces[0]
        assert isinstance(first, RealInterval)
        assert (first.a, first.b) == (1.0, math.inf)


@pytest.mark.parametrize("label", ["Omega_0", "~Omega_-1", "Omega_-3"])
def test_gamma_winding_one(gamma_atlas, label):
    rep = domain_verify(gamma_atlas.by_label(label), 60, seed=1)
    assert rep.passed, rep.notes
    assert rep.pass_rate >= 0.99
    assert rep.n_targets >= 60


def test_zeta_winding_one(zeta_atlas):
    dom = zeta_atlas.domains[len(zeta_atlas.domains) // 2]
    rep = domain_verify(dom, 60, seed=2)
    assert rep.passed, rep.notes


def test_verify_is_seeded(gamma_atlas):
    dom = gamma_atlas.by_label("Omega_-1")
    a = domain_verify(dom, 30, seed=5).to_dict()
    b = domain_verify(dom, 30, seed=5).to_dict()
    assert a == b


# ---------------------------------------------------------------- strips

def test_zeta_strip_rules(zeta_atlas):
    assert zeta_atlas.strips
    for s in zeta_atlas.strips:
        assert len(s.zeros) == s.m + 1
        assert len(s.gamma_k0) == 1
        assert len(s.one_points) == s.m == len(s.branch_points)


def test_zeta_strip_near_fifty_is_two_strip(zeta_atlas):
    hit = [s for s in zeta_atlas.strips if any(abs(z.location.imag - 49.77) < 0.1 for z in s.zeros)]
    assert len(hit) == 1
    assert hit[0].m == 2 and len(hit[0].zeros) == 3


def test_zeta_domains_per_strip(zeta_atlas):
    strip_domains = [d for d in zeta_atlas.domains if d.alias]
    assert len(strip_domains) == 2 * sum(s.m + 1 for s in zeta_atlas.strips)
    for s in zeta_atlas.strips:
        names = {d.alias for d in strip_domains if not d.mirror and d.alias.startswith(f"Omega_{s.k},")}
        assert names == {f"Omega_{s.k},{j}" for j in range(s.m + 1)}


# ---------------------------------------------------------------- location

def test_locate_interior_points(gamma_atlas):
    ev = evaluator(gamma_atlas.fid)
    for d in gamma_atlas.domains:
        c = d.polygon.representative_point()
        z = complex(c.x, c.y)
        assert gamma_atlas.locate(z) == d.label
        assert math.isfinite(abs(ev(z)[0]))


def test_locate_rejects_real_axis_and_outside(gamma_atlas):
    with pytest.raises(OnBoundary):
        gamma_atlas.locate(-2.5 + 0j)
    with pytest.raises(OutsideAtlas):
        gamma_atlas.locate(10 + 1j)


def test_mirror_domain_involution(gamma_atlas):
    d = gamma_atlas.by_label("Omega_-2")
    m = mirror_domain(d)
    assert m.mirror != d.mirror
    assert mirror_domain(m) == d
    p = d.polygon.representative_point()
    assert m.contains(complex(p.x, -p.y))


def test_slit_spec_distances():
    slit = SlitSpec((RealInterval(1.0, math.inf), ImageArc((1 + 0j, 0.5 + 0.5j, 0j))))
    assert slit.distance(5 + 0j) == 0.0
    assert slit.distance(0.5 + 0.5j) == 0.0
    assert slit.raw_distance(1 + 2j) == pytest.approx(min(2.0, abs(1 + 2j - (0.5 + 0.5j))), rel=1e-12)
    assert slit.distance(100 + 100j) == pytest.approx(100 / abs(100 + 100j), rel=1e-12)
    assert SlitSpec.from_dict(slit.to_dict()) == slit
    assert slit.conjugate().conjugate() == slit


# ---------------------------------------------------------------- store

@pytest.mark.parametrize("name", ["gamma_atlas", "zeta_atlas"])
def test_atlas_store_roundtrip(request, tmp_path, name):
    atlas = request.getfixturevalue(name)
    path = tmp_path / "atlas.json"
    store.save_atlas(path, atlas)
    back = store.load_atlas(path)
    assert back.fid == atlas.fid and back.window == atlas.window
    assert back.regions == atlas.regions
    assert back.components == atlas.components
    assert back.crit == atlas.crit
    assert len(back.strips) == len(atlas.strips)
    for a, b in zip(back.strips, atlas.strips):
        assert (a.k, a.m) == (b.k, b.m)
        assert a.lower_boundary == b.lower_boundary and a.upper_boundary == b.upper_boundary
        assert a.zeros == b.zeros and a.one_points == b.one_points and a.branch_points == b.branch_points
    text = path.read_text()
    store.save_atlas(path, back)
    assert path.read_text() == text

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fundom.covergroup import CoverGroup, GroupWord, Letter, verify_laws
from fundom.domains.verify import interior_samples
from fundom.errors import AtInfinity
from fundom.funcval import evaluator

FIBER_TOL = 1e-8


def _points(dom, n, seed, lo=0.05, hi=20.0, away_from_one=0.0):
    """Interior points with lo < |f| < hi (and |f - 1| > away_from_one): values that every
    leaf of the window-truncated atlas still attains."""
    ev = evaluator(dom.fid)
    pts = interior_samples(dom, 50 * n, np.random.default_rng(seed), margin=1e-2)
    out = []
    for p in pts:
        f = ev(complex(p))[0]
        if lo < abs(f) < hi and abs(f - 1) > away_from_one:
            out.append(complex(p))
    assert len(out) >= n
    return out[:n]


# ---------------------------------------------------------------- words

letters = st.one_of(st.just(Letter("H")), st.integers(-9, 9).map(lambda k: Letter("U", k)))


@settings(max_examples=100, deadline=None)
@given(st.lists(letters, max_size=8))
def test_word_parse_roundtrip(ls):
    w = GroupWord(tuple(ls))
    assert GroupWord.parse(str(w)) == w


def test_word_parse_variants():
    assert GroupWord.parse("U(2), u-1 ,h") == GroupWord((Letter("U", 2), Letter("U", -1), Letter("H")))
    assert GroupWord.parse("") == GroupWord()
    assert GroupWord.U(3) + GroupWord.H() == GroupWord.parse("U3,H")


@pytest.mark.parametrize("bad", ["V1", "U", "U1.5", "HH"])
def test_word_parse_rejects(bad):
    with pytest.raises(ValueError):
        GroupWord.parse(bad)


# ---------------------------------------------------------------- Gamma

@pytest.fixture(scope="module")
def gamma_group(gamma_atlas):
    return CoverGroup(gamma_atlas)


def test_gamma_leaf_mapping_and_fiber(gamma_atlas, gamma_group):
    ev = evaluator(gamma_atlas.fid)
    start = gamma_atlas.by_label("Omega_0")
    # Omega_-3 borders the truncated left edge: part of its fiber lies in the remainder near -7
    for z in _points(start, 5, 3):
        for k in range(-2, 2):
            w = gamma_group.apply_U(k, z)
            assert gamma_atlas.locate(w) == f"Omega_{k}"
            assert abs(ev(w)[0] - ev(z)[0]) < FIBER_TOL * max(1.0, abs(ev(z)[0]))


def test_gamma_h_maps_to_mirror(gamma_atlas, gamma_group):
    ev = evaluator(gamma_atlas.fid)
    dom = gamma_atlas.by_label("Omega_-2")
    for z in _points(dom, 5, 4):
        h = gamma_group.apply_H(z)
        assert gamma_atlas.locate(h) == "~Omega_-2"
        assert abs(ev(h)[0] - ev(z)[0]) < FIBER_TOL * max(1.0, abs(ev(z)[0]))
        assert abs(gamma_group.apply_H(h) - z) < 1e-8


def test_gamma_u0_is_identity(gamma_atlas, gamma_group):
    for z in _points(gamma_atlas.by_label("Omega_-1"), 5, 5):
        assert abs(gamma_group.apply_U(0, z) - z) < 1e-10


def test_gamma_additivity(gamma_atlas, gamma_group):
    for z in _points(gamma_atlas.by_label("Omega_1"), 5, 6):
        a = gamma_group.apply_word(GroupWord.parse("U-1,U-1"), z)
        b = gamma_group.apply_word(GroupWord.parse("U-2"), z)
        assert abs(a - b) < 1e-8


def test_gamma_pole_rule(gamma_group):
    assert gamma_group.apply_U(2, -1 + 0j) == 1 + 0j
    assert gamma_group.apply_U(3, -3 + 0j) == 0j
    with pytest.raises(AtInfinity):
        gamma_group.apply_U(1, -3 + 0j)


def test_gamma_laws(gamma_atlas):
    rep = verify_laws(gamma_atlas, 30, seed=0)
    assert rep.passed, rep.to_dict()
    assert rep.n_samples == 30
    assert rep.leaf_errors == 0
    assert max(rep.max_deviation.values()) < 1e-8


# ---------------------------------------------------------------- zeta

def test_zeta_cyclicity(zeta_atlas):
    group = CoverGroup(zeta_atlas)
    ev = evaluator(zeta_atlas.fid)
    dom = group.domain_of_index(1)
    for z in _points(dom, 3, 7, away_from_one=0.2):
        w = z
        for n in range(1, 6):
            w = group.apply_U(1, w)
            direct = group.apply_U(n, z)
            assert abs(w - direct) < 1e-8
            assert group.leaf_index(direct) == (1 + n, False)
            assert abs(ev(direct)[0] - ev(z)[0]) < FIBER_TOL * max(1.0, abs(ev(z)[0]))


def test_zeta_conjugate_side(zeta_atlas):
    group = CoverGroup(zeta_atlas)
    dom = group.domain_of_index(2)
    z = _points(dom, 1, 8, away_from_one=0.2)[0].conjugate()
    w = group.apply_U(3, z)
    assert group.leaf_index(w)[0] == 5
    assert w.imag < 0


def test_zeta_laws(zeta_atlas):
    rep = verify_laws(zeta_atlas, 20, seed=1)
    assert rep.passed, rep.to_dict()
    assert max(rep.max_deviation.values()) < 1e-8

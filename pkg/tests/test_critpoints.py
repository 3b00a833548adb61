import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fundom import critpoints as cp
from fundom.errors import IsolationFailure
from fundom.funcval import FunctionId, gamma, zeta
from fundom.geometry import Window

mp.mp.dps = 30


@pytest.fixture(scope="module")
def gamma_crit():
    return cp.gamma_crit_points(20)


@pytest.fixture(scope="module")
def zeros_100():
    return cp.zeta_nontrivial_zeros(100.0)


def test_gamma_crit_brackets_and_signs(gamma_crit):
    assert len(gamma_crit) == 21
    for n, c in enumerate(gamma_crit):
        x = c.location.real
        assert c.location.imag == 0.0
        if n == 0:
            assert 1 < x < 2
        else:
            assert -n < x < -n + 1
        sign = gamma(x).value.real
        assert (sign > 0) if n % 2 == 0 else (sign < 0)
        assert c.simple and c.winding == 1
        assert c.kind == cp.ZERO_OF_FPRIME


@pytest.mark.parametrize("n", [0, 1, 2, 7, 20])
def test_gamma_crit_against_digamma_oracle(gamma_crit, n):
    x = gamma_crit[n].location.real
    ref = float(mp.findroot(mp.digamma, x))
    assert abs(x - ref) < 1e-12 * max(1, abs(ref))


def test_gamma_crit_reference_values(gamma_crit):
    assert abs(gamma_crit[0].location.real - 1.4616321) < 1e-6
    assert abs(gamma_crit[1].location.real + 0.5040830) < 1e-6


@pytest.mark.parametrize("n", range(1, 21))
def test_psi_single_sign_change(n):
    assert cp.psi_sign_changes(n) == 1


def test_trivial_zeros():
    pts = cp.zeta_trivial_zeros(10)
    assert [p.location for p in pts] == [complex(-2 * m, 0) for m in range(1, 11)]
    for p in pts:
        assert abs(zeta(p.location).value) < 1e-9
        assert p.winding == 1


def test_nontrivial_zero_count(zeros_100):
    assert len(zeros_100) == 29
    assert cp.critical_line_count(100.0) == 29


def test_nontrivial_zeros_against_oracle(zeros_100):
    for n, p in enumerate(zeros_100, start=1):
        ref = complex(mp.zetazero(n))
        assert abs(p.location - ref) < 1e-9
        assert p.simple and p.winding == 1
    assert abs(zeros_100[0].location - (0.5 + 14.134725j)) < 1e-6


def test_zeros_in_window_include_conjugates():
    w = Window(-5, 2, -30, 30)
    locs = cp.zeta_zeros_in_window(w)
    upper = sorted(z.imag for z in locs if z.imag > 0)
    lower = sorted(-z.imag for z in locs if z.imag < 0)
    assert upper == pytest.approx(lower, abs=1e-12)
    assert sum(1 for z in locs if z.imag == 0) == 2
    assert len(upper) == 3


def test_prime_zeros_right_half_plane():
    pts = cp.zeta_prime_zeros(Window(-10, 10, 0, 40))
    complex_pts = [p for p in pts if p.location.imag > 1e-9]
    assert complex_pts
    for p in complex_pts:
        assert p.location.real > 0
        assert p.simple
        d = complex(mp.zeta(mp.mpc(p.location.real, p.location.imag), derivative=1))
        assert abs(d) < 1e-9


def test_real_prime_zeros_between_trivial_zeros():
    pts = cp.zeta_real_prime_zeros(5)
    for m in range(1, 6):
        inside = [x for x in pts if -2 * m - 2 < x < -2 * m]
        assert len(inside) == 1
        assert abs(complex(mp.zeta(inside[0], derivative=1))) < 1e-9 * max(1, abs(mp.zeta(inside[0])))


def test_one_points_s5_window():
    pts = cp.zeta_one_points(Window(-2, 6, 45, 55))
    assert pts
    for p in pts:
        assert p.kind == cp.ONE_POINT
        val = complex(mp.zeta(mp.mpc(p.location.real, p.location.imag)))
        assert abs(val - 1) < 1e-9


def test_simplicity_detects_double_zero():
    fid = FunctionId.polynomial((1.0, -2.0, 1.0))
    simple, w = cp.simplicity_check(fid, "f", 1.0)
    assert not simple and w == 2


def test_simplicity_isolation_failure():
    fid = FunctionId.polynomial((1.0, -0.07, 0.0))  # zeros at 0 and 0.07, between r and 2r
    with pytest.raises(IsolationFailure):
        cp.simplicity_check(fid, "f", 0.0, r_cert=0.05)


def test_simplicity_rejects_bad_radius():
    with pytest.raises(ValueError):
        cp.simplicity_check(FunctionId.zeta(), "f", 0.5 + 14.134725j, r_cert=0.0)


def test_crit_for_dispatch():
    w = Window(-6, 4, -5, 5)
    pts = cp.crit_for(FunctionId.gamma(), w)
    assert len(pts) == 7
    assert all(w.contains(z) for z in pts)


@settings(max_examples=50, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0, 1), st.booleans(), st.integers(-3, 3))
def test_crit_point_roundtrip(x, y, res, simple, wind):
    p = cp.CritPoint(complex(x, y), FunctionId.zeta(), cp.ZERO_OF_F, res, simple, wind, "rho")
    assert cp.CritPoint.from_dict(p.to_dict()) == p
    assert not math.isnan(p.to_dict()["residual"])

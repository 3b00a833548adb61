import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fundom.errors import AccuracyError, DomainError, EssentialPointError, PoleError
from fundom.funcval import (
    STIELTJES,
    FunctionId,
    euler_gamma_constant,
    eval as feval,
    functional_equation_residual,
    gamma,
    gamma_partial,
    hardy_z,
    values,
    zeta,
    zeta_laurent,
)

mp.mp.dps = 40

FIDS = [FunctionId.gamma(), FunctionId.zeta(), FunctionId.gamma_partial(50), FunctionId.gamma_shift(0.5),
        FunctionId.gamma_plus_gamma_inv()]


def _pole_distance(fid, z):
    _, d = fid.nearest_pole(z)
    d = math.inf if d is None else d
    e = fid.essential_point
    if e is not None:
        d = min(d, abs(z - e))
    return d


def _mp_gamma(z):
    return complex(mp.gamma(mp.mpc(z.real, z.imag)))


def _mp_zeta(s):
    return complex(mp.zeta(mp.mpc(s.real, s.imag)))


# ---------------------------------------------------------------- constants

def test_euler_constant_against_mpmath():
    assert abs(euler_gamma_constant() - float(mp.euler)) < 1e-15


def test_euler_constant_five_digits():
    assert round(euler_gamma_constant(), 5) == 0.57722


@pytest.mark.parametrize("n", range(17))
def test_stieltjes_table(n):
    ref = float(mp.stieltjes(n))
    assert abs(STIELTJES[n] - ref) <= 1e-15 * max(1.0, abs(ref))


# ---------------------------------------------------------------- Gamma and zeta against mpmath

@settings(max_examples=150, deadline=None)
@given(st.floats(-10, 10), st.floats(-40, 40))
def test_gamma_matches_mpmath(x, y):
    z = complex(x, y)
    if _pole_distance(FunctionId.gamma(), z) < 0.05:
        return
    ref = _mp_gamma(z)
    r = gamma(z)
    assert abs(r.value - ref) <= 1e-12 * abs(ref)
    assert r.est_abs_error >= 0.0


@settings(max_examples=150, deadline=None)
@given(st.floats(-10, 10), st.floats(-40, 40))
def test_zeta_matches_mpmath(x, y):
    s = complex(x, y)
    if abs(s - 1) < 0.05:
        return
    ref = _mp_zeta(s)
    r = zeta(s)
    assert abs(r.value - ref) <= 1e-10 * max(1.0, abs(ref))
    assert r.within()


def test_zeta_high_t_matches_mpmath():
    for s in (0.5 + 1000j, 0.3 + 1012.5j, 2 + 990j, -3 + 1025j):
        ref = _mp_zeta(s)
        assert abs(zeta(s).value - ref) <= 1e-9 * max(1.0, abs(ref))


def test_gamma_partial_matches_product():
    n, z = 30, 0.3 + 0.7j
    w = mp.mpc(z.real, z.imag)
    ref = mp.exp(-mp.euler * w) / w
    for k in range(1, n + 1):
        ref *= mp.exp(w / k) / (1 + w / k)
    assert abs(gamma_partial(n, z) - complex(ref)) <= 1e-12 * abs(complex(ref))


# ---------------------------------------------------------------- invariants

@pytest.mark.parametrize("fid", FIDS, ids=lambda f: f.tag)
@settings(max_examples=60, deadline=None)
@given(x=st.floats(-10, 10), y=st.floats(0.01, 40))
def test_conjugate_symmetry(fid, x, y):
    z = complex(x, y)
    if _pole_distance(fid, z) < 0.05 or _pole_distance(fid, z.conjugate()) < 0.05:
        return
    a = feval(fid, z).value
    b = feval(fid, z.conjugate()).value
    if not (cmath.isfinite(a) and a != 0):
        return
    assert abs(b - a.conjugate()) <= 1e-12 * abs(a)


@pytest.mark.parametrize("fid", FIDS, ids=lambda f: f.tag)
def test_derivative_consistency(fid):
    rng = np.random.default_rng(7)
    h = 1e-6
    checked = 0
    while checked < 100:
        z = complex(rng.uniform(-10, 10), rng.uniform(-40, 40))
        if _pole_distance(fid, z) < 0.05:
            continue
        r = feval(fid, z)
        fd = (feval(fid, z + h).value - feval(fid, z - h).value) / (2 * h)
        assert abs(r.derivative - fd) <= 1e-5 * (1 + abs(r.derivative)), z
        checked += 1


def test_functional_equation_grid():
    worst = 0.0
    for x in np.linspace(-5, 5, 20):
        for y in np.linspace(0, 50, 20):
            s = complex(x, y)
            if y == 0 and (x >= 1 and x == math.floor(x)):
                continue
            if abs(s - 1) < 1e-9 or (y == 0 and x <= 0 and x == math.floor(x)):
                continue
            worst = max(worst, functional_equation_residual(s))
    assert worst < 1e-8


def test_functional_equation_rejects_pole():
    with pytest.raises(PoleError):
        functional_equation_residual(1.0)


def test_laurent_consistency():
    for th in np.linspace(0, 2 * math.pi, 24, endpoint=False):
        s = 1 + 0.1 * cmath.exp(1j * th)
        assert abs(zeta_laurent(s, 10) - zeta(s).value) < 1e-6


def test_laurent_domain():
    with pytest.raises(DomainError):
        zeta_laurent(2.5, 5)
    with pytest.raises(DomainError):
        zeta_laurent(1.2, 40)


def test_partial_product_convergence_monotone():
    pts = [0.5 + 0.5j, 2.0 + 0j, -0.5 + 1j, 1 + 3j, 3 - 2j]
    sups = []
    for n in (10, 100, 1000, 10000):
        sups.append(max(abs(gamma_partial(n, z) - gamma(z).value) for z in pts))
    assert all(a >= b for a, b in zip(sups, sups[1:]))
    assert sups[-1] < 1e-3


# ---------------------------------------------------------------- singularities and limits

@pytest.mark.parametrize("n", range(0, 6))
def test_gamma_pole_raises(n):
    with pytest.raises(PoleError):
        gamma(-n)


def test_zeta_pole_raises():
    with pytest.raises(PoleError):
        zeta(1.0)


def test_near_pole_flag():
    assert gamma(-2 + 1e-4).near_pole
    assert not gamma(-2.5).near_pole


def test_essential_point_raises():
    with pytest.raises(EssentialPointError):
        feval(FunctionId.gamma_shift(0.5), 0.5)


def test_validity_height():
    with pytest.raises(AccuracyError):
        zeta(0.5 + 3000j)


def test_values_marks_poles_infinite():
    F, D = values(FunctionId.gamma(), np.array([-1.0 + 0j, 0.5 + 0j, -3.0 + 0j]))
    assert not np.isfinite(F[0]) and not np.isfinite(F[2])
    assert abs(F[1] - math.sqrt(math.pi)) < 1e-14


def test_values_agree_with_scalar():
    Z = np.array([0.5 + 14j, -3.2 + 7j, 4 - 2j])
    for fid in (FunctionId.gamma(), FunctionId.zeta()):
        F, D = values(fid, Z)
        for z, f, d in zip(Z, F, D):
            r = feval(fid, z)
            assert abs(f - r.value) <= 1e-13 * max(1, abs(f))
            assert abs(d - r.derivative) <= 1e-12 * max(1, abs(d))


def test_hardy_z_is_real_rotation_of_zeta():
    for t in (5.0, 14.0, 20.0, 49.7, 99.0):
        z = complex(mp.siegelz(t))
        assert abs(hardy_z(t) - z.real) <= 1e-10 * max(1, abs(z))


# ---------------------------------------------------------------- identifiers

@pytest.mark.parametrize("text", ["gamma", "zeta", "gamma-partial:12", "gamma-shift:0.25", "gamma-plus-inv"])
def test_function_id_parse_and_roundtrip(text):
    fid = FunctionId.parse(text)
    assert FunctionId.from_dict(fid.to_dict()) == fid


def test_function_id_parse_rejects_unknown():
    with pytest.raises(ValueError):
        FunctionId.parse("beta")

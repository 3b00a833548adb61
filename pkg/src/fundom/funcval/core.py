"""Public evaluation API: Gamma, digamma, zeta, Laurent data, FunctionId dispatch."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import AccuracyError, DomainError, EssentialPointError, PoleError
from . import _extended, _kernels as K
from .constants import STIELTJES, euler_gamma_constant
from .functions import (
    GAMMA,
    GAMMA_PARTIAL,
    GAMMA_PLUS_INV,
    GAMMA_SHIFT,
    POLYNOMIAL,
    ZETA,
    FunctionId,
)

NEAR_POLE_RADIUS = 1e-3
DEFAULT_VALIDITY_HEIGHT = 2000.0
# accuracy contract: est_abs_error <= tol * max(1, |value|)
VALUE_TOL = 1e-10
DERIV_TOL = 1e-8

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EvalResult:
    value: complex
    derivative: complex
    near_pole: bool
    est_abs_error: float

    def within(self, tol: float = VALUE_TOL) -> bool:
        """Whether the error estimate meets tol, scaled by max(1, |value|)."""
        return self.est_abs_error <= tol * max(1.0, abs(self.value))


def _gamma_rel_err(z: complex) -> float:
    a = abs(z)
    return 4 * _EPS * (4.0 + a * math.log(a + 2.0))


# ---------------------------------------------------------------- Gamma

def gamma(z) -> EvalResult:
    """Gamma(z) and Gamma'(z) = Gamma(z) psi(z)."""
    z = complex(z)
    if FunctionId.gamma().is_pole(z):
        raise PoleError(z)
    g, g1, _ = K.gamma3(z)
    _, d = FunctionId.gamma().nearest_pole(z)
    return EvalResult(g, g1, d < NEAR_POLE_RADIUS, abs(g) * _gamma_rel_err(z))


def gamma_log_deriv(z) -> complex:
    """psi(z) = Gamma'(z)/Gamma(z)."""
    z = complex(z)
    if FunctionId.gamma().is_pole(z):
        raise PoleError(z)
    return K.digamma_c(z)


def trigamma(z) -> complex:
    z = complex(z)
    if FunctionId.gamma().is_pole(z):
        raise PoleError(z)
    return K.trigamma_c(z)


def loggamma(z) -> complex:
    """A branch of log Gamma(z), continuous in the right half plane."""
    z = complex(z)
    if FunctionId.gamma().is_pole(z):
        raise PoleError(z)
    return K.loggamma_c(z)


def gamma_partial(n: int, z) -> complex:
    """Truncated canonical product e^{-gamma z}/z * prod_{k<=n} (1+z/k)^{-1} e^{z/k}."""
    z = complex(z)
    if FunctionId.gamma_partial(n).is_pole(z):
        raise PoleError(z)
    return K.gamma_partial3(int(n), z, euler_gamma_constant())[0]


# ---------------------------------------------------------------- zeta

def _check_height(s: complex, validity_height):
    h = DEFAULT_VALIDITY_HEIGHT if validity_height is None else validity_height
    if abs(s.imag) > h:
        raise AccuracyError(f"|Im s| = {abs(s.imag):g} exceeds the validity height {h:g}")


def zeta(s, validity_height=None) -> EvalResult:
    """zeta(s) and zeta'(s): Euler-Maclaurin for Re s >= 1/2, functional equation otherwise."""
    s = complex(s)
    if s == 1:
        raise PoleError(s)
    _check_height(s, validity_height)
    z0, z1, _, err, _ = K.zeta5(s)
    return EvalResult(z0, z1, abs(s - 1) < NEAR_POLE_RADIUS, err)


def zeta_derivs(s, validity_height=None):
    """(zeta, zeta', zeta'') at s."""
    s = complex(s)
    if s == 1:
        raise PoleError(s)
    _check_height(s, validity_height)
    z0, z1, z2, _, _ = K.zeta5(s)
    return z0, z1, z2


def hardy_z(t) -> float:
    """Real function Z(t) whose sign changes are the zeros on the critical line."""
    return K.hardy_z(float(t))


def zeta_laurent(s, n_terms: int) -> complex:
    """Truncated Laurent series of zeta about 1 with the Stieltjes constants."""
    s = complex(s)
    h = s - 1
    if not 0 < abs(h) < 1:
        raise DomainError("Laurent truncation is only used for 0 < |s-1| < 1")
    if not 1 <= n_terms <= len(STIELTJES):
        raise DomainError(f"n_terms must be in 1..{len(STIELTJES)}")
    acc = 1 / h
    p = 1 + 0j
    for n in range(n_terms):
        acc += (-1) ** n / math.factorial(n) * STIELTJES[n] * p
        p *= h
    return acc


def stieltjes_constant(n: int) -> float:
    return STIELTJES[n]


def functional_equation_residual(s) -> float:
    """|zeta(s) - chi(s) zeta(1-s)| with zeta by direct Euler-Maclaurin continuation
    on both sides and chi from log Gamma, all in extended precision."""
    s = complex(s)
    if s == 1 or (s.imag == 0 and s.real >= 1 and s.real == math.floor(s.real)):
        raise PoleError(s, f"s = {s} is a pole of one side of the functional equation")
    arr = np.array([s], dtype=np.clongdouble)
    lhs = _extended.zeta_em(arr)
    rhs = _extended.chi(arr) * _extended.zeta_em(1 - arr)
    return float(np.abs(lhs - rhs)[0])


# ---------------------------------------------------------------- dispatch

def _poly3(coeffs, z):
    f = f1 = f2 = 0j
    for c in coeffs:
        f2 = f2 * z + 2 * f1
        f1 = f1 * z + f
        f = f * z + c
    return f, f1, f2


def evaluator(fid: FunctionId):
    """Return a fast unchecked callable z -> (f, f', f'') for the variant."""
    v = fid.variant
    if v == GAMMA:
        return K.gamma3
    if v == ZETA:
        def zeta3(s):
            z0, z1, z2, _, _ = K.zeta5(s)
            return z0, z1, z2
        return zeta3
    if v == GAMMA_PARTIAL:
        n = fid.n
        eg = euler_gamma_constant()
        return lambda z: K.gamma_partial3(n, z, eg)
    if v == GAMMA_SHIFT:
        a = fid.a
        return lambda z: _shift3(z, a)
    if v == GAMMA_PLUS_INV:
        def gpgi(z):
            g0, g1, g2 = K.gamma3(z)
            h0, h1, h2 = _shift3(z, 0j)
            return g0 + h0, g1 + h1, g2 + h2
        return gpgi
    if v == POLYNOMIAL:
        coeffs = fid.coeffs
        return lambda z: _poly3(coeffs, z)
    raise ValueError(v)


def _shift3(z, a):
    w = 1.0 / (z - a)
    g0, g1, g2 = K.gamma3(w)
    w2 = w * w
    return g0, -g1 * w2, g2 * w2 * w2 + 2.0 * g1 * w2 * w


def eval(fid: FunctionId, z) -> EvalResult:  # noqa: A001 - mirrors the mathematical name
    """Evaluate the variant and its derivative at z, with pole/essential checks."""
    z = complex(z)
    if fid.is_essential(z):
        raise EssentialPointError(z)
    if fid.is_pole(z):
        raise PoleError(z)
    v = fid.variant
    if v == GAMMA:
        return gamma(z)
    if v == ZETA:
        return zeta(z)
    f0, f1, _ = evaluator(fid)(z)
    _, d = fid.nearest_pole(z)
    if v == POLYNOMIAL:
        err = 4 * _EPS * sum(abs(c) * abs(z) ** k for k, c in enumerate(reversed(fid.coeffs)))
    elif v == GAMMA_PARTIAL:
        err = abs(f0) * 4 * _EPS * (fid.n + 4)
    else:
        e = fid.essential_point
        w = 1.0 / (z - e)
        err = abs(f0) * _gamma_rel_err(w)
        if v == GAMMA_PLUS_INV:
            err += abs(K.gamma_c(z)) * _gamma_rel_err(z)
    return EvalResult(f0, f1, d < NEAR_POLE_RADIUS, err)


def values(fid: FunctionId, Z) -> tuple:
    """Vectorised (f, f') on an array; poles give inf, failures nan. No exceptions."""
    Z = np.ascontiguousarray(Z, dtype=complex)
    flat = Z.ravel()
    F = np.empty_like(flat)
    D = np.empty_like(flat)
    v = fid.variant
    if v == ZETA:
        K.zeta_array(flat, F, D)
    elif v == GAMMA:
        K.gamma_array(flat, F, D)
    elif v in (GAMMA_SHIFT, GAMMA_PLUS_INV):
        a = fid.a if v == GAMMA_SHIFT else 0j
        with np.errstate(all="ignore"):
            W = 1.0 / (flat - a)
            W[~np.isfinite(W)] = np.nan
            K.gamma_array(W, F, D)
            D = -D * W * W
            if v == GAMMA_PLUS_INV:
                G = np.empty_like(flat)
                GD = np.empty_like(flat)
                K.gamma_array(flat, G, GD)
                F = F + G
                D = D + GD
    else:
        ev = evaluator(fid)
        for i, z in enumerate(flat):
            try:
                f0, f1, _ = ev(z)
            except ZeroDivisionError:
                f0 = f1 = complex(np.inf, 0)
            F[i] = f0
            D[i] = f1
    return F.reshape(Z.shape), D.reshape(Z.shape)

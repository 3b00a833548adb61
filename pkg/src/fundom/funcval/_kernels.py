"""Compiled scalar and array kernels for Gamma, digamma, trigamma and zeta.

Every scalar kernel takes and returns Python-compatible complex numbers and
does no pole checking; the wrappers in :mod:`fundom.funcval.core` own the
error handling. Array kernels release the GIL so render/scans can use threads.
"""
import cmath
import math
from fractions import Fraction

import numpy as np
from numba import njit


def bernoulli_numbers(n_max):
    """Exact Bernoulli numbers B_0..B_n_max (B_1 = -1/2) via the Akiyama-Tanigawa recurrence."""
    out = []
    a = [Fraction(0)] * (n_max + 1)
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    if n_max >= 1:
        out[1] = -out[1]
    return out


_B = bernoulli_numbers(40)

# Euler-Maclaurin tail coefficients B_{2k}/(2k)!, k = 1..EM_TERMS
EM_TERMS = 16
EM_COEF = np.array([float(_B[2 * k] / math.factorial(2 * k)) for k in range(1, EM_TERMS + 1)])

# asymptotic series of psi and psi': B_{2k}/(2k) and B_{2k}, k = 1..9
PSI_COEF = np.array([float(_B[2 * k] / (2 * k)) for k in range(1, 10)])
TRI_COEF = np.array([float(_B[2 * k]) for k in range(1, 10)])

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients)
LANCZOS_G = 7.0
LANCZOS_P = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

PI = math.pi
LOG_PI = math.log(math.pi)
LOG_2 = math.log(2.0)
LOG_2PI = math.log(2.0 * math.pi)
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)
EPS = 2.220446049250313e-16


# ---------------------------------------------------------------- trig helpers

@njit(cache=True)
def sinpi(z):
    """sin(pi z) with exact reduction of the real part (accurate near integers)."""
    n = math.floor(z.real + 0.5)
    r = z - n
    v = cmath.sin(PI * r)
    if int(n) % 2 != 0:
        v = -v
    return v


@njit(cache=True)
def cospi(z):
    n = math.floor(z.real + 0.5)
    r = z - n
    v = cmath.cos(PI * r)
    if int(n) % 2 != 0:
        v = -v
    return v


@njit(cache=True)
def cotpi(z):
    """cot(pi z), overflow-free for large |Im z|."""
    n = math.floor(z.real + 0.5)
    w = PI * (z - n)
    if abs(w.imag) < 1.0:
        return cmath.cos(w) / cmath.sin(w)
    if w.imag > 0:
        e = cmath.exp(2j * w)
        return 1j * (e + 1.0) / (e - 1.0)
    e = cmath.exp(-2j * w)
    return 1j * (1.0 + e) / (1.0 - e)


@njit(cache=True)
def csc2pi(z):
    """1/sin^2(pi z), overflow-free for large |Im z|."""
    n = math.floor(z.real + 0.5)
    w = PI * (z - n)
    if abs(w.imag) < 1.0:
        s = cmath.sin(w)
        return 1.0 / (s * s)
    if w.imag > 0:
        e = cmath.exp(2j * w)
    else:
        e = cmath.exp(-2j * w)
    d = 1.0 - e
    return -4.0 * e / (d * d)


@njit(cache=True)
def log_sinpi(z):
    """A logarithm of sin(pi z) (branch irrelevant: only exponentiated)."""
    n = math.floor(z.real + 0.5)
    w = PI * (z - n)
    odd = int(n) % 2 != 0
    if abs(w.imag) < 20.0:
        v = cmath.log(cmath.sin(w))
    elif w.imag > 0:
        v = -1j * w + cmath.log(1.0 - cmath.exp(2j * w)) + cmath.log(0.5j)
    else:
        v = 1j * w + cmath.log(1.0 - cmath.exp(-2j * w)) + cmath.log(-0.5j)
    if odd:
        v += 1j * PI
    return v


@njit(cache=True)
def log_cospi(z):
    n = math.floor(z.real + 0.5)
    w = PI * (z - n)
    odd = int(n) % 2 != 0
    if abs(w.imag) < 20.0:
        v = cmath.log(cmath.cos(w))
    elif w.imag > 0:
        v = -1j * w + cmath.log(1.0 + cmath.exp(2j * w)) - LOG_2
    else:
        v = 1j * w + cmath.log(1.0 + cmath.exp(-2j * w)) - LOG_2
    if odd:
        v += 1j * PI
    return v


# ---------------------------------------------------------------- Gamma family

@njit(cache=True)
def _lanczos_sum(zm1):
    x = LANCZOS_P[0] + 0j
    for i in range(1, 9):
        x += LANCZOS_P[i] / (zm1 + i)
    return x


@njit(cache=True)
def loggamma_right(z):
    """log Gamma(z) for Re z >= 0.5 (a branch, continuous off the negative axis)."""
    zm1 = z - 1.0
    t = zm1 + LANCZOS_G + 0.5
    return HALF_LOG_2PI + (zm1 + 0.5) * cmath.log(t) - t + cmath.log(_lanczos_sum(zm1))


@njit(cache=True)
def loggamma_c(z):
    if z.real >= 0.5:
        return loggamma_right(z)
    return LOG_PI - log_sinpi(z) - loggamma_right(1.0 - z)


@njit(cache=True)
def gamma_c(z):
    if z.real >= 0.5:
        if abs(z) < 140.0:
            zm1 = z - 1.0
            t = zm1 + LANCZOS_G + 0.5
            return SQRT_2PI * cmath.exp((zm1 + 0.5) * cmath.log(t) - t) * _lanczos_sum(zm1)
        return cmath.exp(loggamma_right(z))
    if abs(z.imag) < 30.0 and abs(z) < 140.0:
        return PI / (sinpi(z) * gamma_c(1.0 - z))
    return cmath.exp(LOG_PI - log_sinpi(z) - loggamma_right(1.0 - z))


@njit(cache=True)
def digamma_c(z):
    acc = 0j
    if z.real < 0.5:
        acc = -PI * cotpi(z)
        z = 1.0 - z
    while abs(z) < 12.0:
        acc -= 1.0 / z
        z += 1.0
    iz2 = 1.0 / (z * z)
    s = 0j
    p = iz2
    for k in range(9):
        s += PSI_COEF[k] * p
        p *= iz2
    return acc + cmath.log(z) - 0.5 / z - s


@njit(cache=True)
def trigamma_c(z):
    acc = 0j
    sign = 1.0
    if z.real < 0.5:
        acc = PI * PI * csc2pi(z)
        sign = -1.0
        z = 1.0 - z
    inner = 0j
    while abs(z) < 12.0:
        inner += 1.0 / (z * z)
        z += 1.0
    iz = 1.0 / z
    iz2 = iz * iz
    s = iz + 0.5 * iz2
    p = iz2 * iz
    for k in range(9):
        s += TRI_COEF[k] * p
        p *= iz2
    return acc + sign * (inner + s)


@njit(cache=True)
def gamma3(z):
    """(Gamma, Gamma', Gamma'') at z."""
    g = gamma_c(z)
    p = digamma_c(z)
    p1 = trigamma_c(z)
    return g, g * p, g * (p * p + p1)


@njit(cache=True)
def gamma_partial3(n, z, euler):
    """Truncated canonical product and its first two derivatives."""
    v = cmath.exp(-euler * z) / z
    L = -euler - 1.0 / z
    L1 = 1.0 / (z * z)
    for k in range(1, n + 1):
        q = 1.0 + z / k
        v *= cmath.exp(z / k) / q
        zk = z + k
        L += 1.0 / k - 1.0 / zk
        L1 += 1.0 / (zk * zk)
    return v, v * L, v * (L * L + L1)


# ---------------------------------------------------------------- zeta

@njit(cache=True)
def zeta_em5(s):
    """Euler-Maclaurin summation for zeta and two derivatives.

    Returns (zeta, zeta', zeta'', sum of term moduli, modulus of last correction).
    Valid for any s != 1 with Re s > -2*EM_TERMS; the caller uses it for Re s >= 1/2.
    """
    M = EM_TERMS
    N = int(math.ceil((abs(s) + 2 * M) * 3.0 / (2.0 * PI))) + 1
    if N < 10:
        N = 10
    z0 = 0j
    z1 = 0j
    z2 = 0j
    asum = 0.0
    for n in range(1, N):
        ln = math.log(n)
        t = cmath.exp(-s * ln)
        z0 += t
        z1 -= ln * t
        z2 += ln * ln * t
        asum += abs(t) * (1.0 + ln * ln)
    lN = math.log(N)
    a = cmath.exp((1.0 - s) * lN)
    g = 1.0 / (s - 1.0)
    z0 += a * g
    z1 += -lN * a * g - a * g * g
    z2 += lN * lN * a * g + 2.0 * lN * a * g * g + 2.0 * a * g * g * g
    b = cmath.exp(-s * lN)
    z0 += 0.5 * b
    z1 -= 0.5 * lN * b
    z2 += 0.5 * lN * lN * b
    asum += abs(a * g) + abs(b)
    p0 = s
    p1 = 1.0 + 0j
    p2 = 0j
    w = b / N
    last = 0.0
    for k in range(M):
        c = EM_COEF[k]
        term = c * p0 * w
        z0 += term
        z1 += c * (p1 - p0 * lN) * w
        z2 += c * (p2 - 2.0 * p1 * lN + p0 * lN * lN) * w
        last = abs(term)
        for j in (2 * k + 1, 2 * k + 2):
            q = s + j
            p2 = p2 * q + 2.0 * p1
            p1 = p1 * q + p0
            p0 = p0 * q
        w = w / (N * N)
    return z0, z1, z2, asum, last


@njit(cache=True)
def chi3(s):
    """chi(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) and two derivatives."""
    u = 1.0 - s
    lam = LOG_2PI - digamma_c(u)
    lam1 = trigamma_c(u)
    if abs(s.imag) < 30.0 and abs(s) < 140.0:
        K = cmath.exp(s * LOG_2 + (s - 1.0) * LOG_PI) * gamma_c(u)
        Ks = K * sinpi(0.5 * s)
        Kc = K * cospi(0.5 * s)
    else:
        logK = s * LOG_2 + (s - 1.0) * LOG_PI + loggamma_c(u)
        Ks = cmath.exp(logK + log_sinpi(0.5 * s))
        Kc = cmath.exp(logK + log_cospi(0.5 * s))
    c0 = Ks
    c1 = lam * Ks + 0.5 * PI * Kc
    c2 = (lam1 + lam * lam - 0.25 * PI * PI) * Ks + PI * lam * Kc
    return c0, c1, c2


@njit(cache=True)
def zeta5(s):
    """zeta, zeta', zeta'' at s, plus an absolute error estimate and route flag.

    Route 0 is direct Euler-Maclaurin (Re s >= 1/2, and the disk |s| < 1/2 where
    the reflected point would sit on the pole); route 1 is the functional
    equation applied to the Euler-Maclaurin value at 1 - s.
    """
    if s.real >= 0.5 or abs(s) < 0.5:
        z0, z1, z2, asum, last = zeta_em5(s)
        err = 8.0 * EPS * asum + last
        return z0, z1, z2, err, 0
    u = 1.0 - s
    w0, w1, w2, asum, last = zeta_em5(u)
    c0, c1, c2 = chi3(s)
    z0 = c0 * w0
    z1 = c1 * w0 - c0 * w1
    z2 = c2 * w0 - 2.0 * c1 * w1 + c0 * w2
    errw = 8.0 * EPS * asum + last
    err = abs(c0) * errw + abs(z0) * EPS * (16.0 + abs(s) * (math.log(abs(s) + 2.0) + 2.0))
    return z0, z1, z2, err, 1


@njit(cache=True)
def riemann_siegel_theta(t):
    """theta(t) = arg Gamma(1/4 + it/2) - (t/2) log pi, up to a multiple of 2 pi."""
    z = 0.25 + 0.5j * t
    lg = loggamma_right(z + 1.0) - cmath.log(z)
    return lg.imag - 0.5 * t * LOG_PI


@njit(cache=True)
def hardy_z(t):
    """Z(t) = exp(i theta(t)) zeta(1/2 + it), real-valued up to rounding."""
    th = riemann_siegel_theta(t)
    z0, z1, z2, err, route = zeta5(0.5 + 1j * t)
    return (cmath.exp(1j * th) * z0).real


# ---------------------------------------------------------------- array kernels

@njit(cache=True, nogil=True)
def zeta_array(S, F, D):
    for i in range(S.size):
        s = S[i]
        if s == 1.0:
            F[i] = complex(np.inf, 0.0)
            D[i] = complex(np.inf, 0.0)
            continue
        z0, z1, z2, err, route = zeta5(s)
        F[i] = z0
        D[i] = z1


@njit(cache=True, nogil=True)
def gamma_array(Z, F, D):
    for i in range(Z.size):
        z = Z[i]
        if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
            F[i] = complex(np.inf, 0.0)
            D[i] = complex(np.inf, 0.0)
            continue
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            F[i] = complex(np.nan, np.nan)
            D[i] = complex(np.nan, np.nan)
            continue
        g = gamma_c(z)
        F[i] = g
        D[i] = g * digamma_c(z)


@njit(cache=True, nogil=True)
def hardy_z_array(T, out):
    for i in range(T.size):
        out[i] = hardy_z(T[i])

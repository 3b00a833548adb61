"""Extended-precision (80-bit long double) evaluation routes.

Used only for cross-validation: the functional-equation residual compares two
independent routes, and at points like -5+50i |zeta| is ~1e5, so an absolute
residual of 1e-8 needs about 1e-13 relative accuracy on each side. Double
precision phases of Gamma and the power factors lose ~1e-13 there, so both
routes are evaluated in long double. Vectorised over numpy arrays.
"""
import math
from fractions import Fraction

import numpy as np

from ._kernels import bernoulli_numbers

LD = np.longdouble
CLD = np.clongdouble

PI_LD = LD("3.14159265358979323846264338327950288")
LOG2PI_LD = np.log(2 * PI_LD)

_B = bernoulli_numbers(60)


def _ld(frac: Fraction):
    return LD(frac.numerator) / LD(frac.denominator)


_EM_COEF = [_ld(_B[2 * k] / math.factorial(2 * k)) for k in range(1, 21)]
_STIRLING = [_ld(_B[2 * k] / Fraction((2 * k) * (2 * k - 1))) for k in range(1, 16)]


def zeta_em(s, terms=20):
    """Euler-Maclaurin analytic continuation of zeta, valid for Re s > -2*terms."""
    s = np.asarray(s, dtype=CLD)
    N = int(np.ceil((float(np.max(np.abs(s))) + 2 * terms) * 3.0 / (2 * np.pi))) + 1
    N = max(N, 10)
    acc = np.zeros_like(s)
    for n in range(1, N):
        acc += np.exp(-s * np.log(LD(n)))
    lN = np.log(LD(N))
    b = np.exp(-s * lN)
    acc += np.exp((1 - s) * lN) / (s - 1) + b / 2
    p = s.copy()
    w = b / N
    for k in range(terms):
        acc += _EM_COEF[k] * p * w
        p = p * (s + 2 * k + 1) * (s + 2 * k + 2)
        w = w / (LD(N) * LD(N))
    return acc


def loggamma(z):
    """Stirling series after upward shift to Re z >= 20 (a branch of log Gamma)."""
    z = np.asarray(z, dtype=CLD).copy()
    shift = np.zeros_like(z)
    while True:
        small = z.real < 20
        if not np.any(small):
            break
        shift[small] += np.log(z[small])
        z[small] += 1
    iz = 1 / z
    iz2 = iz * iz
    ser = np.zeros_like(z)
    p = iz
    for c in _STIRLING:
        ser += c * p
        p = p * iz2
    return (z - LD(0.5)) * np.log(z) - z + LOG2PI_LD / 2 + ser - shift


def chi(s):
    """2^s pi^(s-1) sin(pi s/2) Gamma(1-s) in long double."""
    s = np.asarray(s, dtype=CLD)
    logk = s * np.log(LD(2)) + (s - 1) * np.log(PI_LD) + loggamma(1 - s)
    return np.exp(logk) * np.sin(PI_LD * s / 2)

"""FunctionId: which analytic function is under study, and its singularities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

GAMMA = "Gamma"
ZETA = "Zeta"
GAMMA_PARTIAL = "GammaPartial"
GAMMA_SHIFT = "GammaShift"
GAMMA_PLUS_INV = "GammaPlusGammaInv"
POLYNOMIAL = "Polynomial"  # analytic test provider, not part of the studied family

VARIANTS = (GAMMA, ZETA, GAMMA_PARTIAL, GAMMA_SHIFT, GAMMA_PLUS_INV, POLYNOMIAL)

# radius of the disk around an essential point that tracing refuses to enter
ESSENTIAL_RADIUS = 1e-3


@dataclass(frozen=True)
class FunctionId:
    variant: str
    n: Optional[int] = None
    a: Optional[complex] = None
    coeffs: Optional[tuple] = None  # highest degree first

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown function variant {self.variant!r}")
        if self.variant == GAMMA_PARTIAL and (self.n is None or self.n < 1):
            raise ValueError("GammaPartial needs a positive integer n")
        if self.variant == GAMMA_SHIFT and self.a is None:
            raise ValueError("GammaShift needs the parameter a")
        if self.variant == POLYNOMIAL and not self.coeffs:
            raise ValueError("Polynomial needs coefficients")

    # constructors -------------------------------------------------------
    @classmethod
    def gamma(cls):
        return cls(GAMMA)

    @classmethod
    def zeta(cls):
        return cls(ZETA)

    @classmethod
    def gamma_partial(cls, n: int):
        return cls(GAMMA_PARTIAL, n=int(n))

    @classmethod
    def gamma_shift(cls, a):
        return cls(GAMMA_SHIFT, a=complex(a))

    @classmethod
    def gamma_plus_gamma_inv(cls):
        return cls(GAMMA_PLUS_INV)

    @classmethod
    def polynomial(cls, coeffs):
        return cls(POLYNOMIAL, coeffs=tuple(complex(c) for c in coeffs))

    # descriptors --------------------------------------------------------
    @property
    def tag(self) -> str:
        if self.variant == GAMMA_PARTIAL:
            return f"{self.variant}({self.n})"
        if self.variant == GAMMA_SHIFT:
            return f"{self.variant}({self.a.real!r},{self.a.imag!r})"
        if self.variant == POLYNOMIAL:
            return f"{self.variant}({len(self.coeffs) - 1})"
        return self.variant

    @property
    def real_symmetric(self) -> bool:
        """True when f(conj z) = conj f(z)."""
        if self.variant == GAMMA_SHIFT:
            return self.a.imag == 0.0
        if self.variant == POLYNOMIAL:
            return all(c.imag == 0.0 for c in self.coeffs)
        return True

    @property
    def essential_point(self) -> Optional[complex]:
        if self.variant == GAMMA_SHIFT:
            return self.a
        if self.variant == GAMMA_PLUS_INV:
            return 0j
        return None

    def to_dict(self) -> dict:
        d = {"variant": self.variant}
        if self.n is not None:
            d["n"] = self.n
        if self.a is not None:
            d["a"] = [self.a.real, self.a.imag]
        if self.coeffs is not None:
            d["coeffs"] = [[c.real, c.imag] for c in self.coeffs]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionId":
        a = complex(*d["a"]) if "a" in d else None
        coeffs = tuple(complex(*c) for c in d["coeffs"]) if "coeffs" in d else None
        return cls(d["variant"], n=d.get("n"), a=a, coeffs=coeffs)

    @classmethod
    def parse(cls, text: str) -> "FunctionId":
        """Parse a CLI name: gamma, zeta, gamma-partial:N, gamma-shift:A, gamma-plus-inv."""
        name, _, arg = text.strip().partition(":")
        name = name.lower().replace("_", "-")
        if name == "gamma":
            return cls.gamma()
        if name == "zeta":
            return cls.zeta()
        if name == "gamma-partial":
            return cls.gamma_partial(int(arg))
        if name == "gamma-shift":
            return cls.gamma_shift(complex(arg.replace("i", "j")) if arg else 0j)
        if name in ("gamma-plus-inv", "gamma-plus-gamma-inv"):
            return cls.gamma_plus_gamma_inv()
        raise ValueError(f"unknown function name {text!r}")

    # singularities ------------------------------------------------------
    def is_pole(self, z: complex) -> bool:
        """Exact (up to rounding for composed variants) pole membership."""
        z = complex(z)
        v = self.variant
        if v == ZETA:
            return z == 1
        if v == GAMMA:
            return _is_nonpos_int(z)
        if v == GAMMA_PARTIAL:
            return _is_nonpos_int(z) and -z.real <= self.n
        if v == GAMMA_SHIFT:
            return _shift_pole(z, self.a)
        if v == GAMMA_PLUS_INV:
            return _is_nonpos_int(z) or _shift_pole(z, 0j)
        return False

    def is_essential(self, z: complex) -> bool:
        e = self.essential_point
        return e is not None and complex(z) == e

    def nearest_pole(self, z: complex):
        """(pole, distance) of the nearest pole, or (None, inf)."""
        z = complex(z)
        v = self.variant
        cands = []
        if v == ZETA:
            cands.append(1 + 0j)
        if v in (GAMMA, GAMMA_PARTIAL, GAMMA_PLUS_INV):
            k = min(0, round(z.real))
            if v == GAMMA_PARTIAL:
                k = max(k, -self.n)
            cands.append(complex(k, 0))
            if v == GAMMA_PARTIAL and z.real < -self.n:
                cands.append(complex(-self.n, 0))
        if v in (GAMMA_SHIFT, GAMMA_PLUS_INV):
            a = self.a if v == GAMMA_SHIFT else 0j
            if z != a:
                w = 1.0 / (z - a)
                base = -max(1, round(-w.real)) if w.real < 0 else -1
                for m in (base - 1, base, base + 1):
                    if m <= -1:
                        cands.append(a + 1.0 / m)
        if not cands:
            return None, math.inf
        best = min(cands, key=lambda p: abs(p - z))
        return best, abs(best - z)

    def poles_in(self, sigma_min, sigma_max, t_min, t_max, exclude_radius=ESSENTIAL_RADIUS):
        """Finite list of poles inside a rectangle (accumulation points truncated)."""
        out = []
        v = self.variant
        inside = lambda p: sigma_min <= p.real <= sigma_max and t_min <= p.imag <= t_max
        if v == ZETA:
            out = [1 + 0j]
        if v in (GAMMA, GAMMA_PARTIAL, GAMMA_PLUS_INV):
            lo = math.ceil(sigma_min)
            hi = min(0, math.floor(sigma_max))
            if v == GAMMA_PARTIAL:
                lo = max(lo, -self.n)
            out += [complex(k, 0) for k in range(lo, hi + 1)]
        if v in (GAMMA_SHIFT, GAMMA_PLUS_INV):
            a = self.a if v == GAMMA_SHIFT else 0j
            n_max = int(1.0 / exclude_radius)
            out += [a - 1.0 / n for n in range(1, n_max + 1)]
        return sorted({p for p in out if inside(p)}, key=lambda p: (p.real, p.imag))


def _is_nonpos_int(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _shift_pole(z: complex, a: complex) -> bool:
    if z == a:
        return False
    w = 1.0 / (z - a)
    m = round(w.real)
    return m <= -1 and abs(w - m) <= 1e-12 * max(1.0, abs(w))

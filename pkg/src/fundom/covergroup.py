"""Covering transformations U_k and H, evaluated by inverting f on the domains of an atlas.

U_k sends a point z of Omega_j to the point of Omega_{j+k} with the same value of f;
H sends it to the point of the mirror domain with the same value. Both are evaluated
by continuation-plus-Newton inversion of f restricted to the target domain, and the
result is re-located in the atlas to confirm that it landed in the expected domain.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .domains.model import Atlas, FundamentalDomain
from .domains.verify import Inverter, interior_samples
from .errors import AtInfinity, DomainMissing, FundomError, NewtonEscape, OnBoundary, OutsideAtlas
from .funcval import evaluator

LAW_TOL = 1e-8
DENSE_GRID = 64


@dataclass(frozen=True)
class Letter:
    name: str          # "U" or "H"
    k: int = 0

    def __str__(self):
        return f"U{self.k}" if self.name == "U" else "H"


@dataclass(frozen=True)
class GroupWord:
    letters: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        """Comma separated letters such as "U1,U-2,H"."""
        out = []
        for tok in (t.strip() for t in text.split(",")):
            if not tok:
                continue
            if tok.upper() == "H":
                out.append(Letter("H"))
                continue
            m = re.fullmatch(r"[Uu]\(?([+-]?\d+)\)?", tok)
            if not m:
                raise ValueError(f"bad group letter {tok!r}")
            out.append(Letter("U", int(m.group(1))))
        return cls(tuple(out))

    @classmethod
    def U(cls, k: int) -> "GroupWord":
        return cls((Letter("U", int(k)),))

    @classmethod
    def H(cls) -> "GroupWord":
        return cls((Letter("H"),))

    def __add__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def __str__(self):
        return ",".join(str(x) for x in self.letters)


def _mirror_label(label: str) -> str:
    return label[1:] if label.startswith("~") else "~" + label


class CoverGroup:
    """Covering transformations over a frozen atlas, with cached per-domain inverters."""

    def __init__(self, atlas: Atlas):
        self.atlas = atlas
        self.fid = atlas.fid
        self.ev = evaluator(atlas.fid)
        self._inv = {}
        self._dense = {}
        self._by_index = {d.index: d for d in atlas.domains if not d.mirror}

    # ------------------------------------------------------------ helpers
    def domain_of_index(self, n: int) -> FundamentalDomain:
        try:
            return self._by_index[n]
        except KeyError:
            raise DomainMissing(f"Omega_{n} is not part of the atlas") from None

    def _inverter(self, dom: FundamentalDomain, dense: bool = False) -> Inverter:
        cache = self._dense if dense else self._inv
        if dom.label not in cache:
            cache[dom.label] = Inverter(dom, n_grid=DENSE_GRID if dense else 28)
        return cache[dom.label]

    def invert_in(self, dom: FundamentalDomain, w: complex) -> complex:
        """The point of dom (an upper domain) with f = w, re-located to confirm the leaf."""
        for dense in (False, True):
            try:
                z = self._inverter(dom, dense).invert(w)
            except NewtonEscape:
                continue
            try:
                if self.atlas.locate(z) == dom.label:
                    return z
            except (OnBoundary, OutsideAtlas):
                continue
        raise NewtonEscape(f"no pre-image of {w} found inside {dom.label}")

    def _pole_rule(self, k: int, z: complex):
        """Gamma: U_k(-n) = k - n for k - n >= 0 (extension to the poles)."""
        if self.fid.variant != "Gamma" or z.imag != 0 or z.real > 0 or z.real != math.floor(z.real):
            return None
        n = -int(z.real)
        if k - n >= 0:
            return complex(k - n, 0.0)
        raise AtInfinity(f"U_{k}(-{n}) lies at infinity")

    # ------------------------------------------------------------ letters
    def apply_U(self, k: int, z: complex) -> complex:
        z = complex(z)
        pole = self._pole_rule(int(k), z)
        if pole is not None:
            return pole
        if z.imag < 0:
            return self.apply_U(k, z.conjugate()).conjugate()
        dom = self.atlas.locate_domain(z)
        target = self.domain_of_index(dom.index + int(k))
        return self.invert_in(target, self.ev(z)[0])

    def apply_H(self, z: complex) -> complex:
        z = complex(z)
        if z.imag < 0:
            return self.apply_H(z.conjugate()).conjugate()
        dom = self.atlas.locate_domain(z)
        # the mirror of dom is its conjugate: invert conj(w) in dom itself and conjugate back
        return self.invert_in(dom, self.ev(z)[0].conjugate()).conjugate()

    def apply_word(self, word: GroupWord, z: complex) -> complex:
        """Letters applied left to right."""
        for letter in word.letters:
            z = self.apply_U(letter.k, z) if letter.name == "U" else self.apply_H(z)
        return z

    def leaf_index(self, z: complex):
        """(index, mirrored) of the domain containing z."""
        d = self.atlas.locate_domain(z)
        return d.index, d.mirror


def apply_U(k: int, z: complex, atlas: Atlas, group: CoverGroup = None) -> complex:
    return (group or CoverGroup(atlas)).apply_U(k, z)


def apply_H(z: complex, atlas: Atlas, group: CoverGroup = None) -> complex:
    return (group or CoverGroup(atlas)).apply_H(z)


def apply_word(word, z: complex, atlas: Atlas, group: CoverGroup = None) -> complex:
    if isinstance(word, str):
        word = GroupWord.parse(word)
    return (group or CoverGroup(atlas)).apply_word(word, z)


# ---------------------------------------------------------------- law verification

@dataclass
class LawReport:
    n_samples: int
    max_deviation: dict
    leaf_errors: int
    excluded: dict
    passed: bool
    tol: float = LAW_TOL
    seed: int = 0
    worst: dict = field(default_factory=dict)

    def to_dict(self):
        return dict(self.__dict__)


def _sample_point(group: CoverGroup, rng, doms):
    dom = doms[int(rng.integers(len(doms)))]
    pts = interior_samples(dom, 1, rng, margin=1e-2)
    if len(pts) == 0:
        return None, None
    z = complex(pts[0])
    if rng.random() < 0.5:
        z = z.conjugate()
    return z, dom


def verify_laws(atlas: Atlas, n_samples: int = 100, seed: int = 0, k_range=(-3, 3), tol: float = LAW_TOL,
                max_attempts: int = 20) -> LawReport:
    """Commutation, additivity, inversion, involution, cyclicity and fiber preservation on samples.

    For each sample z (in Omega_n or its mirror) and j, k drawn from k_range such that
    Omega_{n+j}, Omega_{n+k} and Omega_{n+j+k} belong to the atlas, the deviations
    |U_j U_k z - U_k U_j z|, |U_j U_k z - U_{j+k} z|, |U_{-k} U_k z - z|, |H H z - z|,
    |U_1^m z - U_m z| (m <= 5 when available) and the relative fiber errors
    |f(T z) - f(z)| / max(1, |f(z)|) are recorded. Samples whose intermediate points
    leave the atlas are excluded and counted by reason.
    """
    group = CoverGroup(atlas)
    rng = np.random.default_rng(seed)
    idx = sorted(group._by_index)
    doms = [group._by_index[i] for i in idx]
    lo_k, hi_k = k_range
    dev = {"fiber": 0.0, "commutation": 0.0, "additivity": 0.0, "inversion": 0.0, "involution": 0.0,
           "cyclicity": 0.0}
    worst = {}
    excluded = {}
    leaf_errors = 0
    done = 0
    attempts = 0
    ev = group.ev

    def note(key, value, z):
        value = float(value)
        if value > dev[key]:
            dev[key] = value
            worst[key] = [z.real, z.imag]

    while done < n_samples and attempts < max_attempts * n_samples:
        attempts += 1
        z, dom = _sample_point(group, rng, doms)
        if z is None:
            continue
        n = dom.index
        ks = [k for k in range(lo_k, hi_k + 1) if n + k in group._by_index]
        pairs = [(j, k) for j in ks for k in ks if n + j + k in group._by_index]
        if not pairs:
            excluded["no_room"] = excluded.get("no_room", 0) + 1
            continue
        j, k = pairs[int(rng.integers(len(pairs)))]
        try:
            fz = ev(z)[0]
            scale = max(1.0, abs(fz))
            uk = group.apply_U(k, z)
            uj = group.apply_U(j, z)
            ujk = group.apply_U(j, uk)
            ukj = group.apply_U(k, uj)
            usum = group.apply_U(j + k, z)
            back = group.apply_U(-k, uk)
            hz = group.apply_H(z)
            hh = group.apply_H(hz)
            cyc = None
            m = max(ks) if max(ks) > 0 else 0
            m = min(m, 5)
            if m >= 1:
                w = z
                for _ in range(m):
                    w = group.apply_U(1, w)
                cyc = abs(w - group.apply_U(m, z))
        except (NewtonEscape, DomainMissing, OnBoundary, OutsideAtlas, AtInfinity) as e:
            key = type(e).__name__
            excluded[key] = excluded.get(key, 0) + 1
            continue
        for t in (uk, uj, ujk, ukj, usum, back, hz, hh):
            note("fiber", abs(ev(t)[0] - fz) / scale, z)
        note("commutation", abs(ujk - ukj), z)
        note("additivity", abs(ujk - usum), z)
        note("inversion", abs(back - z), z)
        note("involution", abs(hh - z), z)
        if cyc is not None:
            note("cyclicity", cyc, z)
        try:
            idx_k, mir_k = group.leaf_index(uk)
            idx_h, mir_h = group.leaf_index(hz)
            _, mir_z = group.leaf_index(z)
            if idx_k != n + k or mir_k != mir_z or idx_h != n or mir_h == mir_z:
                leaf_errors += 1
        except FundomError:
            leaf_errors += 1
        done += 1
    passed = done == n_samples and leaf_errors == 0 and all(v < tol for v in dev.values())
    return LawReport(done, dev, leaf_errors, excluded, passed, tol, seed, worst)

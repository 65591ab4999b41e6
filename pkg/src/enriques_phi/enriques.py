"""The fifteen involution classes, their glue lattices and period maps.

Ambient coordinates are 12 rational numbers ``(k1, k2, k3, k4 | y1..y8)``:
the first four are coordinates in the basis of K = U(2)+U(2) (Gram
``[[0,2],[2,0]]`` twice), the last eight are coordinates in the basis of
E8(2) (Gram ``-2 * Cartan``).  Thus ``<x, y> = 2(x1 y2 + x2 y1 + x3 y4 + x4 y3)
- 2 yE^T C yE'``.  Elements of the dual lattices simply have half-integral
coordinates.

A class is named by a 4-tuple of halves ``(x1, x2, x3, x4)`` in A_K; it is odd
when ``4(x1 x2 + x3 x4)`` is odd.  The glue lattice of the class is
``Z(d1 + d2) + K + E8(2)`` where ``d2`` is a fixed element of the dual of
E8(2) with ``d2^2 = -1`` (odd classes, half the highest root) or ``d2^2 = -2``
(even classes, half the sum of the first two simple roots).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from mpmath import mp

from .lattice import (
    E8_CARTAN,
    E8_HIGHEST_ROOT,
    QuadLattice,
    direct_sum,
    integer_kernel,
    isotropic_level,
    lattice_from_generators,
    short_vectors,
)
from .modular import GUARD_BITS, HalfPlanePoint

__all__ = [
    "GammaClass",
    "LambdaGamma",
    "PeriodPoint",
    "AMBIENT",
    "ODD_LEVEL1",
    "ODD_LEVEL2",
    "gamma_classes",
    "gamma_by_name",
    "parse_gamma",
    "build_lambda_gamma",
    "period_point",
    "odd_root_witness",
    "pair_ambient",
]

HALF = Fraction(1, 2)
QVec = tuple[Fraction, ...]

_K_GRAM = ((0, 2, 0, 0), (2, 0, 0, 0), (0, 0, 0, 2), (0, 0, 2, 0))
AMBIENT = direct_sum("K+E8(2)", _K_GRAM, [[-2 * x for x in r] for r in E8_CARTAN])

ODD_LEVEL1 = [(HALF, HALF, HALF, 0), (HALF, HALF, 0, 0), (HALF, HALF, 0, HALF), (0, HALF, HALF, HALF)]
ODD_LEVEL2 = [(0, 0, HALF, HALF), (HALF, 0, HALF, HALF)]

D2_ODD = tuple(Fraction(c, 2) for c in E8_HIGHEST_ROOT)
D2_EVEN = (HALF, HALF, 0, 0, 0, 0, 0, 0)

E_REF3 = (0, 0, 1, 0) + (0,) * 8
E_REF4 = (0, 0, 0, 1) + (0,) * 8
V = (1, 0, 0, 0) + (0,) * 8


def _q(x: Sequence) -> QVec:
    return tuple(Fraction(c) for c in x)


def pair_ambient(x: Sequence, y: Sequence) -> Fraction:
    """Bilinear form of K + E8(2) on rational ambient coordinates."""
    k = 2 * (
        Fraction(x[0]) * y[1] + Fraction(x[1]) * y[0] + Fraction(x[2]) * y[3] + Fraction(x[3]) * y[2]
    )
    e = Fraction(0)
    xe, ye = x[4:], y[4:]
    for i in range(8):
        if xe[i]:
            s = sum(E8_CARTAN[i][j] * Fraction(ye[j]) for j in range(8) if ye[j])
            e += Fraction(xe[i]) * s
    return k - 2 * e


def k_norm(x: Sequence) -> Fraction:
    return 4 * (Fraction(x[0]) * x[1] + Fraction(x[2]) * x[3])


def fmt_gamma(t: Sequence) -> str:
    return ",".join(str(Fraction(c)) for c in t)


def parse_gamma(text: str) -> tuple[Fraction, ...]:
    parts = [Fraction(p.strip()) % 1 for p in text.split(",")]
    if len(parts) != 4 or any(p not in (0, HALF) for p in parts):
        raise ValueError(f"not a class of halves: {text!r}")
    return tuple(parts)


@dataclass(frozen=True)
class GammaClass:
    """One nonzero class of A_K together with the glue data used to build its lattice."""

    name: tuple[Fraction, ...]
    d1: QVec
    d2: QVec
    parity: str
    level: int

    @property
    def label(self) -> str:
        return fmt_gamma(self.name)

    @property
    def is_odd(self) -> bool:
        return self.parity == "odd"

    @property
    def glue(self) -> QVec:
        return self.d1 + self.d2


def _make_class(name: Sequence) -> GammaClass:
    name = tuple(Fraction(c) % 1 for c in name)
    q = k_norm(name)
    odd = q % 2 == 1
    if odd:
        # pick the representative of the class with d1^2 = -1
        halves = [i for i, c in enumerate(name) if c == HALF]
        d1 = None
        for signs in itertools.product((1, -1), repeat=len(halves)):
            cand = list(name)
            for i, s in zip(halves, signs):
                cand[i] = HALF * s
            if k_norm(cand) == -1:
                d1 = tuple(cand)
                break
        assert d1 is not None
        d2 = _q(D2_ODD)
    else:
        d1 = tuple(name)
        d2 = _q(D2_EVEN)
    level = 1 if name[1] == HALF else 2
    return GammaClass(tuple(name), _q(d1), d2, "odd" if odd else "even", level)


@lru_cache(maxsize=1)
def gamma_classes() -> tuple[GammaClass, ...]:
    """Six odd classes (level 1 first, then level 2) followed by the nine even ones."""
    odd = [_make_class(n) for n in ODD_LEVEL1 + ODD_LEVEL2]
    even_names = [
        t
        for t in itertools.product((0, HALF), repeat=4)
        if any(t) and k_norm(t) % 2 == 0
    ]
    even = sorted((_make_class(n) for n in even_names), key=lambda g: (g.level, g.name))
    return tuple(odd + even)


def gamma_by_name(name: str | Sequence) -> GammaClass:
    key = parse_gamma(name) if isinstance(name, str) else tuple(Fraction(c) % 1 for c in name)
    for g in gamma_classes():
        if g.name == key:
            return g
    raise ValueError(f"no nonzero class {name!r} in A_K")


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaGamma:
    """Glue lattice of a class with its cusp frame and the rank-10 lattice M_gamma."""

    gamma: GammaClass
    lattice: QuadLattice
    v: QVec
    v_prime: QVec
    rho: QVec
    rho_prime: QVec
    m_gamma: QuadLattice
    frame_source: str
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def level(self) -> int:
        return self.gamma.level

    @property
    def sign(self) -> int:
        """The sign (-1)^(2/level) of the tube chart."""
        return 1 if self.level == 1 else -1

    def in_lattice(self, x: Sequence) -> bool:
        return self.lattice.contains_ambient(x)

    def in_m_gamma(self, x: Sequence) -> bool:
        return self.m_gamma.contains_ambient(x)

    def lattice_coords(self, x: Sequence) -> tuple[int, ...]:
        c = self.lattice.from_ambient(x)
        if any(a.denominator != 1 for a in c):
            raise ValueError("vector not in the glue lattice")
        return tuple(int(a) for a in c)

    def m_coords(self, x: Sequence) -> tuple[int, ...]:
        c = self.m_gamma.from_ambient(x)
        if any(a.denominator != 1 for a in c):
            raise ValueError("vector not in M_gamma")
        return tuple(int(a) for a in c)


def _glue_lattice(g: GammaClass) -> QuadLattice:
    gens = [g.glue] + [tuple(Fraction(int(i == j)) for j in range(12)) for i in range(12)]
    basis = lattice_from_generators(gens)
    return QuadLattice.from_basis(f"Lambda_{g.label}", basis, AMBIENT.gram)


@lru_cache(maxsize=8)
def _e8_buckets(coset: int, d2: QVec, max_norm: int) -> dict[int, tuple[QVec, ...]]:
    """Vectors of ``coset*d2 + E8(2)`` with ``-x^2 <= max_norm``, grouped by ``-x^2``."""
    shift = tuple(Fraction(coset) * c for c in d2)
    out: dict[int, list[QVec]] = {}
    for x in short_vectors(E8_CARTAN, Fraction(max_norm, 2), shift):
        x = tuple(Fraction(c) for c in x)
        n = -_e_pair(x, x)
        out.setdefault(int(n), []).append(x)
    return {n: tuple(sorted(v)) for n, v in out.items()}


def _e8_small(coset: int, d2: QVec, max_norm: int) -> tuple[QVec, ...]:
    buckets = _e8_buckets(coset, d2, max_norm)
    return tuple(x for n in sorted(buckets) for x in buckets[n])


def _e_pair(x: Sequence, y: Sequence) -> Fraction:
    return pair_ambient((0,) * 4 + tuple(x), (0,) * 4 + tuple(y))


def _k_parts(g: GammaClass, coset: int, kbox: int, k2: Fraction) -> list[QVec]:
    """K-parts in ``coset*d1 + K`` with second coordinate ``k2`` and entries bounded by ``kbox``."""
    ranges = []
    for i in range(4):
        base = Fraction(coset) * g.d1[i]
        if i == 1:
            ranges.append([k2] if (k2 - base).denominator == 1 else [])
            continue
        ranges.append([base + m for m in range(-kbox - 1, kbox + 2) if abs(base + m) <= kbox])
    parts = [tuple(k) for k in itertools.product(*ranges)]
    parts.sort(key=lambda k: (max(abs(t) for t in k), k_norm(k), k))
    return parts


def _isotropic_candidates(g: GammaClass, kbox: int, xnorm: int, k2: Fraction, perp: QVec | None = None):
    """Isotropic glue-lattice vectors with small coordinates, in a fixed order.

    The order is (max |K coordinate|, K norm, K coordinates, E8 coordinates);
    when ``perp`` is given only vectors orthogonal to it are produced.
    """
    parts = [(k, c) for c in (0, 1) for k in _k_parts(g, c, kbox, k2)]
    parts.sort(key=lambda kc: (max(abs(t) for t in kc[0]), k_norm(kc[0]), kc[0], kc[1]))
    for k, coset in parts:
        n = k_norm(k)
        if n < 0 or n > xnorm or n.denominator != 1:
            continue
        bucket = _e8_buckets(coset, g.d2, xnorm).get(int(n), ())
        if perp is None:
            for x in bucket:
                yield k + x
            continue
        target = -pair_ambient(k + (0,) * 8, perp)
        pairs = _bucket_pairings(coset, g.d2, xnorm, int(n), tuple(perp[4:]))
        for x, p in zip(bucket, pairs):
            if p == target:
                yield k + x


@lru_cache(maxsize=64)
def _bucket_pairings(coset: int, d2: QVec, xnorm: int, n: int, pe: QVec) -> tuple[Fraction, ...]:
    """Pairings of one norm bucket with a fixed E8(2) vector, done in integer arithmetic."""
    bucket = _e8_buckets(coset, d2, xnorm).get(n, ())
    if not bucket:
        return ()
    den = math.lcm(*(c.denominator for c in pe), 2)
    xs = np.array([[int(2 * c) for c in x] for x in bucket], dtype=np.int64)
    w = np.array(E8_CARTAN, dtype=np.int64) @ np.array([int(c * den) for c in pe], dtype=np.int64)
    vals = xs @ w
    return tuple(Fraction(-int(v), den) for v in vals)


def _primitive_in(L: QuadLattice, x: Sequence) -> bool:
    c = L.from_ambient(x)
    if any(a.denominator != 1 for a in c):
        return False
    return math.gcd(*[int(a) for a in c]) == 1


def _find_v_prime(g: GammaClass, L: QuadLattice) -> QVec:
    ell = g.level
    for x in _isotropic_candidates(g, 1, 8, Fraction(ell, 2)):
        if not _primitive_in(L, x):
            continue
        if isotropic_level(L, [int(c) for c in L.from_ambient(x)]) != ell:
            continue
        return x
    raise RuntimeError(f"no v' found for class {g.label}")


def _m_gamma(L: QuadLattice, v: QVec, vp: QVec) -> QuadLattice:
    rows = []
    for w in (v, vp):
        pv = [pair_ambient(b, w) for b in L.basis_in_ambient]
        assert all(p.denominator == 1 for p in pv)
        rows.append([int(p) for p in pv])
    ker = integer_kernel(rows, L.rank)
    basis = []
    for c in ker:
        vec = [Fraction(0)] * 12
        for ci, b in zip(c, L.basis_in_ambient):
            if ci:
                vec = [a + ci * bb for a, bb in zip(vec, b)]
        basis.append(tuple(vec))
    return QuadLattice.from_basis("M_gamma", basis, AMBIENT.gram)


def _find_frame(g: GammaClass, M: QuadLattice, v: QVec, vp: QVec) -> tuple[QVec, QVec]:
    ell = g.level
    s = 1 if ell == 1 else -1
    target = Fraction(2, ell)
    cands = [x for x in _isotropic_candidates(g, 2, 8, Fraction(0), perp=vp) if any(x)]
    for rho in cands:
        if not (s * pair_ambient(rho, E_REF3) > 0 and s * pair_ambient(rho, E_REF4) > 0):
            continue
        if not _primitive_in(M, rho):
            continue
        for rp in cands:
            if pair_ambient(rho, rp) == target and _primitive_in(M, rp):
                return rho, rp
    raise RuntimeError(f"frame search failed for class {g.label}")


@lru_cache(maxsize=None)
def build_lambda_gamma(g: GammaClass) -> LambdaGamma:
    L = _glue_lattice(g)
    v = _q(V)
    if g.is_odd and g.level == 2:
        case2 = g.name[0] == HALF
        vp = _q((0, 1, 1 if case2 else 0, 0) + (0,) * 8)
        w = _q((0, 0, -1, 0) + (0,) * 8)
        w_prime = _q(((HALF if case2 else 0), 0, HALF, -HALF) + (0,) * 8)
        r = _q((0,) * 4 + g.d2)
        rho = tuple(a + b + c for a, b, c in zip(w, w_prime, r))
        rho_prime = w
        M = _m_gamma(L, v, vp)
        source = "explicit"
        extra = {"w": w, "w_prime": w_prime, "r": r}
    else:
        vp = _find_v_prime(g, L)
        M = _m_gamma(L, v, vp)
        rho, rho_prime = _find_frame(g, M, v, vp)
        source = "search"
        extra = {}
    return LambdaGamma(g, L, v, vp, rho, rho_prime, M, source, extra)


# --------------------------------------------------------------------------
# period points


@dataclass(frozen=True)
class PeriodPoint:
    """Tube-domain point of M_gamma attached to (tau, tau')."""

    ambient: tuple[mpmath.mpc, ...]
    coords: tuple[mpmath.mpc, ...]
    im_norm: mpmath.mpf
    tau: HalfPlanePoint
    tau_prime: HalfPlanePoint


def period_vector(tau: mpmath.mpc, tau_prime: mpmath.mpc) -> list[mpmath.mpc]:
    """The normalised period (-tau tau'/2, 1/2, tau/2, tau'/2 | 0) with <eta, v> = 1."""
    return [-tau * tau_prime / 2, mpmath.mpf(1) / 2, tau / 2, tau_prime / 2] + [mpmath.mpc(0)] * 8


def _pair_complex(x: Sequence, y: Sequence) -> mpmath.mpc:
    k = 2 * (x[0] * y[1] + x[1] * y[0] + x[2] * y[3] + x[3] * y[2])
    e = 0
    for i in range(8):
        if x[4 + i]:
            e += x[4 + i] * sum(E8_CARTAN[i][j] * y[4 + j] for j in range(8) if y[4 + j])
    return k - 2 * e


def period_point(lg: LambdaGamma, tau: HalfPlanePoint, tau_prime: HalfPlanePoint) -> PeriodPoint:
    """z = s((eta, 0) - v'/l - (<eta, v'>/l) v), expressed in the basis of M_gamma."""
    prec = min(tau.prec, tau_prime.prec)
    with mp.workprec(prec + GUARD_BITS):
        eta = period_vector(tau.value, tau_prime.value)
        ell = lg.level
        s = lg.sign
        vp = [mpmath.mpf(c.numerator) / c.denominator for c in lg.v_prime]
        t = _pair_complex(eta, vp) / ell
        z = [s * (e - a / ell - t * (1 if i == 0 else 0)) for i, (e, a) in enumerate(zip(eta, vp))]
        # coordinates in the M_gamma basis through the Gram matrix
        B = lg.m_gamma.basis_in_ambient
        rhs = [_pair_complex(z, [mpmath.mpf(c.numerator) / c.denominator for c in b]) for b in B]
        ginv = lg.m_gamma.gram_inverse
        coords = [
            sum(rhs[i] * (mpmath.mpf(ginv[i][j].numerator) / ginv[i][j].denominator) for i in range(10))
            for j in range(10)
        ]
        im = [c.imag for c in z]
        im_norm = _pair_complex(im, im).real
        if im_norm <= 0:
            raise ValueError("imaginary part is not in the positive cone")
        rho = [mpmath.mpf(c.numerator) / c.denominator for c in lg.rho]
        if lg.level == 2 and _pair_complex(im, rho).real <= 0:
            raise ValueError("imaginary part is in the wrong cone component")
    return PeriodPoint(tuple(z), tuple(coords), im_norm, tau, tau_prime)


# --------------------------------------------------------------------------


def odd_root_witness(lg: LambdaGamma) -> tuple[int, ...] | None:
    """A root d1' + d2' with both halves of norm -1 (odd classes), else None.

    For even classes the absence of roots with negative K-part is checked:
    the coset ``d2 + E8(2)`` has minimum -2 so a root there has
    ``delta_K^2 >= 0``, and ``K`` itself has no vectors of norm -2.
    """
    g = lg.gamma
    if g.is_odd:
        delta = g.d1 + g.d2
        assert k_norm(g.d1) == -1
        assert pair_ambient((0,) * 4 + g.d2, (0,) * 4 + g.d2) == -1
        assert pair_ambient(delta, delta) == -2
        return lg.lattice_coords(delta)
    # even classes: exhaustive check on the two cosets
    for coset in (0, 1):
        for x in _e8_small(coset, g.d2, 2):
            xn = pair_ambient((0,) * 4 + x, (0,) * 4 + x)
            k_needed = -2 - xn
            if k_needed < 0:
                # only x = 0 in the trivial coset; K has norms in 4Z, so -2 is impossible
                assert coset == 0 and not any(x)
                assert k_needed % 4 != 0
    return None

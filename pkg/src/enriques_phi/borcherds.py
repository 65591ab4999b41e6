"""Borcherds products at the level-1 and level-2 cusps and their restrictions.

Every product evaluated here is reduced to the same shape::

    const * P^a0 Q^b0 * prod_{(a, b, s)} F(s * P^a Q^b)^E(a, b, s)

with ``P = exp(pi i t1)``, ``Q = exp(pi i t2)``, ``s = +-1`` and
``F(u) = 1 - u`` at level 2 or ``F(u) = (1 - u)/(1 + u)`` at level 1.  The
exponent map ``E`` is computed exactly by grouping the lattice vectors with
the same monomial: the E8(2) part only enters through its norm and through
its pairings with a handful of fixed vectors, so each coset of E8(2) is
tabulated once as counts over those data.  The same exponent map feeds the
numerical evaluation and the exact q-expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
import numpy as np
from mpmath import mp

from .enriques import LambdaGamma, period_point
from .lattice import E8_CARTAN, short_vectors_array
from .modular import DEFAULT_PREC, GUARD_BITS, ComplexAP, HalfPlanePoint
from .qseries import LaurentSeries2, c_coeffs, series_mul

__all__ = [
    "ProductParams",
    "PhiValue",
    "ExponentMap",
    "gamma_exponents",
    "phi_gamma_eval",
    "phi_gamma_leading_qexp",
    "phi1_eval",
    "phi2_eval",
    "phi_kprime_level2",
    "phi_kprime_level1",
    "kprime_leading_qexp",
    "petersson_norm",
    "automorphy_defect",
    "mobius",
]


# --------------------------------------------------------------------------
# parameters and results


@dataclass(frozen=True)
class ProductParams:
    """Truncation data for a product evaluation.

    ``height_cutoff`` is the largest ``<lambda, Im z>`` kept; ``None`` picks the
    smallest integer cutoff whose tail bound is below ``tail_target``.
    """

    height_cutoff: float | None = None
    prec: int = DEFAULT_PREC
    tail_target: float = 1e-12
    max_height: float = 80.0


@dataclass(frozen=True)
class PhiValue:
    """A product value with the bound on the neglected log-magnitude."""

    value: ComplexAP
    tail_bound: float
    terms_used: int
    height: float
    vanishes: bool = False

    def __complex__(self) -> complex:
        return complex(self.value.value)


# --------------------------------------------------------------------------
# coefficient tables


@lru_cache(maxsize=64)
def _c_list(m_max: int) -> tuple[int, ...]:
    """c(-1), ..., c(m_max) as a tuple indexed by ``m + 1``."""
    m_max = max(m_max, 8)
    d = c_coeffs(m_max)
    return tuple(d[m] for m in range(-1, m_max + 1))


def c_of(m: int) -> int:
    if m < -1:
        return 0
    table = _c_list(_round_up(m))
    return table[m + 1]


def _round_up(m: int) -> int:
    size = 16
    while size < m:
        size *= 2
    return size


@lru_cache(maxsize=None)
def _sigma3(n: int) -> int:
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def _shell_bound(n: int) -> int:
    """Upper bound for the number of vectors of norm ``-n`` in any coset of E8(2) in its dual."""
    return 1 if n == 0 else 240 * _sigma3(n)


def _e8_2_count(n: int) -> int:
    """Exact number of vectors of E8(2) with ``-x^2 = n``."""
    if n == 0:
        return 1
    if n % 4:
        return 0
    return 240 * _sigma3(n // 4)


# --------------------------------------------------------------------------
# E8 coset tables


@lru_cache(maxsize=32)
def _e8_table(shift2: tuple[int, ...], probes2: tuple[tuple[int, ...], ...], n_max: int):
    """Counts of ``x in shift + E8(2)`` grouped by ``(-x^2, 2<x, g_1>, ..., 2<x, g_k>)``.

    Vectors are in the basis of E8(2); ``shift2`` and ``probes2`` are twice
    the shift and probe vectors (so integral).  Returns ``(keys, counts)``
    sorted by norm, where ``keys`` is an int64 array with columns
    ``(n, p_1, ..., p_k)``.
    """
    shift = [Fraction(s, 2) for s in shift2]
    t, _, _ = short_vectors_array(E8_CARTAN, Fraction(n_max, 2), shift)
    C = np.array(E8_CARTAN, dtype=np.int64)
    X2 = 2 * t + np.array(shift2, dtype=np.int64)
    n = ((X2 @ C) * X2).sum(axis=1) // 2  # -x^2 = 2 x^T C x = X2^T C X2 / 2
    cols = [n]
    for g in probes2:
        w = C @ np.array(g, dtype=np.int64)
        cols.append(-(X2 @ w))  # 2<x,g> = -4 x^T C g = -X2^T C G2
    # pack the columns into one integer key so grouping is a 1-d sort
    lows = [int(c.min()) for c in cols]
    spans = [int(c.max()) - lo + 1 for c, lo in zip(cols, lows)]
    key = np.zeros(len(n), dtype=np.int64)
    for c, lo, sp in zip(cols, lows, spans):
        key = key * sp + (c - lo)
    uniq, counts = np.unique(key, return_counts=True)
    out = np.empty((len(uniq), len(cols)), dtype=np.int64)
    rest = uniq.copy()
    for i in range(len(cols) - 1, -1, -1):
        out[:, i] = rest % spans[i] + lows[i]
        rest //= spans[i]
    return out, counts


# simple roots of E8 (Bourbaki numbering) in the even coordinate system
_E8_STD = np.array(
    [
        [0.5, -0.5, -0.5, -0.5, -0.5, -0.5, -0.5, 0.5],
        [1, 1, 0, 0, 0, 0, 0, 0],
        [-1, 1, 0, 0, 0, 0, 0, 0],
        [0, -1, 1, 0, 0, 0, 0, 0],
        [0, 0, -1, 1, 0, 0, 0, 0],
        [0, 0, 0, -1, 1, 0, 0, 0],
        [0, 0, 0, 0, -1, 1, 0, 0],
        [0, 0, 0, 0, 0, -1, 1, 0],
    ]
)


@lru_cache(maxsize=32)
def _e8_residue_table(shift2: tuple[int, ...], g2: tuple[int, ...], modulus: int, n_max: int) -> np.ndarray:
    """Counts of ``x in shift + E8(2)`` by ``(-x^2, 2<x, g> mod modulus)``, for ``-x^2 <= n_max``.

    In the even coordinate system E8 is the set of vectors in Z^8 or
    (Z + 1/2)^8 with even coordinate sum, so with ``u = 4 x_std`` the theta
    series with a character factors over coordinates.  Here ``-x^2 = |u|^2/8``
    and ``2<x, g> = -(u . 4 g_std)/4``.
    """
    u0 = np.rint(2 * (np.array(shift2) @ _E8_STD)).astype(np.int64)
    gq = np.rint(2 * (np.array(g2) @ _E8_STD)).astype(np.int64)
    top = 8 * n_max
    mod4 = 4 * modulus
    total = np.zeros((top + 1, mod4), dtype=np.int64)
    tmax = int(math.isqrt(top)) // 4 + 2
    for fam in (0, 1):
        # acc[N, R, parity of sum t]
        acc = np.zeros((top + 1, mod4, 2), dtype=np.int64)
        acc[0, 0, 0] = 1
        for j in range(8):
            nxt = np.zeros_like(acc)
            for t in range(-tmax, tmax + 1):
                u = int(u0[j]) + 2 * fam + 4 * t
                sq = u * u
                if sq > top:
                    continue
                r = (-u * int(gq[j])) % mod4
                par = t % 2
                src = acc[: top + 1 - sq]
                shifted = np.roll(src, r, axis=1)
                if par:
                    shifted = shifted[:, :, ::-1]
                nxt[sq:] += shifted
            acc = nxt
        total += acc[:, :, 0]
    rows = total[::8]
    assert not total[np.arange(top + 1) % 8 != 0].any()
    out = np.zeros((n_max + 1, modulus), dtype=np.int64)
    for R in range(mod4):
        if rows[:, R].any():
            assert R % 4 == 0
            out[:, (R // 4) % modulus] += rows[:, R]
    return out


def _table_for(shift2, probes2, n_needed: int):
    n_max = 16
    while n_max < n_needed:
        n_max *= 2
    return _e8_table(shift2, probes2, n_max), n_max


# --------------------------------------------------------------------------
# exponent maps


@dataclass
class ExponentMap:
    """``const * P^a0 Q^b0 * prod F(s P^a Q^b)^E`` in the notation of the module docstring."""

    kind: int  # 2: F(u) = 1 - u ; 1: F(u) = (1 - u)/(1 + u)
    const: int
    a0: int
    b0: int
    factors: dict[tuple[int, int, int], int] = field(default_factory=dict)
    vectors: int = 0

    def add(self, a: int, b: int, s: int, e: int, count: int = 0) -> None:
        if e:
            key = (a, b, s)
            new = self.factors.get(key, 0) + e
            if new:
                self.factors[key] = new
            else:
                self.factors.pop(key, None)
        self.vectors += count


class _GammaEngine:
    """Exponent-map builder for one glue lattice, with per-bin caching."""

    def __init__(self, lg: LambdaGamma):
        self.lg = lg
        g = lg.gamma
        self.ell = lg.level
        self.s = lg.sign
        self.d1 = g.d1
        vp, rho, rp = lg.v_prime, lg.rho, lg.rho_prime
        self.vpK, self.rhoK, self.rpK = vp[:4], rho[:4], rp[:4]
        probes = (vp[4:], rho[4:], rp[4:])
        self.probes2 = tuple(tuple(int(2 * c) for c in p) for p in probes)
        assert all(2 * c == int(2 * c) for p in probes for c in p)
        self.cosets = [0] + ([1] if g.d1[1] % 1 == 0 else [])
        self.shift2 = {c: tuple(int(2 * c * x) for x in g.d2) for c in self.cosets}
        self.cache: dict[tuple[int, int], list[tuple[int, int, int, int]]] = {}
        # frame bounds for the part of the product below height zero
        if self.ell == 2:
            p3, p4 = abs(Fraction(rho[2])), abs(Fraction(rho[3]))
            assert rho[2] < 0 and rho[3] < 0
            ra = max(2 * p3, math.sqrt(2 * p3 / p4), Fraction(1))
            rb = max(2 * p4, math.sqrt(2 * p4 / p3), Fraction(1))
            self.k3_low = -2 * math.ceil(ra) - 1
            self.k4_low = -2 * math.ceil(rb) - 1
        else:
            self.k3_low = 0
            self.k4_low = 0

    def residue_ok(self, c: int, K3: int, K4: int) -> bool:
        return (K3 - 2 * c * self.d1[2]) % 2 == 0 and (K4 - 2 * c * self.d1[3]) % 2 == 0

    def cosets_for(self, K3: int, K4: int) -> list[int]:
        return [c for c in self.cosets if self.residue_ok(c, K3, K4)]

    def bin_terms(self, A: int, B: int, enumerate_e8: bool = False) -> list[tuple[int, int, int]]:
        """Contributions of the bin with monomial P^B Q^A (A = s*2k3, B = s*2k4).

        Returns a list of ``(sign-phase, exponent, vectors)`` grouped per phase.
        """
        key = (A, B)
        if key in self.cache and not enumerate_e8:
            return self.cache[key]
        s, ell = self.s, self.ell
        K3, K4 = s * A, s * B
        out: dict[int, list[int]] = {}
        m = K3 * K4  # 4 k3 k4
        n_lim = m + 2 if ell == 2 else m
        if ell == 1 and not enumerate_e8:
            res = self._level1_terms(K3, K4)
            self.cache[key] = res
            return res
        for c in self.cosets_for(K3, K4):
            if n_lim < 0:
                continue
            (keys, counts), _ = _table_for(self.shift2[c], self.probes2, n_lim)
            sel = keys[:, 0] <= n_lim
            if not sel.any():
                continue
            kk, cnt = keys[sel], counts[sel]
            n, pv, pr, prp = kk[:, 0], kk[:, 1], kk[:, 2], kk[:, 3]
            # 2*ell*k1 = -(2(K3 v'4 + K4 v'3) + 2<x, v'_E>)
            base_v = 2 * (K3 * self.vpK[3] + K4 * self.vpK[2])
            assert base_v.denominator == 1
            k1x = -(int(base_v) + pv)  # = 2*ell*k1
            c1 = 2 * ell * c * self.d1[0]
            assert c1.denominator == 1
            valid = (k1x - int(c1)) % (2 * ell) == 0
            # 2<lambda, rho> and 2<lambda, rho'>
            br = 2 * (K3 * self.rhoK[3] + K4 * self.rhoK[2])
            brp = 2 * (K3 * self.rpK[3] + K4 * self.rpK[2])
            T = int(br) + pr
            Tp = int(brp) + prp
            lam2 = m - n
            assert not (lam2[valid] % 2).any(), "odd norm in an even lattice"
            if ell == 2:
                keep = valid & (lam2 >= -2) & ((T > 0) | ((T == 0) & (lam2 == 0) & (Tp > 0)))
                assert not ((T[keep] - Tp[keep]) % 2).any()
                sign = 1 - 2 * (((T - Tp) // 2) % 2)
                assert not (k1x[keep] % ell).any()
                phase = 1 - 2 * ((k1x // ell) % 2)  # e(s*k1) = (-1)^(2 k1)
            else:
                keep = valid & (lam2 >= 0) & ((K3 > 0) or (K4 > 0)) & (K3 >= 0) & (K4 >= 0)
                sign = np.ones_like(n)
                assert not (k1x[keep] % 2).any()
                phase = 1 - 2 * ((k1x // 2) % 2)  # e^{pi i k1} = (-1)^k1
            if not keep.any():
                continue
            half = lam2[keep] // 2
            ctab = _c_list(_round_up(int(half.max())))
            for h, sg, ph, ct in zip(half.tolist(), sign[keep].tolist(), phase[keep].tolist(), cnt[keep].tolist()):
                slot = out.setdefault(ph, [0, 0])
                slot[0] += sg * ctab[h + 1] * ct
                slot[1] += ct
        res = [(ph, e, v) for ph, (e, v) in sorted(out.items())]
        if not enumerate_e8:
            self.cache[key] = res
        return res

    def _level1_terms(self, K3: int, K4: int) -> list[tuple[int, int, int]]:
        """Level-1 bins need only the norm of x and 2<x, v'_E> mod 4, read from a theta table."""
        if K3 < 0 or K4 < 0 or (K3 == 0 and K4 == 0) or K3 % 2 or K4 % 2:
            return []
        m = K3 * K4
        n_max = 16
        while n_max < m:
            n_max *= 2
        table = _e8_residue_table(self.shift2[0], self.probes2[0], 4, n_max)
        base_v = 2 * (K3 * self.vpK[3] + K4 * self.vpK[2])
        assert base_v.denominator == 1
        base_v = int(base_v)
        ctab = _c_list(_round_up(m // 2 + 1))
        out: dict[int, list[int]] = {}
        for n in range(0, m + 1):
            if (m - n) % 2:
                continue
            row = table[n]
            ch = ctab[(m - n) // 2 + 1]
            for r in range(4):
                cnt = int(row[r])
                if not cnt:
                    continue
                k1x = -(base_v + r)  # 2 k1 modulo 4
                if k1x % 2:
                    continue
                ph = 1 - 2 * ((k1x // 2) % 2)
                slot = out.setdefault(ph, [0, 0])
                slot[0] += ch * cnt
                slot[1] += cnt
        return [(ph, e, v) for ph, (e, v) in sorted(out.items())]

    def prefactor(self) -> tuple[int, int, int]:
        """``(const, a0, b0)`` with the Weyl-vector monomial ``P^a0 Q^b0``."""
        if self.ell == 1:
            return 1, 0, 0
        s = self.s
        rho = self.lg.rho
        e1 = s * rho[0]
        assert (2 * e1).denominator == 1
        const = 256 * (1 if int(2 * e1) % 2 == 0 else -1)
        a0, b0 = 2 * s * rho[3], 2 * s * rho[2]
        return const, int(a0), int(b0)

    def monomial(self, A: int, B: int) -> tuple[int, int]:
        """Exponents of (P, Q) for the bin: level 2 -> (B, A); level 1 -> (B/2, A/2)."""
        if self.ell == 2:
            return B, A
        return B // 2, A // 2

    def bins_in(self, pred: Callable[[int, int], bool], a_max: int, b_max: int):
        step = 1
        for A in range(self.k3_low, a_max + 1, step):
            for B in range(self.k4_low, b_max + 1, step):
                if self.ell == 2 and A * B < -2:
                    continue
                if self.ell == 1 and (A % 2 or B % 2 or (A == 0 and B == 0)):
                    continue
                if not self.cosets_for(self.s * A, self.s * B):
                    continue
                if pred(A, B):
                    yield A, B


_ENGINES: dict[str, _GammaEngine] = {}


def _engine(lg: LambdaGamma) -> _GammaEngine:
    key = lg.gamma.name
    eng = _ENGINES.get(key)
    if eng is None or eng.lg is not lg:
        eng = _ENGINES[key] = _GammaEngine(lg)
    return eng


def gamma_exponents(lg: LambdaGamma, bins: Sequence[tuple[int, int]]) -> ExponentMap:
    eng = _engine(lg)
    const, a0, b0 = eng.prefactor()
    em = ExponentMap(2 if eng.ell == 2 else 1, const, a0, b0)
    for A, B in bins:
        a, b = eng.monomial(A, B)
        for ph, e, v in eng.bin_terms(A, B):
            em.add(a, b, ph, e, v)
    return em


# --------------------------------------------------------------------------
# numerical evaluation


def _evaluate(em: ExponentMap, t1: mpmath.mpc, t2: mpmath.mpc) -> tuple[mpmath.mpc, bool]:
    """Evaluate an exponent map with ``P = e^{pi i t1}``, ``Q = e^{pi i t2}`` at the working precision."""
    logsum = mpmath.mpc(0)
    comp = mpmath.mpc(0)  # Kahan compensation
    zero = False
    tiny = mpmath.mpf(2) ** (-mp.prec + 8)
    for (a, b, s), e in sorted(em.factors.items()):
        u = s * mpmath.expj(mp.pi * (a * t1 + b * t2))
        f = 1 - u
        if abs(f) <= tiny:
            if e > 0:
                zero = True
                continue
            raise ZeroDivisionError("product has a pole at this point")
        term = e * mpmath.log(f)
        if em.kind == 1:
            term -= e * mpmath.log(1 + u)
        y = term - comp
        t = logsum + y
        comp = (t - logsum) - y
        logsum = t
    if zero:
        return mpmath.mpc(0), True
    pref = em.const * mpmath.expj(mp.pi * (em.a0 * t1 + em.b0 * t2))
    return pref * mpmath.exp(logsum), False


def _tail(
    level: int,
    heights: Callable[[int, int], float],
    bins_from: Callable[[float, float], list[tuple[int, int, int]]],
    H: float,
) -> float:
    """Bound on the log-magnitude neglected beyond height ``H``.

    ``bins_from(H, H2)`` lists ``(m, multiplicity, bin)`` for the bins with
    height in ``(H, H2]``, where ``m`` bounds ``lambda^2 + n`` (the U-part norm)
    and the multiplicity counts E8 cosets.  Shells are summed until they stop
    contributing.
    """
    total = 0.0
    width = 1.0
    lo = H
    prev = math.inf
    for _ in range(400):
        hi = lo + width
        shell = 0.0
        for m, mult, h in bins_from(lo, hi):
            u = math.exp(-2 * math.pi * h) if level == 2 else math.exp(-math.pi * h)
            if u >= 1:
                return math.inf
            f = u / (1 - u) * (2 if level == 1 else 1)
            shell += mult * _cb(m, level) * f
        total += shell
        if shell > prev and lo > H + 6 * width:
            return math.inf  # shells grow: the product does not converge at this point
        if shell < 1e-3 * total and shell <= prev and total > 0:
            return total * 1.01
        if shell == 0.0 and lo > H + 50:
            return total
        prev = shell
        lo = hi
    return math.inf


@lru_cache(maxsize=None)
def _cb(m: int, level: int) -> float:
    """Bound on ``sum |c(lambda^2/2)|`` over the E8(2)-parts of one bin with U-norm ``m``."""
    top = m + 2 if level == 2 else m
    tot = 0.0
    for n in range(0, top + 1):
        if (m - n) % 2:
            continue
        tot += _shell_bound(n) * abs(c_of((m - n) // 2))
    return tot


def _choose_height(params: ProductParams, tail_at: Callable[[float], float]) -> tuple[float, float]:
    if params.height_cutoff is not None:
        H = float(params.height_cutoff)
        return H, tail_at(H)
    H = 1.0
    while H <= params.max_height:
        t = tail_at(H)
        if math.isinf(t):
            raise ArithmeticError(
                "the product does not converge at this point: move it further into the cone"
            )
        if t <= params.tail_target:
            return H, t
        H += 1.0
    raise ArithmeticError(
        "tail target unreachable: move the point further into the cone or raise max_height"
    )


def _gamma_heights(eng: _GammaEngine, y: float, yp: float):
    if eng.ell == 2:
        return lambda A, B: (A * yp + B * y) / 2
    return lambda A, B: (A * yp + B * y) / 2


def _gamma_bins_between(eng: _GammaEngine, y: float, yp: float, lo: float, hi: float):
    h = _gamma_heights(eng, y, yp)
    a_max = int(math.floor(2 * hi / yp - eng.k4_low * y / yp)) + 2
    b_max = int(math.floor(2 * hi / y - eng.k3_low * yp / y)) + 2
    out = []
    for A, B in eng.bins_in(lambda A, B: lo < h(A, B) <= hi, a_max, b_max):
        m = A * B
        out.append((m, len(eng.cosets_for(eng.s * A, eng.s * B)), h(A, B)))
    return out


def phi_gamma_eval(
    lg: LambdaGamma,
    tau: HalfPlanePoint,
    tau_prime: HalfPlanePoint,
    params: ProductParams | None = None,
) -> PhiValue:
    """The product of the glue lattice evaluated at the period point of (tau, tau')."""
    params = params or ProductParams()
    tau = HalfPlanePoint.from_value(tau, params.prec) if not isinstance(tau, HalfPlanePoint) else tau
    tau_prime = (
        HalfPlanePoint.from_value(tau_prime, params.prec)
        if not isinstance(tau_prime, HalfPlanePoint)
        else tau_prime
    )
    period_point(lg, tau, tau_prime)  # validates the cone condition
    eng = _engine(lg)
    y, yp = float(tau.im), float(tau_prime.im)

    def tail_at(H: float) -> float:
        return _tail(eng.ell, None, lambda lo, hi: _gamma_bins_between(eng, y, yp, lo, hi), H)

    H, tail = _choose_height(params, tail_at)
    h = _gamma_heights(eng, y, yp)
    a_max = int(math.floor(2 * H / yp - eng.k4_low * y / yp)) + 2
    b_max = int(math.floor(2 * H / y - eng.k3_low * yp / y)) + 2
    bins = list(eng.bins_in(lambda A, B: h(A, B) <= H, a_max, b_max))
    em = gamma_exponents(lg, bins)
    prec = min(tau.prec, tau_prime.prec)
    with mp.workprec(prec + GUARD_BITS):
        value, zero = _evaluate(em, tau.value, tau_prime.value)
    return PhiValue(ComplexAP(value, prec), tail, em.vectors, H, zero)


# --------------------------------------------------------------------------
# exact leading expansion


def _factor_series(a: int, b: int, s: int, e: int, kind: int, order: int) -> LaurentSeries2:
    """``F(s P^a Q^b)^e`` as a series truncated at total degree ``order`` (a + b > 0)."""
    deg = a + b
    terms: dict[tuple[int, int], Fraction] = {}
    if kind == 2:
        coeff = 1
        k = 0
        while k * deg <= order:
            terms[(k * a, k * b)] = Fraction(coeff * (-s) ** k)
            coeff = coeff * (e - k) // (k + 1)
            k += 1
            if e >= 0 and k > e:
                break
        return LaurentSeries2.polynomial(terms, order)
    one_minus = _factor_series(a, b, s, e, 2, order)
    one_plus = _factor_series(a, b, -s, -e, 2, order)
    return series_mul(one_minus, one_plus).truncate(order)


def _exact_factor(a: int, b: int, s: int, e: int, kind: int) -> LaurentSeries2:
    if e < 0:
        raise ArithmeticError("a factor with non-positive degree has a negative exponent")
    terms = {(0, 0): Fraction(1)}
    terms[(a, b)] = terms.get((a, b), Fraction(0)) - s
    base = LaurentSeries2(terms, None, (min(a, 0), min(b, 0)))
    if kind == 1:
        raise ArithmeticError("level-1 products have no factors of non-positive degree")
    out = LaurentSeries2.one()
    for _ in range(e):
        out = series_mul(out, base)
    return out


def expand_exponent_map(em: ExponentMap, order: int, rest: Callable[[int], ExponentMap]) -> LaurentSeries2:
    """Exact expansion to total degree ``order`` (in half-units of p and q).

    ``em`` must already contain every factor of non-positive degree; ``rest(D)``
    returns the factors with ``1 <= degree <= D``.
    """
    lead = LaurentSeries2({(em.a0, em.b0): Fraction(em.const)}, None, (min(em.a0, 0), min(em.b0, 0)))
    exact = lead
    for (a, b, s), e in sorted(em.factors.items()):
        if a + b <= 0:
            exact = series_mul(exact, _exact_factor(a, b, s, e, em.kind))
    low = exact.valuation()
    if low is None:
        return LaurentSeries2.zero(order)
    D = order - low
    if D < 0:
        return LaurentSeries2({}, order, (min(exact.lower[0], 0), min(exact.lower[1], 0)))
    prod = LaurentSeries2.one(D)
    pos = rest(D)
    for (a, b, s), e in sorted(pos.factors.items()):
        if 0 < a + b <= D:
            prod = series_mul(prod, _factor_series(a, b, s, e, pos.kind, D)).truncate(D)
    out = series_mul(exact, prod)
    return out.truncate(order)


def phi_gamma_leading_qexp(lg: LambdaGamma, order: int) -> LaurentSeries2:
    """Exact expansion of the product in P = p^(1/2), Q = q^(1/2) up to total degree ``order``."""
    eng = _engine(lg)

    def bins_with_degree(pred):
        # degree of the monomial is A + B (level 2) or (A + B)/2 (level 1)
        top = 4 * (order + 8) + 8
        return list(eng.bins_in(pred, top, top))

    if eng.ell == 2:
        nonpos = bins_with_degree(lambda A, B: A + B <= 0)
    else:
        nonpos = []
    em = gamma_exponents(lg, nonpos)

    def rest(D: int) -> ExponentMap:
        if eng.ell == 2:
            bins = [(A, B) for A, B in bins_with_degree(lambda A, B: 0 < A + B <= D)]
        else:
            bins = [(A, B) for A, B in bins_with_degree(lambda A, B: 0 < (A + B) // 2 <= D)]
        return gamma_exponents(lg, bins)

    return expand_exponent_map(em, order, rest)


# --------------------------------------------------------------------------
# the two cusp charts of Lambda


def _split_w(w: Sequence) -> tuple[mpmath.mpc, mpmath.mpc, list[mpmath.mpc]]:
    if len(w) != 10:
        raise ValueError("a tube-domain point has 10 coordinates (e, f, then 8 in the E8(2) basis)")
    vals = [mpmath.mpc(x) for x in w]
    return vals[0], vals[1], vals[2:]


def _e8_pair_complex(xs: np.ndarray, wE: list[complex]) -> np.ndarray:
    """<x, w_E> in E8(2) for integer rows ``xs`` and a complex vector ``wE``."""
    C = np.array(E8_CARTAN, dtype=float)
    wr = C @ np.array([complex(c).real for c in wE])
    wi = C @ np.array([complex(c).imag for c in wE])
    return -2 * (xs @ wr) - 2j * (xs @ wi)


@lru_cache(maxsize=8)
def _e8_2_vectors(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    t, _, _ = short_vectors_array(E8_CARTAN, Fraction(n_max, 2))
    C = np.array(E8_CARTAN, dtype=np.int64)
    n = 2 * np.einsum("ij,jk,ik->i", t, C, t)
    order = np.argsort(n, kind="stable")
    return t[order], n[order]


def _kprime_bins(level: int, H: float, y1: float, y2: float, lo: float = -math.inf):
    """Bins ``(a, b)`` of lambda = a e + b f (+ x) with ``lo < height <= H``.

    Level 2 (lattice U): height ``a*y2 + b*y1``, with ``b > 0`` or the ray
    ``b = 0 < a``, and ``ab >= -1``.  Level 1 (lattice U(2)): height
    ``2(a*y2 + b*y1)`` with ``a, b >= 0`` not both zero.
    """
    out = []
    if level == 2:
        b_max = int(math.floor((H + y2) / y1)) + 1
        for b in range(0, b_max + 1):
            a_min = 1 if b == 0 else (-1 if b == 1 else 0)
            a = a_min
            while True:
                h = a * y2 + b * y1
                if h > H:
                    break
                if h > lo:
                    out.append((a, b, h))
                a += 1
    else:
        b_max = int(math.floor(H / (2 * y1))) + 1
        for b in range(0, b_max + 1):
            a = 0 if b > 0 else 1
            while True:
                h = 2 * (a * y2 + b * y1)
                if h > H:
                    break
                if h > lo:
                    out.append((a, b, h))
                a += 1
    return out


def _kprime_map(level: int, bins) -> ExponentMap:
    """Exponent map for the restriction to w_E = 0, with monomials in the units of ``_evaluate``.

    Level 2: ``q1 = e^{2 pi i z1} = P^2`` so ``q2^a q1^b = P^{2b} Q^{2a}``.
    Level 1: ``e^{pi i <lambda, w>} = q2'^a q1'^b`` likewise.
    """
    if level == 2:
        em = ExponentMap(2, 256, 0, 2)
    else:
        em = ExponentMap(1, 1, 0, 0)
    for a, b, _ in bins:
        if level == 2:
            if b == 0:
                e = 8 * (-1) ** a
                count = 1
            else:
                sign = (-1) ** (b - a)
                e = 0
                count = 0
                k = 0
                while a * b - 2 * k >= -1:
                    cnt = _e8_2_count(4 * k)
                    e += cnt * c_of(a * b - 2 * k)
                    count += cnt
                    k += 1
                e *= sign
        else:
            e = 0
            count = 0
            k = 0
            while 2 * a * b - 2 * k >= 0:
                cnt = _e8_2_count(4 * k)
                e += cnt * c_of(2 * a * b - 2 * k)
                count += cnt
                k += 1
        em.add(2 * b, 2 * a, 1, e, count)
    return em


def _kprime_tail(level: int, y1: float, y2: float, H: float) -> float:
    def bins_from(lo, hi):
        out = []
        for a, b, h in _kprime_bins(level, hi, y1, y2, lo):
            m = 2 * a * b if level == 2 else 4 * a * b
            out.append((m, 1, h))
        return out

    # the level-2 bound uses 2ab as the U-norm with the same shell counts
    return _tail(level, None, bins_from, H)


def _kprime_eval(level: int, z1, z2, params: ProductParams) -> PhiValue:
    z1 = HalfPlanePoint.from_value(z1, params.prec) if not isinstance(z1, HalfPlanePoint) else z1
    z2 = HalfPlanePoint.from_value(z2, params.prec) if not isinstance(z2, HalfPlanePoint) else z2
    y1, y2 = float(z1.im), float(z2.im)
    H, tail = _choose_height(params, lambda H: _kprime_tail(level, y1, y2, H))
    em = _kprime_map(level, _kprime_bins(level, H, y1, y2))
    prec = min(z1.prec, z2.prec)
    with mp.workprec(prec + GUARD_BITS):
        value, zero = _evaluate(em, z1.value, z2.value)
    return PhiValue(ComplexAP(value, prec), tail, em.vectors, H, zero)


def phi_kprime_level2(z1, z2, params: ProductParams | None = None) -> PhiValue:
    """The level-2 product at ``w = z1 e1 + z2 f1`` (zero E8(2) part)."""
    return _kprime_eval(2, z1, z2, params or ProductParams())


def phi_kprime_level1(w1, w2, params: ProductParams | None = None) -> PhiValue:
    """The level-1 product at ``w = w1 e2 + w2 f2`` (zero E8(2) part)."""
    return _kprime_eval(1, w1, w2, params or ProductParams())


def _generic_eval(level: int, w: Sequence, params: ProductParams) -> PhiValue:
    """Evaluation with a nonzero E8(2) part, summed vector by vector in double precision."""
    we, wf, wE = _split_w(w)
    y_e, y_f = float(we.imag), float(wf.imag)
    wEc = [complex(c) for c in wE]
    imE = np.array([c.imag for c in wEc])
    C = np.array(E8_CARTAN, dtype=float)
    nE = float(2 * imE @ C @ imE)  # -(Im w_E)^2 >= 0
    if level == 2:
        y1, y2 = y_e, y_f  # <a e1 + b f1, w> = a w_f + b w_e
        im_norm = 2 * y_e * y_f - nE
    else:
        y1, y2 = y_e, y_f
        im_norm = 4 * y_e * y_f - nE
    if im_norm <= 0 or y_e <= 0 or y_f <= 0:
        raise ValueError("imaginary part is not in the positive cone")

    def slack(m: int) -> float:
        return math.sqrt(max(m + 2, 0) * nE)

    def tail_at(H: float) -> float:
        def bins_from(lo, hi):
            out = []
            for a, b, h in _kprime_bins(level, hi + 50, y1, y2):
                m = 2 * a * b if level == 2 else 4 * a * b
                heff = h - slack(m) * (1 if level == 2 else 1)
                if lo < heff <= hi:
                    out.append((m, 1, heff))
            return out

        return _tail(level, None, bins_from, H)

    H, tail = _choose_height(params, tail_at)
    bins = []
    for a, b, h in _kprime_bins(level, H + 60, y1, y2):
        m = 2 * a * b if level == 2 else 4 * a * b
        if h - slack(m) <= H:
            bins.append((a, b))
    n_need = max([(2 * a * b + 2) if level == 2 else 4 * a * b for a, b in bins] + [4])
    xs, ns = _e8_2_vectors(n_need)
    total = 0j
    count = 0
    zero = False
    for a, b in bins:
        if level == 2:
            if b == 0:
                ks = np.array([0])
                idx = np.array([0])
            lim = 2 * a * b + 2
        else:
            lim = 4 * a * b
        sel = ns <= lim
        X, N = xs[sel], ns[sel]
        if level == 2 and b == 0:
            X, N = X[N == 0], N[N == 0]
        px = _e8_pair_complex(X, wEc)
        if level == 2:
            lam_half = (2 * a * b - N) // 2
            base = a * complex(wf) + b * complex(we)
            arg = base + px
            if b == 0:
                ex = np.array([8 * (-1) ** a])
            else:
                ex = np.array([(-1) ** (b - a) * c_of(int(k)) for k in lam_half], dtype=float)
            u = np.exp(2j * np.pi * arg)
            f = 1 - u
            if np.any(np.abs(f) < 1e-300):
                zero = True
                continue
            total += complex(np.sum(ex * np.log(f)))
        else:
            lam_half = (4 * a * b - N) // 2
            base = 2 * (a * complex(wf) + b * complex(we))
            arg = base + px
            ex = np.array([c_of(int(k)) for k in lam_half], dtype=float)
            u = np.exp(1j * np.pi * arg)
            total += complex(np.sum(ex * (np.log(1 - u) - np.log(1 + u))))
        count += len(N)
    if level == 2:
        pref = 256 * np.exp(2j * np.pi * complex(wf))
    else:
        pref = 1.0
    value = 0j if zero else pref * np.exp(total)
    return PhiValue(ComplexAP(mpmath.mpc(value), 48), tail, count, H, zero)


def phi2_eval(w: Sequence, params: ProductParams | None = None) -> PhiValue:
    """The level-2 product on U + E8(2); ``w = (w_e, w_f, w_E)`` in the basis (e1, f1, E8(2))."""
    params = params or ProductParams()
    we, wf, wE = _split_w(w)
    if all(c == 0 for c in wE):
        # <a e1 + b f1, w_e e1 + w_f f1> = a w_f + b w_e, matching z1 = w_e, z2 = w_f
        return phi_kprime_level2(
            HalfPlanePoint(we.real, we.imag, params.prec),
            HalfPlanePoint(wf.real, wf.imag, params.prec),
            params,
        )
    return _generic_eval(2, w, params)


def phi1_eval(w: Sequence, params: ProductParams | None = None) -> PhiValue:
    """The level-1 product on U(2) + E8(2); ``w = (w_e, w_f, w_E)`` in the basis (e2, f2, E8(2))."""
    params = params or ProductParams()
    we, wf, wE = _split_w(w)
    if all(c == 0 for c in wE):
        return phi_kprime_level1(
            HalfPlanePoint(we.real, we.imag, params.prec),
            HalfPlanePoint(wf.real, wf.imag, params.prec),
            params,
        )
    return _generic_eval(1, w, params)


def kprime_leading_qexp(level: int, order: int) -> LaurentSeries2:
    """Exact expansion of the K' restriction in P = q1^(1/2), Q = q2^(1/2)."""
    bins_np = [(a, b, 0.0) for a, b, _ in _kprime_bins(level, 4.0, 1.0, 1.0) if a + b <= 0]
    em = _kprime_map(level, bins_np)

    def rest(D: int) -> ExponentMap:
        out = []
        for a, b, _ in _kprime_bins(level, float(4 * D + 8), 1.0, 1.0):
            if 0 < 2 * (a + b) <= D:
                out.append((a, b, 0.0))
        m = _kprime_map(level, out)
        return m

    return expand_exponent_map(em, order, rest)


# --------------------------------------------------------------------------
# derived quantities


def petersson_norm(lg: LambdaGamma, tau, tau_prime, params: ProductParams | None = None) -> mpmath.mpf:
    """(Im tau * Im tau')^4 |value|^2."""
    params = params or ProductParams()
    tau = tau if isinstance(tau, HalfPlanePoint) else HalfPlanePoint.from_value(tau, params.prec)
    tau_prime = (
        tau_prime if isinstance(tau_prime, HalfPlanePoint) else HalfPlanePoint.from_value(tau_prime, params.prec)
    )
    v = phi_gamma_eval(lg, tau, tau_prime, params)
    with mp.workprec(params.prec + GUARD_BITS):
        return (tau.im * tau_prime.im) ** 4 * abs(v.value.value) ** 2


def _in_gamma2(g) -> bool:
    (a, b), (c, d) = g
    return a * d - b * c == 1 and a % 2 == 1 and d % 2 == 1 and b % 2 == 0 and c % 2 == 0


def mobius(g, t: HalfPlanePoint) -> HalfPlanePoint:
    (a, b), (c, d) = g
    with mp.workprec(t.prec + GUARD_BITS):
        z = (a * t.value + b) / (c * t.value + d)
    return HalfPlanePoint(z.real, z.imag, t.prec)


def automorphy_defect(
    lg: LambdaGamma, g, g_prime, tau, tau_prime, params: ProductParams | None = None
) -> float:
    """Relative defect of the weight-(8,8) transformation law of the squared product under Gamma(2)^2."""
    params = params or ProductParams()
    if not (_in_gamma2(g) and _in_gamma2(g_prime)):
        raise ValueError("matrices must lie in Gamma(2)")
    tau = tau if isinstance(tau, HalfPlanePoint) else HalfPlanePoint.from_value(tau, params.prec)
    tau_prime = (
        tau_prime if isinstance(tau_prime, HalfPlanePoint) else HalfPlanePoint.from_value(tau_prime, params.prec)
    )
    v0 = phi_gamma_eval(lg, tau, tau_prime, params).value.value
    v1 = phi_gamma_eval(lg, mobius(g, tau), mobius(g_prime, tau_prime), params).value.value
    with mp.workprec(params.prec + GUARD_BITS):
        j = (g[1][0] * tau.value + g[1][1]) ** 8 * (g_prime[1][0] * tau_prime.value + g_prime[1][1]) ** 8
        rhs = j * v0**2
        if rhs == 0:
            return float(abs(v1**2))
        return float(abs(v1**2 - rhs) / abs(rhs))

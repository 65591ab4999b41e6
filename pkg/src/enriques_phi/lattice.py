"""Integral lattices with rational Gram matrices.

Vectors of a lattice are integer coordinate tuples in its basis; elements of
the rational span (for instance of the dual lattice) are tuples of
``Fraction``.  The module provides the standard lattices used throughout the
package, 2-elementary discriminant forms, a few integer linear algebra
helpers, and the vector enumeration kernel used by the product evaluations.

E8 convention: the Gram matrix of E8(2) is ``-2`` times the E8 Cartan matrix
in Bourbaki numbering, i.e. the Dynkin diagram has edges 1-3, 3-4, 4-5, 5-6,
6-7, 7-8 and 2-4.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

__all__ = [
    "E8_CARTAN",
    "E8_HIGHEST_ROOT",
    "QuadLattice",
    "DiscGroup",
    "standard_lattice",
    "direct_sum",
    "invariants",
    "disc_group",
    "enumerate_vectors",
    "short_vectors",
    "short_vectors_array",
    "isotropic_level",
    "characteristic_vector",
    "appendix_glue",
    "sl2_lift_check",
    "hnf_rows",
    "integer_kernel",
    "lattice_from_generators",
]

Vec = tuple[int, ...]
QVec = tuple[Fraction, ...]

_E8_EDGES = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]


def _e8_cartan() -> tuple[tuple[int, ...], ...]:
    m = [[0] * 8 for _ in range(8)]
    for i in range(8):
        m[i][i] = 2
    for a, b in _E8_EDGES:
        m[a - 1][b - 1] = m[b - 1][a - 1] = -1
    return tuple(tuple(r) for r in m)


E8_CARTAN = _e8_cartan()
# coefficients of the highest root in the simple roots (Bourbaki numbering)
E8_HIGHEST_ROOT = (2, 3, 4, 6, 5, 4, 3, 2)


# --------------------------------------------------------------------------
# small exact linear algebra


def _qmat(rows: Iterable[Iterable]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


def _det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(map(Fraction, r)) for r in m]
    n = len(a)
    det = Fraction(1)
    for i in range(n):
        p = next((r for r in range(i, n) if a[r][i] != 0), None)
        if p is None:
            return Fraction(0)
        if p != i:
            a[i], a[p] = a[p], a[i]
            det = -det
        det *= a[i][i]
        for r in range(i + 1, n):
            f = a[r][i] / a[i][i]
            if f:
                for c in range(i, n):
                    a[r][c] -= f * a[i][c]
    return det


def _inverse(m: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for i in range(n):
        p = next((r for r in range(i, n) if a[r][i] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        a[i], a[p] = a[p], a[i]
        piv = a[i][i]
        a[i] = [x / piv for x in a[i]]
        for r in range(n):
            if r != i and a[r][i] != 0:
                f = a[r][i]
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return [r[n:] for r in a]


def _inertia(m: Sequence[Sequence[Fraction]]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix."""
    a = [list(map(Fraction, r)) for r in m]
    pos = neg = 0
    while a:
        n = len(a)
        i = next((k for k in range(n) if a[k][k] != 0), None)
        if i is None:
            pair = next(((k, l) for k in range(n) for l in range(n) if a[k][l] != 0), None)
            if pair is None:
                break
            k, l = pair
            # congruence by e_k -> e_k + e_l makes the diagonal entry 2 a[k][l]
            for c in range(n):
                a[k][c] += a[l][c]
            for r in range(n):
                a[r][k] += a[r][l]
            continue
        piv = a[i][i]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in range(n) if k != i]
        a = [[a[r][c] - a[r][i] * a[i][c] / piv for c in rest] for r in rest]
    return pos, neg, len(m) - pos - neg


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form of an integer matrix, zero rows dropped."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        # Euclid on column c among rows r..end
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    f = a[i][c] // a[r][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                f = a[i][c] // a[r][c]
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == len(a):
                break
    return [row for row in a if any(row)]


def integer_kernel(matrix: Sequence[Sequence[int]], n: int | None = None) -> list[list[int]]:
    """Basis of ``{x in Z^n : matrix @ x = 0}`` (rows of the result), in HNF."""
    m = [list(map(int, r)) for r in matrix]
    if n is None:
        n = len(m[0])
    k = len(m)
    aug = [[m[i][j] for i in range(k)] + [int(i == j) for i in range(n)] for j in range(n)]
    red = hnf_rows(aug)
    kernel = [row[k:] for row in red if not any(row[:k])]
    # rows with zero left block that vanished during reduction are absent; pad rank
    return hnf_rows(kernel)


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def lattice_from_generators(gens: Sequence[Sequence[Fraction]]) -> list[QVec]:
    """A basis (HNF) of the Z-span of rational vectors."""
    den = _lcm(Fraction(x).denominator for g in gens for x in g)
    ints = [[int(Fraction(x) * den) for x in g] for g in gens]
    basis = hnf_rows(ints)
    return [tuple(Fraction(x, den) for x in row) for row in basis]


# --------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class QuadLattice:
    """A lattice given by a Gram matrix, optionally embedded in an ambient lattice."""

    name: str
    gram: tuple[tuple[Fraction, ...], ...]
    basis_in_ambient: tuple[QVec, ...] | None = None
    ambient_gram: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self) -> None:
        g = _qmat(self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(r) != n for r in g):
            raise ValueError("gram must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("gram must be symmetric")
        if self.basis_in_ambient is not None:
            b = _qmat(self.basis_in_ambient)
            a = _qmat(self.ambient_gram)
            object.__setattr__(self, "basis_in_ambient", b)
            object.__setattr__(self, "ambient_gram", a)
            induced = _mat_mul(_mat_mul(b, a), _transpose(b))
            if induced != [list(r) for r in g]:
                raise ValueError("gram does not match the induced ambient form")

    @classmethod
    def from_basis(cls, name: str, basis: Sequence[Sequence], ambient_gram) -> QuadLattice:
        b = _qmat(basis)
        a = _qmat(ambient_gram)
        g = _mat_mul(_mat_mul(b, a), _transpose(b))
        return cls(name, _qmat(g), b, a)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> Fraction:
        d = _det(self.gram)
        if d == 0:
            raise ValueError("degenerate lattice")
        return d

    @cached_property
    def gram_inverse(self) -> tuple[QVec, ...]:
        return _qmat(_inverse(self.gram))

    @cached_property
    def signature(self) -> tuple[int, int]:
        p, n, z = _inertia(self.gram)
        if z:
            raise ValueError("degenerate lattice")
        return p, n

    @cached_property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self.gram for x in r)

    @cached_property
    def is_even(self) -> bool:
        return self.is_integral and all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def pair(self, x: Sequence, y: Sequence) -> Fraction:
        g = self.gram
        return sum(
            (Fraction(x[i]) * g[i][j] * Fraction(y[j]) for i in range(self.rank) for j in range(self.rank) if x[i] and y[j]),
            Fraction(0),
        )

    def norm(self, x: Sequence) -> Fraction:
        return self.pair(x, x)

    def pairing_vector(self, x: Sequence) -> QVec:
        """The vector of pairings ``<x, b_i>`` with the basis."""
        g = self.gram
        return tuple(
            sum((Fraction(x[i]) * g[i][j] for i in range(self.rank) if x[i]), Fraction(0))
            for j in range(self.rank)
        )

    def to_ambient(self, x: Sequence) -> QVec:
        if self.basis_in_ambient is None:
            raise ValueError("lattice has no ambient embedding")
        b = self.basis_in_ambient
        m = len(b[0])
        return tuple(
            sum((Fraction(x[i]) * b[i][k] for i in range(self.rank) if x[i]), Fraction(0))
            for k in range(m)
        )

    def from_ambient(self, y: Sequence) -> QVec:
        """Coordinates of an ambient vector lying in the rational span of the basis."""
        if self.basis_in_ambient is None:
            raise ValueError("lattice has no ambient embedding")
        b = self.basis_in_ambient
        a = self.ambient_gram
        # solve x B = y using the Gram matrix: x (B A B^T) = y A B^T
        rhs = _mat_mul([list(map(Fraction, y))], _mat_mul(a, _transpose(b)))[0]
        x = _mat_mul([rhs], self.gram_inverse)[0]
        if tuple(self.to_ambient(x)) != tuple(map(Fraction, y)):
            raise ValueError("vector is not in the rational span of the lattice")
        return tuple(x)

    def contains_ambient(self, y: Sequence) -> bool:
        try:
            x = self.from_ambient(y)
        except ValueError:
            return False
        return all(c.denominator == 1 for c in x)

    def to_json_obj(self) -> dict:
        obj = {"name": self.name, "gram": [[str(x) for x in r] for r in self.gram]}
        if self.basis_in_ambient is not None:
            obj["basis_in_ambient"] = [[str(x) for x in r] for r in self.basis_in_ambient]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def _transpose(m):
    return [list(r) for r in zip(*m)]


def _mat_mul(a, b):
    bt = _transpose(b)
    return [[sum((x * y for x, y in zip(r, c) if x and y), Fraction(0)) for c in bt] for r in a]


def direct_sum(name: str, *blocks: Sequence[Sequence]) -> QuadLattice:
    n = sum(len(b) for b in blocks)
    g = [[Fraction(0)] * n for _ in range(n)]
    k = 0
    for b in blocks:
        for i, r in enumerate(b):
            for j, x in enumerate(r):
                g[k + i][k + j] = Fraction(x)
        k += len(b)
    return QuadLattice(name, _qmat(g))


_U = ((0, 1), (1, 0))
_U2 = ((0, 2), (2, 0))
_E8_2 = tuple(tuple(-2 * x for x in r) for r in E8_CARTAN)


def standard_lattice(name: str) -> QuadLattice:
    """One of ``U, U2, E8_2, K, Lambda, I29_2``."""
    if name == "U":
        return direct_sum("U", _U)
    if name == "U2":
        return direct_sum("U2", _U2)
    if name == "E8_2":
        return direct_sum("E8_2", _E8_2)
    if name == "K":
        return direct_sum("K", _U2, _U2)
    if name == "Lambda":
        return direct_sum("Lambda", _U2, _U, _E8_2)
    if name == "I29_2":
        return direct_sum("I29_2", [[2 * (1 if i == j and i < 2 else -1 if i == j else 0) for j in range(11)] for i in range(11)])
    if name == "E8":
        return direct_sum("E8", E8_CARTAN)
    raise ValueError(f"unknown lattice name {name!r}")


# --------------------------------------------------------------------------
# discriminant forms


@dataclass(frozen=True)
class DiscGroup:
    """Discriminant group of a 2-elementary even lattice, fully enumerated."""

    dim: int
    basis: tuple[QVec, ...]
    reps: tuple[QVec, ...]
    qvals: tuple[Fraction, ...]
    parity: int
    lattice: QuadLattice = field(repr=False, compare=False)

    def b(self, x: Sequence, y: Sequence) -> Fraction:
        return self.lattice.pair(x, y) % 1

    def q(self, x: Sequence) -> Fraction:
        return self.lattice.norm(x) % 2

    def index_of(self, x: Sequence) -> int:
        key = tuple(Fraction(c) % 1 for c in x)
        return self.reps.index(key)


def _two_elementary_data(L: QuadLattice) -> tuple[list[QVec], int]:
    if not L.is_integral:
        raise ValueError("lattice must be integral")
    ginv = L.gram_inverse
    twice = [[2 * x for x in r] for r in ginv]
    if any(x.denominator != 1 for r in twice for x in r):
        raise ValueError("lattice is not 2-elementary")
    n = L.rank
    # F2 column space of 2 G^{-1}
    cols = [[int(twice[i][j]) % 2 for i in range(n)] for j in range(n)]
    basis_cols: list[int] = []
    echelon: list[tuple[int, list[int]]] = []
    for j, col in enumerate(cols):
        v = col[:]
        for piv, row in echelon:
            if v[piv]:
                v = [(a + b) % 2 for a, b in zip(v, row)]
        nz = next((i for i, a in enumerate(v) if a), None)
        if nz is not None:
            echelon.append((nz, v))
            basis_cols.append(j)
    basis = [tuple(ginv[i][j] % 1 for i in range(n)) for j in basis_cols]
    return basis, len(basis)


def disc_group(L: QuadLattice, max_dim: int = 12) -> DiscGroup:
    basis, dim = _two_elementary_data(L)
    if dim > max_dim:
        raise ValueError(f"discriminant group of dimension {dim} exceeds the limit {max_dim}")
    reps = []
    for bits in itertools.product((0, 1), repeat=dim):
        x = [Fraction(0)] * L.rank
        for bit, v in zip(bits, basis):
            if bit:
                x = [a + b for a, b in zip(x, v)]
        reps.append(tuple(a % 1 for a in x))
    reps.sort()
    qvals = tuple(L.norm(r) % 2 for r in reps)
    parity = 0 if all(v.denominator == 1 for v in qvals) else 1
    return DiscGroup(dim, tuple(basis), tuple(reps), qvals, parity, L)


def invariants(L: QuadLattice) -> tuple[tuple[int, int], int, int]:
    """(signature, rank of the discriminant group, parity) of a 2-elementary lattice."""
    sig = L.signature
    basis, dim = _two_elementary_data(L)
    # parity: q is Z/2Z valued iff it is integral on an F2 basis and b(x,x) ... check all when small
    if dim <= 14:
        parity = disc_group(L, max_dim=14).parity
    else:  # pragma: no cover - not needed for the lattices used here
        raise ValueError("discriminant too large")
    return sig, dim, parity


def characteristic_vector(L: QuadLattice) -> QVec:
    """A vector c of the dual with ``<c, x> = x^2 mod 1`` on the dual; canonical rep in [0,1)."""
    A = disc_group(L, max_dim=14)
    for r in A.reps:
        if all((L.pair(r, x) - L.norm(x)) % 1 == 0 for x in A.basis):
            return r
    raise ArithmeticError("no characteristic vector found")  # pragma: no cover


# --------------------------------------------------------------------------
# enumeration


def _ldl(gram: Sequence[Sequence[Fraction]]) -> tuple[list[float], list[list[float]]]:
    """Float LDL^T data for a positive definite matrix: Q(x) = sum d_i (x_i + sum_{j>i} r_ij x_j)^2."""
    n = len(gram)
    a = [[float(x) for x in r] for r in gram]
    d = [0.0] * n
    r = [[0.0] * n for _ in range(n)]
    # decomposition in the order suitable for enumerating from the last coordinate
    for i in range(n):
        s = a[i][i] - sum(d[k] * r[k][i] ** 2 for k in range(i))
        if s <= 0:
            raise ValueError("form is not positive definite")
        d[i] = s
        for j in range(i + 1, n):
            r[i][j] = (a[i][j] - sum(d[k] * r[k][i] * r[k][j] for k in range(i))) / s
    return d, r


def short_vectors(
    gram: Sequence[Sequence], bound, shift: Sequence | None = None
) -> Iterator[tuple[int, ...]]:
    """All integer x with ``(x+shift)^T gram (x+shift) <= bound`` for positive definite ``gram``.

    Fincke-Pohst enumeration; the walk uses floating point with a safety margin
    and every candidate is confirmed exactly, so the output is exact.
    Yields the vectors ``x + shift`` as tuples of Fractions when a shift is
    given, and integer tuples otherwise.
    """
    g = _qmat(gram)
    n = len(g)
    bound = Fraction(bound)
    if bound < 0:
        return
    d, r = _ldl(g)
    s = [Fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
    sf = [float(x) for x in s]
    slack = 1e-9 * (1.0 + abs(float(bound)))
    fb = float(bound) + slack
    den = _lcm([x.denominator for row in g for x in row] + [x.denominator for x in s])
    gi = [[int(x * den) for x in row] for row in g]
    si = [int(x * den) for x in s]  # shift scaled by den
    bound_scaled = bound * den**3  # (den*y)^T (den*G) (den*y)

    y = [0.0] * n  # current values y_i = x_i + s_i
    x = [0] * n

    def exact_ok() -> bool:
        v = [xi * den + sv for xi, sv in zip(x, si)]
        tot = 0
        for i in range(n):
            if v[i]:
                row = gi[i]
                tot += v[i] * sum(row[j] * v[j] for j in range(n) if v[j])
        return tot <= bound_scaled

    def rec(i: int, remaining: float) -> Iterator[None]:
        c = -sum(r[i][j] * y[j] for j in range(i + 1, n))
        rad = math.sqrt(max(remaining, 0.0) / d[i]) + 1e-9
        lo = math.ceil(c - rad - sf[i])
        hi = math.floor(c + rad - sf[i])
        for xi in range(lo, hi + 1):
            yi = xi + sf[i]
            t = remaining - d[i] * (yi - c) ** 2
            if t < -slack:
                continue
            x[i] = xi
            y[i] = yi
            if i == 0:
                yield None
            else:
                yield from rec(i - 1, t)
        x[i] = 0
        y[i] = 0.0

    if n == 0:
        yield ()
        return
    for _ in rec(n - 1, fb):
        if exact_ok():
            if shift is None:
                yield tuple(x)
            else:
                yield tuple(Fraction(xi) + sv for xi, sv in zip(x, s))


def enumerate_vectors(
    L: QuadLattice,
    norm_min,
    norm_max,
    height: Sequence,
    h_min,
    h_max,
) -> list[Vec]:
    """All lattice vectors with ``norm_min <= v^2 <= norm_max`` and ``h_min < <v,height> <= h_max``.

    ``L`` must have signature (1, r-1) and ``height`` (rational coordinates in
    the basis of ``L``) must have positive norm.  Sorted by height, then
    lexicographically.
    """
    norm_min, norm_max = Fraction(norm_min), Fraction(norm_max)
    h_min, h_max = Fraction(h_min), Fraction(h_max)
    if norm_min > norm_max or h_min >= h_max:
        return []
    hv = tuple(Fraction(x) for x in height)
    H = L.norm(hv)
    if H <= 0:
        raise ValueError("height vector must have positive norm")
    if L.signature != (1, L.rank - 1):
        raise ValueError("lattice must have signature (1, r-1)")
    gh = L.pairing_vector(hv)  # <e_i, height>
    n = L.rank
    F = [[2 * gh[i] * gh[j] / H - L.gram[i][j] for j in range(n)] for i in range(n)]
    bound = 2 * max(h_min * h_min, h_max * h_max) / H - norm_min
    out = []
    for v in short_vectors(F, bound):
        h = sum((gh[i] * v[i] for i in range(n) if v[i]), Fraction(0))
        if not (h_min < h <= h_max):
            continue
        nv = L.norm(v)
        if norm_min <= nv <= norm_max:
            out.append((h, v))
    out.sort()
    return [v for _, v in out]


def isotropic_level(L: QuadLattice, v: Sequence[int]) -> int:
    """The positive generator of ``<v, L>`` for a primitive isotropic ``v``."""
    if L.norm(v) != 0:
        raise ValueError("vector is not isotropic")
    if any(Fraction(c).denominator != 1 for c in v) or math.gcd(*[int(c) for c in v]) != 1:
        raise ValueError("vector is not primitive")
    pv = L.pairing_vector(v)
    if any(p.denominator != 1 for p in pv):
        raise ValueError("lattice is not integral along v")
    return math.gcd(*[int(p) for p in pv])


# --------------------------------------------------------------------------
# glue constructions


def appendix_glue() -> QuadLattice:
    """The lattice Z(l1 + l2) + Zd + I_{2,9}(2) with d^2 = -2.

    ``l1 = d/2`` and ``l2 = (3,-1,...,-1)/2`` are characteristic vectors of the
    two summands.  The ambient coordinates are (d, e_1, ..., e_11).
    """
    ambient = direct_sum(
        "Zd+I29_2", [[-2]], standard_lattice("I29_2").gram
    ).gram
    half = Fraction(1, 2)
    glue = (half, Fraction(3, 2)) + (-half,) * 10
    gens = [glue] + [tuple(Fraction(int(i == j)) for j in range(12)) for i in range(12)]
    basis = lattice_from_generators(gens)
    return QuadLattice.from_basis("appendix_glue", basis, ambient)


def sl2_lift_check(g: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Lift ``g`` in SL2(Z) acting on F = Ze + Zf to an isometry of U + U.

    The basis order is (e, e', f, f') with ``<e, e'> = <f, f'> = 1``.  The
    returned 4x4 matrix has the images of the basis vectors as columns.  The
    function verifies that it is an isometry, restricts to ``g`` on F, and
    keeps the point (1:1:i:i) in the same component of the period domain.
    """
    (a, b), (c, d) = g
    if a * d - b * c != 1:
        raise ValueError("g must have determinant 1")
    # columns: images of e, e', f, f'
    cols = [
        (a, 0, c, 0),  # g(e)  = a e + c f
        (0, d, 0, -b),  # g(e') = d e' - b f'
        (b, 0, d, 0),  # g(f)  = b e + d f
        (0, -c, 0, a),  # g(f') = -c e' + a f'
    ]
    m = tuple(tuple(cols[j][i] for j in range(4)) for i in range(4))
    gram = ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
    mt_g_m = [
        [sum(m[k][i] * gram[k][l] * m[l][j] for k in range(4) for l in range(4)) for j in range(4)]
        for i in range(4)
    ]
    if mt_g_m != [list(r) for r in gram]:
        raise ArithmeticError("lift is not an isometry")  # pragma: no cover
    if (m[0][0], m[2][0], m[0][2], m[2][2]) != (a, c, b, d):
        raise ArithmeticError("lift does not restrict to g")  # pragma: no cover
    x, y, z, w = 1, 1, 1j, 1j
    img = [sum(m[i][j] * v for j, v in enumerate((x, y, z, w))) for i in range(4)]
    xi, yi, zi, wi = img
    in_domain = (
        abs(xi * yi + zi * wi) < 1e-12
        and (xi * yi.conjugate() + xi.conjugate() * yi + zi * wi.conjugate() + zi.conjugate() * wi).real > 0
    )
    same_component = (zi / xi).imag > 0 and (wi / xi).imag > 0
    if not (in_domain and same_component):
        raise ArithmeticError("lift does not preserve the component")  # pragma: no cover
    return m


def short_vectors_array(gram: Sequence[Sequence], bound, shift: Sequence | None = None):
    """Vectorised variant of :func:`short_vectors` returning an integer array.

    Returns ``(t, num)`` where the rows of ``t`` are the integer vectors with
    ``(t+shift)^T gram (t+shift) <= bound`` and ``num`` holds the exact values
    of that form scaled by ``den**2 * gram_den`` (see ``scale`` below) as
    Python-int-compatible int64.  The third return value is the scale factor.
    The breadth-first walk runs in floating point with a safety margin and the
    final filter is exact integer arithmetic.
    """
    import numpy as np

    g = _qmat(gram)
    n = len(g)
    bound = Fraction(bound)
    s = [Fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
    d, r = _ldl(g)
    sf = np.array([float(x) for x in s])
    slack = 1e-9 * (1.0 + abs(float(bound)))
    pts = np.zeros((1, 0), dtype=np.int64)
    rem = np.array([float(bound) + slack])
    ys = np.zeros((1, 0))
    for i in range(n - 1, -1, -1):
        # ys holds y_{i+1..n-1} in columns 0..(n-2-i) (reversed order)
        if ys.shape[1]:
            coeffs = np.array([r[i][j] for j in range(n - 1, i, -1)])
            c = -(ys @ coeffs)
        else:
            c = np.zeros(len(rem))
        rad = np.sqrt(np.maximum(rem, 0.0) / d[i]) + 1e-9
        lo = np.ceil(c - rad - sf[i]).astype(np.int64)
        hi = np.floor(c + rad - sf[i]).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total == 0:
            return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=object), 1
        parent = np.repeat(np.arange(len(rem)), cnt)
        starts = np.cumsum(cnt) - cnt
        offs = np.arange(total) - np.repeat(starts, cnt)
        xi = lo[parent] + offs
        yi = xi + sf[i]
        new_rem = rem[parent] - d[i] * (yi - c[parent]) ** 2
        keep = new_rem >= -slack
        parent, xi, yi, new_rem = parent[keep], xi[keep], yi[keep], new_rem[keep]
        pts = np.concatenate([pts[parent], xi[:, None]], axis=1)
        ys = np.concatenate([ys[parent], yi[:, None]], axis=1)
        rem = new_rem
    # columns are in order n-1, ..., 0
    t = pts[:, ::-1].copy()
    den = _lcm([x.denominator for row in g for x in row] + [x.denominator for x in s])
    gi = np.array([[int(x * den) for x in row] for row in g], dtype=np.int64)
    si = np.array([int(x * den) for x in s], dtype=np.int64)
    v = t * den + si
    vals = np.einsum("ij,jk,ik->i", v, gi, v)
    scale = den**3
    ok = vals * bound.denominator <= bound.numerator * scale
    return t[ok], vals[ok], scale

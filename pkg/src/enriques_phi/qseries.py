"""Exact truncated Laurent series in one and two variables.

Two-variable series live in the ring of Laurent series in ``P = p^{1/2}`` and
``Q = q^{1/2}``.  An exponent pair ``(a, b)`` stands for the monomial
``P^a Q^b = p^{a/2} q^{b/2}``.  Truncation is by total degree ``a + b``: a
series with ``order = N`` knows every coefficient with ``a + b <= N`` and
nothing beyond.  ``order = None`` marks an exact (finite) Laurent polynomial.

One-variable series are expansions in ``q = e^{2 pi i tau}`` with integer
exponents and an extra rational exponent ``offset`` kept apart from the
stored terms, so that ``eta(tau) = q^{1/24} * (1 - q - q^2 + ...)`` is stored
with ``offset = 1/24``.

All coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

__all__ = [
    "Exp2",
    "LaurentSeries1",
    "LaurentSeries2",
    "NotInvertibleError",
    "TruncationError",
    "series_mul",
    "series_pow_int",
    "eta_quotient_qexp",
    "c_coeffs",
    "j_qexp",
    "monster_denominator_series",
    "divide_by_homogeneous",
    "in_unit_class",
]

Exp2 = tuple[int, int]


class TruncationError(ArithmeticError):
    """Raised when an operation would leave no known coefficients."""


class NotInvertibleError(ArithmeticError):
    """Raised when a series has no inverse at the current truncation."""


def _min_order(x: int | None, y: int | None) -> int | None:
    if x is None:
        return y
    if y is None:
        return x
    return min(x, y)


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


# --------------------------------------------------------------------------
# two variables


@dataclass(frozen=True, eq=False)
class LaurentSeries2:
    """Truncated series ``sum c[a,b] P^a Q^b`` with ``P = p^{1/2}``, ``Q = q^{1/2}``."""

    terms: Mapping[Exp2, Fraction]
    order: int | None = None
    lower: Exp2 = (0, 0)

    def __post_init__(self) -> None:
        clean: dict[Exp2, Fraction] = {}
        la, lb = self.lower
        for (a, b), c in self.terms.items():
            c = _frac(c)
            if c == 0:
                continue
            if self.order is not None and a + b > self.order:
                continue
            if a < la or b < lb:
                raise ValueError(f"exponent {(a, b)} below declared lower bound {self.lower}")
            clean[(int(a), int(b))] = c
        if self.order is not None and self.order < la + lb:
            raise TruncationError(
                f"truncation order {self.order} is below the lower bound {self.lower}"
            )
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, order: int | None = None) -> LaurentSeries2:
        return cls({}, order, (0, 0))

    @classmethod
    def one(cls, order: int | None = None) -> LaurentSeries2:
        return cls({(0, 0): Fraction(1)}, order, (0, 0))

    @classmethod
    def monomial(
        cls, a: int, b: int, coeff: int | Fraction = 1, order: int | None = None
    ) -> LaurentSeries2:
        return cls({(a, b): _frac(coeff)}, order, (min(a, 0), min(b, 0)))

    @classmethod
    def polynomial(
        cls, terms: Mapping[Exp2, int | Fraction], order: int | None = None
    ) -> LaurentSeries2:
        """Build a series whose lower bound is read off from its terms."""
        la = min((a for a, _ in terms), default=0)
        lb = min((b for _, b in terms), default=0)
        return cls(dict(terms), order, (min(la, 0), min(lb, 0)))

    # -- basic queries ----------------------------------------------------

    def coefficient(self, a: int, b: int) -> Fraction:
        if self.order is not None and a + b > self.order:
            raise TruncationError(f"coefficient of P^{a}Q^{b} is beyond order {self.order}")
        return self.terms.get((a, b), Fraction(0))

    def valuation(self) -> int | None:
        """Least total degree among stored terms (None for the zero series)."""
        return min((a + b for a, b in self.terms), default=None)

    def effective_valuation(self) -> float | int:
        """Least total degree any (known or unknown) term can have."""
        v = self.valuation()
        cap = float("inf") if self.order is None else self.order + 1
        return cap if v is None else min(v, cap)

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous_part(self, degree: int) -> LaurentSeries2:
        if self.order is not None and degree > self.order:
            raise TruncationError(f"degree {degree} is beyond order {self.order}")
        return LaurentSeries2.polynomial({e: c for e, c in self.terms.items() if sum(e) == degree})

    def leading_part(self) -> LaurentSeries2:
        """The homogeneous component of least total degree, as an exact polynomial."""
        v = self.valuation()
        if v is None:
            raise ValueError("the zero series has no leading part")
        return self.homogeneous_part(v)

    def truncate(self, order: int) -> LaurentSeries2:
        return LaurentSeries2(self.terms, _min_order(self.order, order), self.lower)

    def with_lower(self, lower: Exp2) -> LaurentSeries2:
        return LaurentSeries2(self.terms, self.order, lower)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def swap(self) -> LaurentSeries2:
        """Exchange the roles of P and Q."""
        return LaurentSeries2(
            {(b, a): c for (a, b), c in self.terms.items()},
            self.order,
            (self.lower[1], self.lower[0]),
        )

    def substitute_signs(self, sp: int, sq: int) -> LaurentSeries2:
        """Replace P by ``sp*P`` and Q by ``sq*Q`` with ``sp, sq`` in {1, -1}."""
        return LaurentSeries2(
            {(a, b): c * (sp**a) * (sq**b) for (a, b), c in self.terms.items()},
            self.order,
            self.lower,
        )

    def evaluate(self, P, Q):
        """Evaluate the stored terms at complex numbers P, Q (e.g. mpmath values)."""
        total = 0
        for (a, b), c in self.terms.items():
            total += (c.numerator * P**a * Q**b) / c.denominator
        return total

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: LaurentSeries2 | int | Fraction) -> LaurentSeries2:
        if not isinstance(other, LaurentSeries2):
            other = LaurentSeries2({(0, 0): _frac(other)})
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        lower = (min(self.lower[0], other.lower[0]), min(self.lower[1], other.lower[1]))
        return LaurentSeries2(out, _min_order(self.order, other.order), lower)

    __radd__ = __add__

    def __neg__(self) -> LaurentSeries2:
        return LaurentSeries2({e: -c for e, c in self.terms.items()}, self.order, self.lower)

    def __sub__(self, other: LaurentSeries2 | int | Fraction) -> LaurentSeries2:
        if not isinstance(other, LaurentSeries2):
            other = LaurentSeries2({(0, 0): _frac(other)})
        return self + (-other)

    def __rsub__(self, other: int | Fraction) -> LaurentSeries2:
        return (-self) + other

    def __mul__(self, other: LaurentSeries2 | int | Fraction) -> LaurentSeries2:
        if isinstance(other, LaurentSeries2):
            return series_mul(self, other)
        k = _frac(other)
        return LaurentSeries2({e: c * k for e, c in self.terms.items()}, self.order, self.lower)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentSeries2:
        return series_pow_int(self, k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentSeries2):
            return NotImplemented
        return self.order == other.order and self.terms == other.terms

    def agrees_with(self, other: LaurentSeries2) -> bool:
        """Coefficientwise equality up to the smaller of the two orders."""
        n = _min_order(self.order, other.order)
        keys = set(self.terms) | set(other.terms)
        for e in keys:
            if n is not None and sum(e) > n:
                continue
            if self.terms.get(e, 0) != other.terms.get(e, 0):
                return False
        return True

    # -- serialisation ----------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "lower": list(self.lower),
            "order": self.order,
            "offset": "0",
            "terms": [[a, b, c.numerator, c.denominator] for (a, b), c in self.terms.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> LaurentSeries2:
        terms = {(int(a), int(b)): Fraction(int(n), int(d)) for a, b, n, d in obj["terms"]}
        return cls(terms, obj["order"], tuple(obj["lower"]))

    @classmethod
    def from_json(cls, text: str) -> LaurentSeries2:
        return cls.from_json_obj(json.loads(text))

    def __repr__(self) -> str:
        return f"LaurentSeries2({format_series2(self)})"


def format_series2(x: LaurentSeries2, max_terms: int = 40) -> str:
    """Human readable rendering with ``P = p^(1/2)`` and ``Q = q^(1/2)``."""
    parts = []
    for (a, b), c in list(x.terms.items())[:max_terms]:
        mono = "*".join(
            s
            for s in (
                "" if a == 0 else ("P" if a == 1 else f"P^{a}"),
                "" if b == 0 else ("Q" if b == 1 else f"Q^{b}"),
            )
            if s
        )
        parts.append(f"({c})" + (f"*{mono}" if mono else ""))
    if len(x.terms) > max_terms:
        parts.append("...")
    body = " + ".join(parts) if parts else "0"
    if x.order is not None:
        body += f" + O(deg > {x.order})"
    return body


def series_mul(x: LaurentSeries2, y: LaurentSeries2) -> LaurentSeries2:
    """Product of two truncated series, exact over the rationals."""
    vx, vy = x.effective_valuation(), y.effective_valuation()
    candidates = []
    if x.order is not None:
        candidates.append(x.order + vy)
    if y.order is not None:
        candidates.append(y.order + vx)
    order: int | None
    if not candidates:
        order = None
    else:
        m = min(candidates)
        order = None if m == float("inf") else int(m)
    lower = (x.lower[0] + y.lower[0], x.lower[1] + y.lower[1])
    if order is not None and order < lower[0] + lower[1]:
        raise TruncationError(
            f"product would have order {order} below its lower bound {lower}"
        )
    ys = sorted(y.terms.items(), key=lambda t: t[0][0] + t[0][1])
    integral = x.is_integral() and y.is_integral()
    out: dict[Exp2, int | Fraction] = {}
    zero = 0 if integral else Fraction(0)
    for (a1, b1), c1 in x.terms.items():
        d1 = a1 + b1
        k1 = c1.numerator if integral else c1
        for (a2, b2), c2 in ys:
            if order is not None and d1 + a2 + b2 > order:
                break
            e = (a1 + a2, b1 + b2)
            out[e] = out.get(e, zero) + k1 * (c2.numerator if integral else c2)
    return LaurentSeries2(out, order, lower)


def _monomial_shift(x: LaurentSeries2, da: int, db: int, coeff: Fraction) -> LaurentSeries2:
    return LaurentSeries2(
        {(a + da, b + db): c * coeff for (a, b), c in x.terms.items()},
        None if x.order is None else x.order + da + db,
        (x.lower[0] + da, x.lower[1] + db),
    )


def _inverse(x: LaurentSeries2) -> LaurentSeries2:
    lead = x.leading_part() if not x.is_zero() else None
    if lead is None or len(lead.terms) != 1:
        raise NotInvertibleError("not invertible at this truncation")
    ((a0, b0), c0), = lead.terms.items()
    unit = _monomial_shift(x, -a0, -b0, 1 / c0)
    u = unit - 1
    if u.is_zero() and unit.order is None:
        return LaurentSeries2.monomial(-a0, -b0, 1 / c0)
    if unit.order is None:
        raise NotInvertibleError(
            "not invertible at this truncation: exact input needs a truncation order"
        )
    n = unit.order
    if n < 0:
        raise TruncationError("nothing is known about the inverse")
    mu_a = min([a for a, _ in u.terms] + [unit.lower[0]])
    mu_b = min([b for _, b in u.terms] + [unit.lower[1]])
    lower = (min(0, n * mu_a), min(0, n * mu_b))
    one = LaurentSeries2({(0, 0): Fraction(1)}, n, lower)
    neg_u = (-u).with_lower(lower)
    result = one
    term = one
    for _ in range(n):
        term = series_mul(term, neg_u).truncate(n).with_lower(lower)
        if term.is_zero():
            break
        result = result + term
    result = LaurentSeries2(result.terms, n, lower)
    return _monomial_shift(result, -a0, -b0, 1 / c0)


def series_pow_int(x: LaurentSeries2, k: int) -> LaurentSeries2:
    """``x**k`` for any integer k; negative powers invert the unit part."""
    if k == 0:
        return LaurentSeries2.one(x.order if x.order is None else max(x.order, 0))
    if k < 0:
        return series_pow_int(_inverse(x), -k)
    if len(x.terms) == 1 and x.order is None:
        ((a, b), c), = x.terms.items()
        return LaurentSeries2.monomial(a * k, b * k, c**k)
    result: LaurentSeries2 | None = None
    base = x
    while k:
        if k & 1:
            result = base if result is None else series_mul(result, base)
        k >>= 1
        if k:
            base = series_mul(base, base)
    assert result is not None
    return result


def divide_by_homogeneous(x: LaurentSeries2, lead: LaurentSeries2) -> LaurentSeries2:
    """Exact quotient ``x / lead`` for a homogeneous polynomial ``lead``.

    Each homogeneous component of ``x`` is divided separately by polynomial
    long division; a nonzero remainder raises ``ArithmeticError``.  The
    quotient is known up to ``x.order - deg(lead)``.
    """
    degs = {a + b for a, b in lead.terms}
    if len(degs) != 1:
        raise ValueError("divisor must be homogeneous")
    (delta,) = degs
    lead_items = sorted(lead.terms.items())
    (la_top, lb_top), c_top = lead_items[-1]
    la_bottom = lead_items[0][0][0]
    by_degree: dict[int, dict[int, Fraction]] = {}
    for (a, b), c in x.terms.items():
        by_degree.setdefault(a + b, {})[a] = c
    quotient: dict[Exp2, Fraction] = {}
    for d, comp in sorted(by_degree.items()):
        rem = dict(comp)
        lowest_allowed = min(comp) - la_bottom
        while rem:
            a = max(rem)
            qa = a - la_top
            if qa < lowest_allowed:
                raise ArithmeticError(f"degree-{d} component is not divisible by the divisor")
            coef = rem[a] / c_top
            quotient[(qa, d - delta - qa)] = coef
            for (la, _), lc in lead_items:
                key = qa + la
                val = rem.get(key, Fraction(0)) - coef * lc
                if val == 0:
                    rem.pop(key, None)
                else:
                    rem[key] = val
    order = None if x.order is None else x.order - delta
    la = min([a for a, _ in quotient] + [0])
    lb = min([b for _, b in quotient] + [0])
    return LaurentSeries2(quotient, order, (la, lb))


def in_unit_class(x: LaurentSeries2, lead: LaurentSeries2) -> bool:
    """Decide whether ``x`` lies in ``lead * (1 + m)`` within the known range.

    Here ``m`` is the ideal generated by P and Q in the power series ring:
    the quotient ``x / lead`` must have constant term 1 and only terms with
    nonnegative exponents otherwise.
    """
    try:
        y = divide_by_homogeneous(x, lead)
    except ArithmeticError:
        return False
    if y.order is not None and y.order < 0:
        return False
    if y.terms.get((0, 0)) != 1:
        return False
    return all(a >= 0 and b >= 0 and (a, b) != (0, 0) for (a, b) in y.terms if (a, b) != (0, 0))


# --------------------------------------------------------------------------
# one variable


@dataclass(frozen=True, eq=False)
class LaurentSeries1:
    """Truncated series ``q^offset * sum c[n] q^n`` in ``q = e^{2 pi i tau}``."""

    terms: Mapping[int, Fraction]
    order: int | None = None
    lower: int = 0
    offset: Fraction = field(default_factory=Fraction)

    def __post_init__(self) -> None:
        clean = {}
        for n, c in self.terms.items():
            c = _frac(c)
            if c == 0 or (self.order is not None and n > self.order):
                continue
            if n < self.lower:
                raise ValueError(f"exponent {n} below declared lower bound {self.lower}")
            clean[int(n)] = c
        if self.order is not None and self.order < self.lower:
            raise TruncationError(f"order {self.order} below lower bound {self.lower}")
        object.__setattr__(self, "terms", dict(sorted(clean.items())))
        object.__setattr__(self, "offset", _frac(self.offset))

    def coefficient(self, n: int) -> Fraction:
        if self.order is not None and n > self.order:
            raise TruncationError(f"coefficient of q^{n} is beyond order {self.order}")
        return self.terms.get(n, Fraction(0))

    def valuation(self) -> int | None:
        return min(self.terms, default=None)

    def normalized(self) -> LaurentSeries1:
        """Fold an integral offset into the exponents."""
        if self.offset.denominator != 1:
            raise ValueError(f"offset {self.offset} is not integral")
        s = int(self.offset)
        return LaurentSeries1(
            {n + s: c for n, c in self.terms.items()},
            None if self.order is None else self.order + s,
            self.lower + s,
            Fraction(0),
        )

    def __mul__(self, other: LaurentSeries1 | int | Fraction) -> LaurentSeries1:
        if not isinstance(other, LaurentSeries1):
            k = _frac(other)
            return LaurentSeries1(
                {n: c * k for n, c in self.terms.items()}, self.order, self.lower, self.offset
            )
        vx = self.valuation() if self.terms else (self.order + 1 if self.order is not None else 0)
        vy = other.valuation() if other.terms else (other.order + 1 if other.order is not None else 0)
        cands = []
        if self.order is not None:
            cands.append(self.order + vy)
        if other.order is not None:
            cands.append(other.order + vx)
        order = min(cands) if cands else None
        out: dict[int, Fraction] = {}
        for n1, c1 in self.terms.items():
            for n2, c2 in other.terms.items():
                n = n1 + n2
                if order is not None and n > order:
                    break
                out[n] = out.get(n, Fraction(0)) + c1 * c2
        return LaurentSeries1(out, order, self.lower + other.lower, self.offset + other.offset)

    __rmul__ = __mul__

    def __add__(self, other: LaurentSeries1) -> LaurentSeries1:
        if self.offset != other.offset:
            raise ValueError("cannot add series with different offsets")
        out = dict(self.terms)
        for n, c in other.terms.items():
            out[n] = out.get(n, Fraction(0)) + c
        return LaurentSeries1(
            out, _min_order(self.order, other.order), min(self.lower, other.lower), self.offset
        )

    def __neg__(self) -> LaurentSeries1:
        return LaurentSeries1({n: -c for n, c in self.terms.items()}, self.order, self.lower, self.offset)

    def __sub__(self, other: LaurentSeries1) -> LaurentSeries1:
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentSeries1):
            return NotImplemented
        return (self.order, self.offset, self.terms) == (other.order, other.offset, other.terms)

    def evaluate(self, q, q_offset=None):
        """Evaluate at ``q``; ``q_offset`` must supply ``q**offset`` when offset != 0."""
        total = 0
        for n, c in self.terms.items():
            total += (c.numerator * q**n) / c.denominator
        if self.offset != 0:
            if q_offset is None:
                raise ValueError("q_offset required for a series with nonzero offset")
            total *= q_offset
        return total

    def to_series2(self, variable: str = "p") -> LaurentSeries2:
        """View an offset-free series in q as a series in ``p`` or ``q`` (half-unit exponents)."""
        s = self if self.offset == 0 else self.normalized()
        terms = {}
        for n, c in s.terms.items():
            terms[(2 * n, 0) if variable == "p" else (0, 2 * n)] = c
        order = None if s.order is None else 2 * s.order
        lower = (2 * s.lower, 0) if variable == "p" else (0, 2 * s.lower)
        return LaurentSeries2(terms, order, (min(lower[0], 0), min(lower[1], 0)))

    def to_json_obj(self) -> dict:
        return {
            "lower": self.lower,
            "order": self.order,
            "offset": str(self.offset),
            "terms": [[n, c.numerator, c.denominator] for n, c in self.terms.items()],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> LaurentSeries1:
        terms = {int(n): Fraction(int(a), int(b)) for n, a, b in obj["terms"]}
        return cls(terms, obj["order"], int(obj["lower"]), Fraction(obj["offset"]))


# --------------------------------------------------------------------------
# integer power series helpers (lists indexed by exponent, starting at 0)


def _euler_product(n: int) -> list[int]:
    """Coefficients of prod_{k>=1} (1 - q^k) up to q^n via the pentagonal theorem."""
    out = [0] * (n + 1)
    out[0] = 1
    k = 1
    while True:
        sign = -1 if k % 2 else 1
        p1 = k * (3 * k - 1) // 2
        p2 = k * (3 * k + 1) // 2
        if p1 > n:
            break
        out[p1] += sign
        if p2 <= n:
            out[p2] += sign
        k += 1
    return out


def _power_series_pow(f: list[int], e: int, n: int) -> list[int]:
    """``f**e`` up to ``q^n`` for f with f[0] = 1 (Miller's recurrence)."""
    if f[0] != 1:
        raise ValueError("leading coefficient must be 1")
    g = [0] * (n + 1)
    g[0] = 1
    for m in range(1, n + 1):
        acc = 0
        for k in range(1, min(m, len(f) - 1) + 1):
            if f[k]:
                acc += ((e + 1) * k - m) * f[k] * g[m - k]
        g[m] = acc // m
    return g


def _mul_lists(f: list[int], g: list[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, a in enumerate(f[: n + 1]):
        if a:
            for j, b in enumerate(g[: n + 1 - i]):
                if b:
                    out[i + j] += a * b
    return out


def eta_quotient_qexp(factors: Iterable[tuple[int, int]], order: int) -> LaurentSeries1:
    """Expansion of ``prod eta(k tau)^e`` with the q^{sum e k / 24} factor kept in ``offset``."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    factors = list(factors)
    base = _euler_product(order)
    series = [1] + [0] * order
    for k, e in factors:
        if k <= 0:
            raise ValueError("scales must be positive")
        powered = _power_series_pow(base, e, order)
        scaled = [0] * (order + 1)
        for i, c in enumerate(powered):
            if i * k > order:
                break
            scaled[i * k] = c
        series = _mul_lists(series, scaled, order)
    offset = Fraction(sum(e * k for k, e in factors), 24)
    return LaurentSeries1(dict(enumerate(series)), order, 0, offset)


@lru_cache(maxsize=8)
def _c_table(n_max: int) -> tuple[int, ...]:
    s = eta_quotient_qexp([(1, -8), (2, 8), (4, -8)], n_max + 1)
    assert s.offset == -1
    return tuple(int(s.terms.get(i, 0)) for i in range(n_max + 2))


def c_coeffs(n_max: int) -> dict[int, int]:
    """The coefficients c(-1), ..., c(n_max) of eta(tau)^-8 eta(2tau)^8 eta(4tau)^-8."""
    if n_max < -1:
        raise ValueError("n_max must be at least -1")
    table = _c_table(max(n_max, 0))
    return {n: table[n + 1] for n in range(-1, n_max + 1)}


def c_value(n: int) -> int:
    """Single coefficient c(n), zero below -1."""
    if n < -1:
        return 0
    size = 64
    while size < n:
        size *= 2
    return _c_table(size)[n + 1]


def _sigma3(n: int) -> int:
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=8)
def _j_table(order: int) -> tuple[int, ...]:
    n = order + 1
    e4 = [1] + [240 * _sigma3(k) for k in range(1, n + 1)]
    e4_cubed = _mul_lists(_mul_lists(e4, e4, n), e4, n)
    inv_delta = _power_series_pow(_euler_product(n), -24, n)
    return tuple(_mul_lists(e4_cubed, inv_delta, n))


def j_qexp(order: int) -> LaurentSeries1:
    """``j(tau) = q^-1 + 744 + 196884 q + ...`` known through ``q^order``."""
    if order < -1:
        raise ValueError("order must be at least -1")
    table = _j_table(max(order, 0))
    terms = {k - 1: table[k] for k in range(order + 2)}
    return LaurentSeries1(terms, order, -1, Fraction(0))


def j_coeff(n: int) -> int:
    """Coefficient a(n) of ``j - 744`` (so a(-1) = 1 and a(0) = 0)."""
    if n < -1:
        return 0
    if n == 0:
        return 0
    size = 32
    while size < n:
        size *= 2
    return _j_table(size)[n + 1]


def _binomial_series_factor(
    a: int, b: int, exponent: int, order: int, lower: Exp2
) -> LaurentSeries2:
    """``(1 - P^a Q^b)^exponent`` truncated at total degree ``order`` (a + b > 0)."""
    deg = a + b
    terms: dict[Exp2, Fraction] = {}
    coeff = 1
    k = 0
    while k * deg <= order:
        terms[(k * a, k * b)] = Fraction(coeff * (-1) ** k)
        # next generalized binomial coefficient C(exponent, k+1)
        coeff = coeff * (exponent - k) // (k + 1)
        k += 1
        if exponent >= 0 and k > exponent:
            break
    return LaurentSeries2(terms, order, lower)


def monster_denominator_series(order: int) -> tuple[LaurentSeries2, LaurentSeries2]:
    """Both sides of ``j(p) - j(q) = (p^-1 - q^-1) prod (1 - p^m q^n)^{a(mn)}``.

    ``order`` is the largest full-unit exponent of p and q that must be
    covered; both returned series know every coefficient of ``p^m q^n`` with
    ``m, n <= order`` (their total-degree order is ``4*order`` half-units).
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    total = 4 * order  # half-units, covers m + n <= 2*order
    inner = total + 2  # the prefactor has valuation -2
    lower = (-2, -2)
    j = j_qexp(2 * order)
    lhs = j.to_series2("p").truncate(total) - j.to_series2("q").truncate(total)
    prod = LaurentSeries2({(0, 0): Fraction(1)}, inner, (0, 0))
    for m in range(1, inner // 2):
        for n in range(1, inner // 2):
            if 2 * (m + n) > inner:
                break
            a_mn = j_coeff(m * n)
            factor = _binomial_series_factor(2 * m, 2 * n, a_mn, inner, (0, 0))
            prod = series_mul(prod, factor).truncate(inner)
    pref = LaurentSeries2({(-2, 0): Fraction(1), (0, -2): Fraction(-1)}, None, lower)
    rhs = series_mul(pref, prod).truncate(total)
    lhs = lhs.with_lower(lower)
    return lhs, rhs

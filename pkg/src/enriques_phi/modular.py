"""Arbitrary-precision evaluation of eta, theta constants, lambda, j and W.

Every routine takes a :class:`HalfPlanePoint` (which carries its own target
precision in bits) and returns a :class:`ComplexAP`.  Internally the work is
done with 32 guard bits.  Eta and j are evaluated after reducing the argument
to the standard fundamental domain, so they converge at least like
``exp(-pi*sqrt(3)*n)``.  Theta constants are delegated to
:func:`mpmath.jtheta`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

__all__ = [
    "DEFAULT_PREC",
    "GUARD_BITS",
    "HalfPlanePoint",
    "ComplexAP",
    "parse_complex",
    "eta_eval",
    "theta_eval",
    "lambda_eval",
    "j_eval",
    "weber_eval",
    "reduce_to_fundamental_domain",
]

DEFAULT_PREC = 128
GUARD_BITS = 32

_NUM = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"


def _parse_real(text: str) -> mpmath.mpf:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        if mpmath.mpf(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return mpmath.mpf(num) / mpmath.mpf(den)
    return mpmath.mpf(text)


def _imag(mag: str | None, den: str | None) -> mpmath.mpf:
    value = _parse_real(mag) if mag else mpmath.mpf(1)
    if den is None:
        return value
    if int(den) == 0:
        raise ValueError("zero denominator")
    return value / int(den)


def parse_complex(text: str) -> mpmath.mpc:
    """Parse strings such as ``"2i"``, ``"5i/2"``, ``"1/2+3i"``, ``"-0.5-1.25i"`` or ``"i"``."""
    s = text.replace(" ", "").replace("I", "i").replace("j", "i")
    if not s:
        raise ValueError("empty complex literal")
    m = re.fullmatch(rf"({_NUM})?(?:([+-])({_NUM})?(?:\*)?i(?:/(\d+))?)?", s)
    if m and m.group(2) is not None:
        re_part = _parse_real(m.group(1)) if m.group(1) else mpmath.mpf(0)
        mag = _imag(m.group(3), m.group(4))
        return mpmath.mpc(re_part, mag if m.group(2) == "+" else -mag)
    m = re.fullmatch(rf"([+-]?)({_NUM})?(?:\*)?i(?:/(\d+))?", s)
    if m:
        mag = _imag(m.group(2), m.group(3))
        return mpmath.mpc(0, -mag if m.group(1) == "-" else mag)
    m = re.fullmatch(_NUM, s)
    if m:
        return mpmath.mpc(_parse_real(s), 0)
    raise ValueError(f"cannot parse complex number {text!r}")


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point of the upper half-plane with a target precision in bits."""

    re: mpmath.mpf
    im: mpmath.mpf
    prec: int = DEFAULT_PREC

    def __post_init__(self) -> None:
        with mp.workprec(self.prec + GUARD_BITS):
            object.__setattr__(self, "re", mpmath.mpf(self.re))
            object.__setattr__(self, "im", mpmath.mpf(self.im))
        if not (mpmath.isfinite(self.re) and mpmath.isfinite(self.im)):
            raise ValueError("non-finite coordinate")
        if self.im <= 0:
            raise ValueError("imaginary part must be positive")

    @classmethod
    def from_value(cls, z, prec: int = DEFAULT_PREC) -> HalfPlanePoint:
        if isinstance(z, HalfPlanePoint):
            return cls(z.re, z.im, prec)
        if isinstance(z, str):
            with mp.workprec(prec + GUARD_BITS):
                z = parse_complex(z)
        if isinstance(z, (int, float, Fraction)):
            raise ValueError("a real number is not in the upper half-plane")
        with mp.workprec(prec + GUARD_BITS):
            z = mpmath.mpc(z)
        return cls(z.real, z.imag, prec)

    @property
    def value(self) -> mpmath.mpc:
        return mpmath.mpc(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(self.value)

    def __str__(self) -> str:
        return f"{mpmath.nstr(self.re, 12)}{'+' if self.im >= 0 else '-'}{mpmath.nstr(abs(self.im), 12)}i"


@dataclass(frozen=True)
class ComplexAP:
    """A complex value together with the precision (bits) it is claimed to."""

    value: mpmath.mpc
    prec: int

    @property
    def re(self) -> mpmath.mpf:
        return self.value.real

    @property
    def im(self) -> mpmath.mpf:
        return self.value.imag

    def _wrap(self, other, op):
        if isinstance(other, ComplexAP):
            return ComplexAP(op(self.value, other.value), min(self.prec, other.prec))
        return ComplexAP(op(self.value, other), self.prec)

    def __add__(self, other):
        return self._wrap(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._wrap(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._wrap(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(other, lambda a, b: a / b)

    def __pow__(self, k: int):
        return ComplexAP(self.value**k, self.prec)

    def __abs__(self):
        return abs(self.value)

    def __complex__(self) -> complex:
        return complex(self.value)

    def digits(self) -> int:
        return max(1, int(self.prec * 0.30103))

    def __str__(self) -> str:
        return mpmath.nstr(self.value, min(self.digits(), 30))


def _work(t: HalfPlanePoint) -> int:
    return t.prec + GUARD_BITS


def reduce_to_fundamental_domain(tau: mpmath.mpc, max_steps: int = 10_000):
    """Move ``tau`` into ``|Re| <= 1/2, |tau| >= 1``.

    Returns ``(tau_reduced, steps)`` where ``steps`` is the list of generator
    applications ``("T", n)`` (translation by -n) and ``("S", None)``.
    """
    steps: list[tuple[str, int | None]] = []
    for _ in range(max_steps):
        n = int(mpmath.nint(tau.real))
        if n:
            tau = tau - n
            steps.append(("T", n))
        if abs(tau) < 1 - mpmath.mpf(2) ** (-mp.prec // 2):
            tau = -1 / tau
            steps.append(("S", None))
        else:
            return tau, steps
    raise RuntimeError("fundamental domain reduction did not terminate")


def _eta_product(tau: mpmath.mpc) -> mpmath.mpc:
    q = mpmath.expj(2 * mp.pi * tau)
    eps = mpmath.mpf(2) ** (-mp.prec - 4)
    prod = mpmath.mpc(1)
    qn = q
    while abs(qn) > eps:
        prod *= 1 - qn
        qn *= q
    return mpmath.expj(mp.pi * tau / 12) * prod


def eta_eval(t: HalfPlanePoint) -> ComplexAP:
    """Dedekind eta with functional-equation reduction."""
    with mp.workprec(_work(t)):
        tau = t.value
        factor = mpmath.mpc(1)
        for _ in range(10_000):
            n = int(mpmath.nint(tau.real))
            if n:
                # eta(tau) = e^{pi i n/12} eta(tau - n)
                factor *= mpmath.expj(mp.pi * n / 12)
                tau = tau - n
            if abs(tau) < 1 - mpmath.mpf(2) ** (-mp.prec // 2):
                # eta(tau) = eta(-1/tau') with tau' = -1/tau, = sqrt(-i tau') eta(tau')
                tau_new = -1 / tau
                factor *= mpmath.sqrt(-1j * tau_new)
                tau = tau_new
            else:
                break
        value = factor * _eta_product(tau)
    return ComplexAP(+value, t.prec)


def theta_eval(kind: int, t: HalfPlanePoint) -> ComplexAP:
    """Theta constants theta_2, theta_3, theta_4 at ``tau`` (nome ``e^{pi i tau}``)."""
    if kind not in (2, 3, 4):
        raise ValueError("kind must be 2, 3 or 4")
    with mp.workprec(_work(t)):
        # shift Re(tau) into (-1, 1] so the quarter power of the nome is on
        # the principal branch; theta_2(tau + 2n) = i^n theta_2(tau)
        n = int(mpmath.floor((t.re + 1) / 2))
        nome = mpmath.expj(mp.pi * (t.value - 2 * n))
        value = mpmath.jtheta(kind, 0, nome)
        if kind == 2:
            value *= (1j) ** (n % 4)
    return ComplexAP(value, t.prec)


def lambda_eval(t: HalfPlanePoint) -> ComplexAP:
    """The modular lambda function theta_2^4 / theta_3^4."""
    with mp.workprec(_work(t)):
        value = theta_eval(2, t).value ** 4 / theta_eval(3, t).value ** 4
    return ComplexAP(value, t.prec)


def _j_reduced(tau: mpmath.mpc) -> mpmath.mpc:
    q = mpmath.expj(2 * mp.pi * tau)
    eps = mpmath.mpf(2) ** (-mp.prec - 8)
    e4_tail = mpmath.mpc(0)
    prod = mpmath.mpc(1)
    qn = q
    n = 1
    while abs(qn) * n**3 > eps:
        e4_tail += n**3 * qn / (1 - qn)
        prod *= 1 - qn
        qn *= q
        n += 1
    e4 = 1 + 240 * e4_tail
    return e4**3 / (q * prod**24)


def j_eval(t: HalfPlanePoint) -> ComplexAP:
    """Klein's j with fundamental-domain reduction."""
    with mp.workprec(_work(t)):
        tau, _ = reduce_to_fundamental_domain(t.value)
        value = _j_reduced(tau)
    return ComplexAP(value, t.prec)


def weber_eval(t: HalfPlanePoint) -> ComplexAP:
    """``W(t) = 2^12 eta(2t)^24 / eta(t)^24``."""
    with mp.workprec(_work(t)):
        t2 = HalfPlanePoint(2 * t.re, 2 * t.im, t.prec)
        value = 4096 * (eta_eval(t2).value / eta_eval(t).value) ** 24
    return ComplexAP(value, t.prec)

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enriques_phi.qseries import (
    LaurentSeries1,
    LaurentSeries2,
    NotInvertibleError,
    TruncationError,
    c_coeffs,
    c_value,
    divide_by_homogeneous,
    eta_quotient_qexp,
    in_unit_class,
    j_coeff,
    j_qexp,
    monster_denominator_series,
    series_mul,
    series_pow_int,
)


def _naive_product(factors, n):
    """prod_k prod_m (1 - q^{km})^e by repeated multiplication of integer lists."""
    out = [1] + [0] * n
    for k, e in factors:
        for m in range(1, n // k + 1):
            step = k * m
            for _ in range(abs(e)):
                if e > 0:
                    out = [out[i] - (out[i - step] if i >= step else 0) for i in range(n + 1)]
                else:
                    # divide by (1 - q^step): running sum
                    for i in range(step, n + 1):
                        out[i] += out[i - step]
    return out


def test_eta_quotient_matches_naive_product():
    factors = [(1, -8), (2, 8), (4, -8)]
    s = eta_quotient_qexp(factors, 20)
    assert s.offset == -1
    assert [s.coefficient(i) for i in range(21)] == _naive_product(factors, 20)


def test_c_coefficients_leading_values():
    c = c_coeffs(4)
    assert c[-1] == 1
    assert c[0] == 8
    oracle = _naive_product([(1, -8), (2, 8), (4, -8)], 6)
    assert [c[n] for n in range(-1, 5)] == oracle[:6]
    assert c_value(-2) == 0
    assert c_value(3) == c[3]


def test_c_coefficients_positive_and_increasing():
    c = c_coeffs(30)
    assert c[1] == 36
    assert all(c[n] < c[n + 1] for n in range(-1, 30))


def test_j_qexp_known_coefficients():
    j = j_qexp(3)
    assert j.coefficient(-1) == 1
    assert j.coefficient(0) == 744
    assert j.coefficient(1) == 196884
    assert j.coefficient(2) == 21493760
    assert j.coefficient(3) == 864299970
    assert j_coeff(0) == 0
    assert j_coeff(1) == 196884


@pytest.mark.parametrize("order", [1, 4, 8])
def test_monster_denominator_exact(order):
    lhs, rhs = monster_denominator_series(order)
    for m in range(-1, order + 1):
        for n in range(-1, order + 1):
            assert lhs.coefficient(2 * m, 2 * n) == rhs.coefficient(2 * m, 2 * n)
    assert lhs.is_integral() and rhs.is_integral()


def test_truncation_is_enforced():
    x = LaurentSeries2.polynomial({(1, 0): 1}, order=3)
    with pytest.raises(TruncationError):
        x.coefficient(2, 2)
    with pytest.raises(ValueError):
        LaurentSeries2({(-1, 0): 1}, 4, (0, 0))


def test_divide_by_homogeneous_and_unit_class():
    p, q = LaurentSeries2.monomial(2, 0, order=10), LaurentSeries2.monomial(0, 2, order=10)
    lead = (p - q) * (p - q)
    x = series_mul(lead, LaurentSeries2.one(10) + LaurentSeries2.monomial(1, 1, 3, order=10))
    assert in_unit_class(x, lead)
    assert not in_unit_class(x * 2, lead)
    y = divide_by_homogeneous(x, lead)
    assert y.coefficient(0, 0) == 1 and y.coefficient(1, 1) == 3


def test_inverse_of_non_unit_fails():
    x = LaurentSeries2.polynomial({(1, 0): 1, (0, 1): 1}, order=6)
    with pytest.raises(NotInvertibleError):
        series_pow_int(x, -1)


def test_json_roundtrip():
    x = LaurentSeries2.polynomial({(-2, 0): 3, (1, 4): Fraction(-1, 7)}, order=9)
    assert LaurentSeries2.from_json(x.to_json()) == x
    s = eta_quotient_qexp([(1, 24)], 5)
    assert LaurentSeries1.from_json_obj(s.to_json_obj()) == s


coeffs = st.integers(min_value=-5, max_value=5)
exps = st.tuples(st.integers(0, 4), st.integers(0, 4))
polys = st.dictionaries(exps, coeffs, max_size=6)


def _series(d, order=8):
    return LaurentSeries2(d, order, (0, 0))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    x, y, z = _series(a), _series(b), _series(c)
    assert series_mul(x, y) == series_mul(y, x)
    assert series_mul(series_mul(x, y), z) == series_mul(x, series_mul(y, z))
    assert series_mul(x, y + z) == series_mul(x, y) + series_mul(x, z)
    assert x - x == LaurentSeries2.zero(8)


@settings(max_examples=60, deadline=None)
@given(polys, st.integers(-3, 3))
def test_unit_inverse(a, k):
    a = dict(a)
    a[(0, 0)] = 1
    x = _series(a)
    inv = series_pow_int(x, -1)
    assert series_mul(x, inv) == LaurentSeries2.one(8)
    assert series_mul(series_pow_int(x, k), series_pow_int(x, -k)) == LaurentSeries2.one(8)


@settings(max_examples=40, deadline=None)
@given(polys)
def test_swap_is_involution(a):
    x = _series(a)
    assert x.swap().swap() == x

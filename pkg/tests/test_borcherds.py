from __future__ import annotations

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from enriques_phi.borcherds import (
    _E8_STD,
    ExponentMap,
    ProductParams,
    _engine,
    _evaluate,
    automorphy_defect,
    c_of,
    expand_exponent_map,
    kprime_leading_qexp,
    petersson_norm,
    phi1_eval,
    phi2_eval,
    phi_gamma_eval,
    phi_gamma_leading_qexp,
    phi_kprime_level1,
    phi_kprime_level2,
)
from enriques_phi.lattice import E8_CARTAN
from enriques_phi.modular import HalfPlanePoint
from enriques_phi.qseries import LaurentSeries2, c_coeffs

P2 = LaurentSeries2.monomial(2, 0)
Q2 = LaurentSeries2.monomial(0, 2)
PQ = LaurentSeries2.monomial(1, 1)

LEADING = {
    "0,0,1/2,1/2": -256 * (P2 - PQ * 2 + Q2),
    "1/2,0,1/2,1/2": -256 * (P2 + PQ * 2 + Q2),
    "0,0,0,1/2": -256 * Q2,
    "1/2,0,0,1/2": -256 * Q2,
    "0,0,1/2,0": -256 * P2,
    "1/2,0,1/2,0": -256 * P2,
    "1/2,0,0,0": LaurentSeries2.monomial(2, 2, 65536),
}


def _rel(a, b):
    return float(abs(a - b) / abs(b))


def test_c_of_matches_series():
    c = c_coeffs(40)
    assert all(c_of(n) == c[n] for n in range(-1, 41))
    assert c_of(-2) == 0


def test_leading_terms(lambda_gammas):
    for label, lg in lambda_gammas.items():
        series = phi_gamma_leading_qexp(lg, 4)
        assert series.is_integral()
        lead = series.leading_part()
        if lg.level == 1:
            assert lead == LaurentSeries2.one()
        else:
            assert lead == LEADING[label], label


def test_level1_odd_forms_are_units(lambda_gammas):
    for lg in lambda_gammas.values():
        if lg.level == 1:
            series = phi_gamma_leading_qexp(lg, 4)
            assert series.coefficient(0, 0) == 1
            assert all(a >= 0 and b >= 0 for a, b in series.terms)


def test_even_coordinate_basis_has_cartan_gram():
    assert (_E8_STD @ _E8_STD.T == np.array(E8_CARTAN)).all()


@pytest.mark.parametrize("label", ["1/2,1/2,0,0", "0,1/2,0,1/2"])
def test_level1_residue_table_matches_enumeration(lambda_gammas, label):
    eng = _engine(lambda_gammas[label])
    for A in range(-1, 4):
        for B in range(-1, 4):
            if A * B < 0 or (A, B) == (0, 0):
                continue
            fast = sorted(eng.bin_terms(A, B))
            eng.cache.pop((A, B), None)
            slow = sorted(eng.bin_terms(A, B, enumerate_e8=True))
            eng.cache.pop((A, B), None)
            assert [t[:2] for t in fast] == [t[:2] for t in slow], (A, B)


def test_formal_and_numeric_expansions_agree(lambda_gammas):
    t1, t2 = HalfPlanePoint.from_value("5i"), HalfPlanePoint.from_value("0.3+6i")
    for label in ("0,0,1/2,1/2", "0,0,0,1/2", "1/2,1/2,0,0"):
        lg = lambda_gammas[label]
        series = phi_gamma_leading_qexp(lg, 6)
        with mp.workprec(160):
            P = mpmath.expj(mp.pi * t1.value)
            Q = mpmath.expj(mp.pi * t2.value)
            formal = series.evaluate(P, Q)
        value = phi_gamma_eval(lg, t1, t2).value.value
        assert _rel(value, formal) < 1e-12, label


def test_odd_level2_near_cusp(lambda_gammas):
    t1, t2 = HalfPlanePoint.from_value("6i"), HalfPlanePoint.from_value("7i")
    P, Q = mpmath.exp(-6 * mp.pi), mpmath.exp(-7 * mp.pi)
    for label, sign in (("0,0,1/2,1/2", -1), ("1/2,0,1/2,1/2", 1)):
        value = phi_gamma_eval(lambda_gammas[label], t1, t2).value.value
        assert _rel(value, -256 * (P + sign * Q) ** 2) < 1e-6


def test_odd_diagonal_vanishing(lambda_gammas):
    v = phi_gamma_eval(lambda_gammas["0,0,1/2,1/2"], "2i", "2i")
    assert v.vanishes and v.value.value == 0


def test_truncation_is_stable(lambda_gammas):
    lg = lambda_gammas["1/2,0,1/2,1/2"]
    base = phi_gamma_eval(lg, "2i", "3i")
    wider = phi_gamma_eval(lg, "2i", "3i", ProductParams(height_cutoff=1.5 * base.height))
    assert wider.terms_used > base.terms_used
    assert float(abs(wider.value.value - base.value.value) / abs(base.value.value)) <= base.tail_bound + 1e-30


def test_divergent_point_is_reported(lambda_gammas):
    with pytest.raises(ArithmeticError):
        phi_gamma_eval(lambda_gammas["0,1/2,0,0"], "1+0.3i", "0.5i")


def test_petersson_norm_is_translation_invariant(lambda_gammas):
    lg = lambda_gammas["0,0,0,1/2"]
    a = petersson_norm(lg, "0.2+2.5i", "3i")
    b = petersson_norm(lg, "2.2+2.5i", "3i")
    assert abs(a - b) / a < 1e-20


def test_automorphy_one_pair(lambda_gammas):
    lg = lambda_gammas["0,1/2,1/2,0"]
    assert automorphy_defect(lg, [[1, 0], [2, 1]], [[1, 0], [0, 1]], "-0.5+0.5i", "0.1+12i") < 1e-10
    with pytest.raises(ValueError):
        automorphy_defect(lg, [[1, 1], [0, 1]], [[1, 0], [0, 1]], "3i", "4i")


def test_kprime_level2_leading_and_zero():
    s = kprime_leading_qexp(2, 4)
    assert s == LaurentSeries2.polynomial({(0, 2): 256, (0, 4): 2048, (2, 0): -256, (4, 0): -2048}, 4)
    v = phi_kprime_level2("2i", "2i")
    assert v.vanishes


def test_kprime_level2_near_cusp():
    v = phi_kprime_level2("4i", "5i").value.value
    q1, q2 = mpmath.exp(-8 * mp.pi), mpmath.exp(-10 * mp.pi)
    assert _rel(v, 256 * (q2 - q1)) < 1e-8


def test_kprime_level1_tends_to_one():
    v = phi_kprime_level1("4i", "5i").value.value
    assert abs(v - 1) < 1e-8


@pytest.mark.parametrize("z1,z2", [("i", "4i"), ("0.3+1.2i", "-0.2+3i")])
def test_change_of_chart_constant(z1, z2):
    with mp.workprec(160):
        z = HalfPlanePoint.from_value(z1)
        w1 = HalfPlanePoint.from_value(-1 / (2 * z.value))
        lhs = phi_kprime_level2(z, z2).value.value
        rhs = phi_kprime_level1(w1, z2).value.value
        ratio = lhs * z.value**4 / rhs
    assert abs(ratio + 1) < 1e-10


def test_generic_path_matches_fast_path():
    w_num = [mpmath.mpc(0, 1.1), mpmath.mpc(0, 1.3)] + [mpmath.mpc(0)] * 8
    fast = phi2_eval(w_num).value.value
    shifted = list(w_num)
    shifted[2] = mpmath.mpc(1e-300, 0)  # forces the vector-by-vector path
    slow = phi2_eval(shifted).value.value
    assert _rel(slow, fast) < 1e-10


@pytest.mark.parametrize("fn", [phi1_eval, phi2_eval])
def test_generic_path_lattice_translation(fn):
    w = [mpmath.mpc(0.1, 1.6), mpmath.mpc(-0.2, 1.4)] + [mpmath.mpc(0.05 * k, 0.02) for k in range(8)]
    shifted = list(w)
    shifted[2] += 1
    shifted[9] += 1
    a, b = fn(w).value.value, fn(shifted).value.value
    assert _rel(b, a) < 1e-10


small_maps = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.sampled_from([1, -1])).filter(lambda k: k[0] + k[1] > 0),
    st.integers(-3, 3),
    max_size=5,
)


@settings(max_examples=40, deadline=None)
@given(small_maps, st.sampled_from([1, 2]))
def test_exponent_map_formal_vs_numeric(factors, kind):
    em = ExponentMap(kind, 3, 1, 0, {k: v for k, v in factors.items() if v})
    order = 10
    # positive-degree factors are supplied through the callback
    series = expand_exponent_map(ExponentMap(kind, 3, 1, 0), order, lambda D: em)
    t1, t2 = mpmath.mpc(0.1, 2.5), mpmath.mpc(-0.3, 2.2)
    with mp.workprec(120):
        value, _ = _evaluate(em, t1, t2)
        formal = series.evaluate(mpmath.expj(mp.pi * t1), mpmath.expj(mp.pi * t2))
        assert abs(value - formal) <= mpmath.exp(-mp.pi * 2.2) ** (order + 1) * 10**6

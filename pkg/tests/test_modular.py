from __future__ import annotations

import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from enriques_phi.modular import (
    HalfPlanePoint,
    eta_eval,
    j_eval,
    lambda_eval,
    parse_complex,
    reduce_to_fundamental_domain,
    theta_eval,
    weber_eval,
)
from enriques_phi.qseries import eta_quotient_qexp, j_qexp

ORDER = 80


def _eta_series(factors, tau, nome_scale=2):
    """Substitute ``q = e^{nome_scale * pi i tau}`` into an eta quotient expansion."""
    s = eta_quotient_qexp(factors, ORDER)
    x = nome_scale * mp.pi * 1j * tau
    return s.evaluate(mpmath.exp(x), mpmath.exp(x * s.offset))


# each entry: evaluator, q-series oracle. Theta constants use s = tau/2 so the
# eta quotients are in q_s = e^{pi i tau}.
ORACLES = {
    "eta": (eta_eval, lambda t: _eta_series([(1, 1)], t)),
    "theta2": (lambda p: theta_eval(2, p), lambda t: 2 * _eta_series([(4, 2), (2, -1)], t, 1)),
    "theta3": (lambda p: theta_eval(3, p), lambda t: _eta_series([(2, 5), (1, -2), (4, -2)], t, 1)),
    "theta4": (lambda p: theta_eval(4, p), lambda t: _eta_series([(1, 2), (2, -1)], t, 1)),
    "lambda": (lambda_eval, lambda t: 16 * _eta_series([(1, 8), (4, 16), (2, -24)], t, 1)),
    "weber": (weber_eval, lambda t: 4096 * _eta_series([(2, 24), (1, -24)], t)),
    "j": (j_eval, lambda t: j_qexp(ORDER).evaluate(mpmath.exp(2j * mp.pi * t))),
}


def _random_points(n=20, seed=20261018):
    rng = random.Random(seed)
    return [(rng.uniform(-1.5, 1.5), rng.uniform(1.0, 4.0)) for _ in range(n)]


@pytest.mark.parametrize("name", sorted(ORACLES))
def test_evaluation_matches_q_series(name):
    evaluate, oracle = ORACLES[name]
    worst = 0.0
    for re_part, im_part in _random_points():
        p = HalfPlanePoint(re_part, im_part, 128)
        value = evaluate(p).value
        with mp.workprec(160):
            expected = oracle(p.value)
        worst = max(worst, float(abs(value - expected) / abs(expected)))
    assert worst <= 1e-10


def test_parse_complex_forms():
    assert parse_complex("2i") == mpmath.mpc(0, 2)
    assert parse_complex("5i/2") == mpmath.mpc(0, 2.5)
    assert parse_complex("1/2+3i") == mpmath.mpc(0.5, 3)
    assert parse_complex("-0.5-1.25i") == mpmath.mpc(-0.5, -1.25)
    assert parse_complex("i") == mpmath.mpc(0, 1)
    for bad in ("", "abc", "1+", "i/0"):
        with pytest.raises(ValueError):
            parse_complex(bad)


def test_half_plane_rejects_lower_half():
    with pytest.raises(ValueError):
        HalfPlanePoint.from_value("1-2i")
    with pytest.raises(ValueError):
        HalfPlanePoint.from_value(3)


def test_j_special_values():
    assert abs(j_eval(HalfPlanePoint.from_value("i")).value - 1728) < 1e-25
    rho = HalfPlanePoint.from_value(mpmath.mpc(-0.5, mpmath.sqrt(3) / 2))
    assert abs(j_eval(rho).value) < 1e-20


@pytest.mark.parametrize("tau", ["0.3+0.7i", "1.7+0.9i", "-2.4+1.1i"])
def test_jacobi_identity_and_lambda_relation(tau):
    p = HalfPlanePoint.from_value(tau)
    with mp.workprec(160):
        t2, t3, t4 = (theta_eval(k, p).value for k in (2, 3, 4))
        assert abs(t3**4 - t2**4 - t4**4) < 1e-30 * abs(t3**4)
        lam = lambda_eval(p).value
        assert abs(1 - lam - t4**4 / t3**4) < 1e-30


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 3))
def test_j_is_modular(x, y):
    with mp.workprec(200):
        tau = mpmath.mpc(x, y)
        a = j_eval(HalfPlanePoint.from_value(tau)).value
        b = j_eval(HalfPlanePoint.from_value(-1 / tau)).value
        c = j_eval(HalfPlanePoint.from_value(tau + 1)).value
        scale = max(1, abs(a))
        assert abs(a - b) / scale < 1e-25
        assert abs(a - c) / scale < 1e-25


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 3))
def test_eta_transformation(x, y):
    with mp.workprec(200):
        tau = mpmath.mpc(x, y)
        a = eta_eval(HalfPlanePoint.from_value(tau)).value
        b = eta_eval(HalfPlanePoint.from_value(-1 / tau)).value
        assert abs(b - mpmath.sqrt(-1j * tau) * a) <= 1e-25 * abs(b)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 3))
def test_theta2_translation(x, y):
    with mp.workprec(200):
        p = HalfPlanePoint(x, y)
        q = HalfPlanePoint(mpmath.mpf(x) + 2, y)
        a, b = theta_eval(2, p).value, theta_eval(2, q).value
        assert abs(b - 1j * a) <= 1e-25 * abs(a)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 3))
def test_fundamental_domain_reduction(x, y):
    tau, _ = reduce_to_fundamental_domain(mpmath.mpc(x, y))
    assert abs(tau.real) <= 0.5 + 1e-12
    assert abs(tau) >= 1 - 1e-12

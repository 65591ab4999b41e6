from __future__ import annotations

from fractions import Fraction

import pytest

from enriques_phi.enriques import (
    D2_EVEN,
    D2_ODD,
    fmt_gamma,
    gamma_by_name,
    gamma_classes,
    k_norm,
    odd_root_witness,
    pair_ambient,
    parse_gamma,
    period_point,
)
from enriques_phi.lattice import invariants, isotropic_level
from enriques_phi.modular import HalfPlanePoint


def test_class_counts():
    classes = gamma_classes()
    assert len(classes) == 15
    assert sum(g.is_odd for g in classes) == 6
    assert {(g.parity, g.level) for g in classes} == {("odd", 1), ("odd", 2), ("even", 1), ("even", 2)}
    assert sum(1 for g in classes if g.is_odd and g.level == 1) == 4
    assert sum(1 for g in classes if not g.is_odd and g.level == 2) == 5


def test_parity_is_k_norm_mod_two():
    for g in gamma_classes():
        assert (k_norm(g.name) % 2 == 1) == g.is_odd


def test_glue_vectors():
    for g in gamma_classes():
        e8_norm = pair_ambient((0,) * 4 + g.d2, (0,) * 4 + g.d2)
        assert e8_norm == (-1 if g.is_odd else -2 if g.d2 != tuple(Fraction(0) for _ in g.d2) else 0)
        assert g.d2 in (D2_ODD, D2_EVEN)
        # the glue vector has even norm so the overlattice stays even
        assert pair_ambient(g.glue, g.glue) % 2 == 0


def test_name_roundtrip():
    for g in gamma_classes():
        assert parse_gamma(fmt_gamma(g.name)) == g.name
        assert gamma_by_name(g.label) == g
    with pytest.raises(ValueError):
        gamma_by_name("0,0,0,0")


def test_lambda_gamma_is_the_enriques_lattice(lambda_gammas):
    for lg in lambda_gammas.values():
        assert invariants(lg.lattice) == ((2, 10), 10, 0)
        assert lg.m_gamma.signature == (1, 9)


def test_cusp_frame(lambda_gammas):
    for lg in lambda_gammas.values():
        ell = lg.level
        assert pair_ambient(lg.v, lg.v) == 0
        assert pair_ambient(lg.v_prime, lg.v_prime) == 0
        assert pair_ambient(lg.v, lg.v_prime) == ell
        assert isotropic_level(lg.lattice, lg.lattice_coords(lg.v)) == ell
        for x in (lg.rho, lg.rho_prime):
            assert pair_ambient(x, x) == 0
            assert pair_ambient(x, lg.v) == 0 and pair_ambient(x, lg.v_prime) == 0
            assert lg.in_m_gamma(x)
        assert pair_ambient(lg.rho, lg.rho_prime) == 2 // ell


def test_roots_by_parity(lambda_gammas):
    for lg in lambda_gammas.values():
        witness = odd_root_witness(lg)
        if lg.gamma.is_odd:
            assert witness is not None
            assert lg.lattice.norm(witness) == -2
        else:
            assert witness is None


def test_period_point_positive_cone(lambda_gammas):
    lg = lambda_gammas["0,0,1/2,1/2"]
    pp = period_point(lg, HalfPlanePoint.from_value("2i"), HalfPlanePoint.from_value("3i"))
    assert pp.im_norm > 0
    assert len(pp.coords) == 10


def test_period_point_im_norm_scales(lambda_gammas):
    lg = lambda_gammas["0,0,1/2,1/2"]
    a = period_point(lg, HalfPlanePoint.from_value("2i"), HalfPlanePoint.from_value("3i")).im_norm
    b = period_point(lg, HalfPlanePoint.from_value("4i"), HalfPlanePoint.from_value("3i")).im_norm
    assert abs(b / a - 2) < 1e-30

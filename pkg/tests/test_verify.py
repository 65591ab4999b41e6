from __future__ import annotations

import json

from enriques_phi.borcherds import ProductParams
from enriques_phi.verify import (
    Report,
    reports_to_json,
    verify_appendix,
    verify_denominator,
    verify_even_product,
    verify_main_theorem,
    verify_odd_leading,
)

FIELDS = {
    "check_name", "inputs", "lhs", "rhs", "abs_error", "rel_error",
    "tolerance", "pass", "runtime_ms", "params",
}


def test_report_json_schema():
    r = verify_denominator(2)
    obj = r.to_json_obj()
    assert FIELDS <= set(obj)
    assert obj["pass"] is True
    arr = json.loads(reports_to_json([r, r]))
    assert isinstance(arr, list) and len(arr) == 2


def test_report_is_deterministic_up_to_runtime():
    a = verify_denominator(3).to_json_obj()
    b = verify_denominator(3).to_json_obj()
    a.pop("runtime_ms"), b.pop("runtime_ms")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_denominator_and_appendix_pass():
    assert verify_denominator(8).passed
    r = verify_appendix()
    assert r.passed, r.details


def test_odd_leading_passes():
    r = verify_odd_leading(4)
    assert r.passed
    assert r.lhs == r.rhs


def test_main_theorem_diagonal_is_degenerate():
    r = verify_main_theorem("2i", "2i")
    assert r.status == "degenerate"
    assert r.passed


def test_even_product_off_axis():
    r = verify_even_product("3i", "4i")
    assert r.passed and r.rel_error < 1e-12
    assert r.tolerance == 1e-6


def test_summary_line_mentions_status():
    r = Report("x", {}, "1", "1", 0.0, 0.0, 1e-6, True, 1, {})
    assert r.summary_line().startswith("PASS")
    assert Report("y", {}, "1", "2", 1.0, 1.0, 1e-6, False, 1, {}).status == "fail"


def test_explicit_height_is_recorded():
    r = verify_even_product("3i", "4i", ProductParams(height_cutoff=12.0))
    assert r.params["height_cutoff"] == 12.0

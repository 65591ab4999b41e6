"""Identity checks with machine-readable reports.

Each ``verify_*`` function computes both sides of one identity independently
and returns a :class:`Report`.  Numerical checks compare relative errors with
a tolerance; exact series checks compare digests of the two sides.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable

import mpmath
from mpmath import mp

from .borcherds import (
    PhiValue,
    ProductParams,
    phi_gamma_eval,
    phi_gamma_leading_qexp,
    phi_kprime_level1,
    phi_kprime_level2,
)
from .enriques import GammaClass, build_lambda_gamma, gamma_classes
from .lattice import appendix_glue, invariants, sl2_lift_check, standard_lattice
from .modular import GUARD_BITS, HalfPlanePoint, eta_eval, j_eval, lambda_eval, weber_eval
from .qseries import (
    LaurentSeries2,
    format_series2,
    in_unit_class,
    monster_denominator_series,
    series_mul,
)

__all__ = [
    "Report",
    "verify_main_theorem",
    "verify_even_product",
    "verify_odd_leading",
    "verify_denominator",
    "verify_section8",
    "verify_appendix",
    "local_scale",
]

MAIN_POINTS = (("2i", "3i"), ("5i/2", "1/2+3i"), ("1+2i", "7i/2"))


@dataclass
class Report:
    check_name: str
    inputs: dict[str, Any]
    lhs: str
    rhs: str
    abs_error: float | None
    rel_error: float | None
    tolerance: float | None
    passed: bool
    runtime_ms: int
    params: dict[str, Any]
    status: str = ""
    details: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.status:
            self.status = "pass" if self.passed else "fail"

    def to_json_obj(self) -> dict[str, Any]:
        obj = asdict(self)
        obj["pass"] = obj.pop("passed")
        return obj

    def summary_line(self) -> str:
        err = "-" if self.rel_error is None else f"{self.rel_error:.2e}"
        tol = "-" if self.tolerance is None else f"{self.tolerance:.0e}"
        return f"{self.status.upper():10s} {self.check_name:28s} rel_err={err:>9s} tol={tol:>6s} {self.runtime_ms:>7d} ms"


def _num(x, digits: int = 20) -> str:
    return mpmath.nstr(x, digits)


def _point(x, prec: int) -> HalfPlanePoint:
    return x if isinstance(x, HalfPlanePoint) else HalfPlanePoint.from_value(x, prec)


def _rel(a, b) -> float:
    if b == 0:
        return float("inf") if a != 0 else 0.0
    return float(abs(a - b) / abs(b))


def _params_obj(params: ProductParams) -> dict[str, Any]:
    return {
        "height_cutoff": params.height_cutoff,
        "prec": params.prec,
        "tail_target": params.tail_target,
    }


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(1000 * (time.perf_counter() - self.t0))


def _gamma_values(tau, tau_prime, params, pred: Callable[[GammaClass], bool]) -> dict[str, PhiValue]:
    return {
        g.label: phi_gamma_eval(build_lambda_gamma(g), tau, tau_prime, params)
        for g in gamma_classes()
        if pred(g)
    }


def local_scale(g: GammaClass, tau: HalfPlanePoint, tau_prime: HalfPlanePoint) -> mpmath.mpf:
    """Sum of the absolute values of the leading homogeneous terms of the expansion at the point."""
    lg = build_lambda_gamma(g)
    series = phi_gamma_leading_qexp(lg, 4)
    lead = series.leading_part()
    aP = mpmath.exp(-mp.pi * tau.im)
    aQ = mpmath.exp(-mp.pi * tau_prime.im)
    return sum(abs(c) * aP**a * aQ**b for (a, b), c in lead.terms.items())


# --------------------------------------------------------------------------
# main identity and the even product


def verify_main_theorem(
    tau,
    tau_prime,
    params: ProductParams | None = None,
    tol: float = 1e-6,
    tail_tol: float = 1e-9,
) -> Report:
    """2^-96 (j(tau) - j(tau'))^12 against prod_odd Phi^6 / prod_even Phi^4, with two even-product variants."""
    params = params or ProductParams()
    with _Timer() as timer:
        tau, tau_prime = _point(tau, params.prec), _point(tau_prime, params.prec)
        odd = _gamma_values(tau, tau_prime, params, lambda g: g.is_odd)
        even = _gamma_values(tau, tau_prime, params, lambda g: not g.is_odd)
        with mp.workprec(params.prec + GUARD_BITS):
            lhs = mpmath.mpf(2) ** -96 * (j_eval(tau).value - j_eval(tau_prime).value) ** 12
            odd6 = mpmath.fprod(v.value.value ** 6 for v in odd.values())
            even4 = mpmath.fprod(v.value.value ** 4 for v in even.values())
            closed = (mpmath.mpf(2) ** 96 * eta_eval(tau).value ** 144 * eta_eval(tau_prime).value ** 144) ** 2
            tail = 6 * sum(v.tail_bound for v in odd.values()) + 4 * sum(v.tail_bound for v in even.values())
            vanishing = [k for k, v in odd.items() if v.vanishes]
            lam_gap = abs(lambda_eval(tau).value - lambda_eval(tau_prime).value)
            degenerate = bool(vanishing) or lam_gap <= mpmath.mpf(2) ** (-params.prec + 16)
            if degenerate:
                rhs_a = mpmath.mpc(0) if vanishing else odd6 / even4
                rhs_b = mpmath.mpc(0) if vanishing else odd6 / closed
                abs_err = float(max(abs(lhs - rhs_a), abs(lhs - rhs_b)))
                scale = float(abs(closed) ** 0.5) if closed != 0 else 1.0
                passed = abs_err <= tol * max(scale, 1.0) and bool(vanishing)
                status = "degenerate" if passed else "fail"
                rel_a = rel_b = None
                rel = None
            else:
                rhs_a = odd6 / even4
                rhs_b = odd6 / closed
                rel_a, rel_b = _rel(rhs_a, lhs), _rel(rhs_b, lhs)
                rel = max(rel_a, rel_b)
                abs_err = float(max(abs(lhs - rhs_a), abs(lhs - rhs_b)))
                passed = rel <= tol and tail <= tail_tol and _rel(even4, closed) <= tol
                status = ""
            variants = _rel(even4, closed)
    return Report(
        check_name="main",
        inputs={"tau": str(tau), "tau_prime": str(tau_prime)},
        lhs=_num(lhs),
        rhs=_num(rhs_a),
        abs_error=abs_err,
        rel_error=rel,
        tolerance=tol,
        passed=passed,
        runtime_ms=timer.ms,
        params={**_params_obj(params), "tail_tolerance": tail_tol},
        status=status,
        details=[
            {"name": "rhs_per_gamma_even", "value": _num(rhs_a), "rel_error": rel_a},
            {"name": "rhs_closed_form_even", "value": _num(rhs_b), "rel_error": rel_b},
            {"name": "even_variants_agree", "rel_error": variants},
            {"name": "total_log_tail_bound", "value": tail},
            {"name": "vanishing_odd_classes", "value": vanishing},
            {
                "name": "heights",
                "value": {k: v.height for k, v in {**odd, **even}.items()},
            },
        ],
    )


def verify_even_product(
    tau, tau_prime, params: ProductParams | None = None, tol: float = 1e-6
) -> Report:
    """prod_even Phi^2 against 2^96 eta(tau)^144 eta(tau')^144."""
    params = params or ProductParams()
    with _Timer() as timer:
        tau, tau_prime = _point(tau, params.prec), _point(tau_prime, params.prec)
        even = _gamma_values(tau, tau_prime, params, lambda g: not g.is_odd)
        with mp.workprec(params.prec + GUARD_BITS):
            lhs = mpmath.fprod(v.value.value ** 2 for v in even.values())
            rhs = mpmath.mpf(2) ** 96 * eta_eval(tau).value ** 144 * eta_eval(tau_prime).value ** 144
            rel = _rel(lhs, rhs)
            tail = 2 * sum(v.tail_bound for v in even.values())
    return Report(
        check_name="even",
        inputs={"tau": str(tau), "tau_prime": str(tau_prime)},
        lhs=_num(lhs),
        rhs=_num(rhs),
        abs_error=float(abs(lhs - rhs)),
        rel_error=rel,
        tolerance=tol,
        passed=rel <= tol,
        runtime_ms=timer.ms,
        params=_params_obj(params),
        details=[
            {"name": label, "value": _num(v.value.value), "tail_bound": v.tail_bound}
            for label, v in even.items()
        ]
        + [{"name": "total_log_tail_bound", "value": tail}],
    )


# --------------------------------------------------------------------------
# exact series checks


def _digest(x: LaurentSeries2) -> str:
    return hashlib.sha256(x.to_json().encode()).hexdigest()[:16]


def _poly(terms: dict[tuple[int, int], int]) -> LaurentSeries2:
    return LaurentSeries2.polynomial({k: Fraction(v) for k, v in terms.items()})


def verify_odd_leading(order: int = 4) -> Report:
    """The six odd products multiply to 2^16 (p - q)^2 (1 + m), with m known to ``order`` half-units."""
    with _Timer() as timer:
        series = {}
        for g in gamma_classes():
            if not g.is_odd:
                continue
            lg = build_lambda_gamma(g)
            lead_deg = 2 if g.level == 2 else 0
            series[g.label] = (g, phi_gamma_leading_qexp(lg, order + lead_deg))
        details = []
        ok = True
        expected_l2 = {
            "0,0,1/2,1/2": _poly({(2, 0): -256, (1, 1): 512, (0, 2): -256}),
            "1/2,0,1/2,1/2": _poly({(2, 0): -256, (1, 1): -512, (0, 2): -256}),
        }
        for label, (g, s) in series.items():
            lead = s.leading_part()
            if g.level == 1:
                good = lead == LaurentSeries2.one()
                want = "1"
            else:
                good = lead == expected_l2[label]
                want = format_series2(expected_l2[label])
            ok &= good
            details.append(
                {"name": label, "leading": format_series2(lead), "expected": want, "pass": good}
            )
        prod = LaurentSeries2.one()
        for _, s in series.values():
            prod = series_mul(prod, s)
        target = _poly({(4, 0): 65536, (2, 2): -131072, (0, 4): 65536})
        unit = in_unit_class(prod, target)
        ok &= unit
        lead = prod.leading_part()
        details.append({"name": "product_order", "value": prod.order})
        details.append({"name": "product_integral", "value": prod.is_integral()})
        ok &= prod.is_integral()
    return Report(
        check_name="odd-leading",
        inputs={"order": order},
        lhs=f"{format_series2(lead)} [{_digest(lead)}]",
        rhs=f"{format_series2(target)} [{_digest(target)}]",
        abs_error=None,
        rel_error=None,
        tolerance=None,
        passed=ok and _digest(lead) == _digest(target),
        runtime_ms=timer.ms,
        params={"order": order},
        details=details,
    )


def verify_denominator(order: int = 8) -> Report:
    """Exact coefficientwise check of the Monster denominator formula for p^m q^n, m, n <= order."""
    with _Timer() as timer:
        lhs, rhs = monster_denominator_series(order)
        keys = [
            (a, b)
            for a in range(-2, 2 * order + 1, 2)
            for b in range(-2, 2 * order + 1, 2)
        ]
        mism = [k for k in keys if _coeff(lhs, k) != _coeff(rhs, k)]
        equal = lhs == rhs and not mism
    return Report(
        check_name="denominator",
        inputs={"order": order},
        lhs=f"[{_digest(lhs)}] {len(lhs.terms)} terms",
        rhs=f"[{_digest(rhs)}] {len(rhs.terms)} terms",
        abs_error=None,
        rel_error=None,
        tolerance=None,
        passed=equal and _digest(lhs) == _digest(rhs),
        runtime_ms=timer.ms,
        params={"order": order},
        details=[{"name": "mismatched_monomials", "value": [list(k) for k in mism[:20]]}],
    )


def _coeff(x: LaurentSeries2, key: tuple[int, int]) -> Fraction:
    return x.terms.get(key, Fraction(0))


# --------------------------------------------------------------------------
# the identities on the K' sublattice and the theta quotients


def _theta_quotients(lam) -> list:
    return [lam * (lam - 1), lam / (lam - 1) ** 2, (lam - 1) / lam**2]


def _match_multiset(values: list, targets: list) -> tuple[float, list[int]]:
    """Best one-to-one matching (by exhaustive search over permutations of nine targets)."""
    n = len(values)
    cost = [[_rel(v, t) for t in targets] for v in values]
    best = (float("inf"), [])
    # branch and bound over assignments; n = 9 keeps this small
    def rec(i, used, worst, chosen):
        nonlocal best
        if worst >= best[0]:
            return
        if i == n:
            best = (worst, chosen[:])
            return
        for j in sorted(range(n), key=lambda j: cost[i][j]):
            if j in used:
                continue
            chosen.append(j)
            used.add(j)
            rec(i + 1, used, max(worst, cost[i][j]), chosen)
            used.discard(j)
            chosen.pop()

    rec(0, set(), 0.0, [])
    return best


def verify_section8(
    z1="4i",
    z2="5i",
    params: ProductParams | None = None,
    tol_a: float = 1e-5,
    tol_b: float = 1e-4,
    tol_c: float = 1e-3,
) -> Report:
    """Theta-quotient multiset, K' cusp behaviour and the Psi consistency relation."""
    params = params or ProductParams()
    with _Timer() as timer:
        z1, z2 = _point(z1, params.prec), _point(z2, params.prec)
        details: list[dict[str, Any]] = []
        with mp.workprec(params.prec + GUARD_BITS):
            # (a) multiset of the nine even sixth powers over eta^48 eta'^48
            even = _gamma_values(z1, z2, params, lambda g: not g.is_odd)
            eta48 = eta_eval(z1).value ** 48 * eta_eval(z2).value ** 48
            values = [v.value.value ** 6 / eta48 for v in even.values()]
            xs = _theta_quotients(lambda_eval(z1).value)
            ys = _theta_quotients(lambda_eval(z2).value)
            corrected = [mpmath.mpf(2) ** 32 * (x * y) ** -4 for x in xs for y in ys]
            literal = [x * y for x in xs for y in ys]
            err_a, perm = _match_multiset(values, corrected)
            err_lit, _ = _match_multiset(values, literal)
            pass_a = err_a <= tol_a
            details.append(
                {
                    "name": "a_theta_quotient_multiset",
                    "rel_error": err_a,
                    "tolerance": tol_a,
                    "pass": pass_a,
                    "form": "Phi^6/(eta^48 eta'^48) = 2^32 (X(z1) Y(z2))^-4",
                    "assignment": {lbl: int(j) for lbl, j in zip(even, perm)},
                }
            )
            details.append(
                {
                    "name": "a_literal_products_diagnostic",
                    "rel_error": err_lit,
                    "note": "the products X*Y themselves do not match; reported only",
                }
            )
            # (b) the K' restriction at both cusps and the change of chart
            q1 = mpmath.expj(2 * mp.pi * z1.value)
            q2 = mpmath.expj(2 * mp.pi * z2.value)
            phi2 = phi_kprime_level2(z1, z2, params)
            ratio_b2 = phi2.value.value / (256 * (q2 - q1))
            phi1 = phi_kprime_level1(z1, z2, params)
            err_b2 = float(abs(ratio_b2 - 1))
            err_b1 = float(abs(phi1.value.value - 1))
            pass_b = err_b2 <= tol_b and err_b1 <= tol_b
            details.append(
                {"name": "b_level2_leading", "ratio": _num(ratio_b2), "rel_error": err_b2, "tolerance": tol_b}
            )
            details.append(
                {"name": "b_level1_constant", "value": _num(phi1.value.value), "rel_error": err_b1, "tolerance": tol_b}
            )
            zc1 = HalfPlanePoint.from_value("i", params.prec)
            zc2 = HalfPlanePoint.from_value("4i", params.prec)
            wc1 = HalfPlanePoint.from_value(-1 / (2 * zc1.value), params.prec)
            lhs_x = phi_kprime_level2(zc1, zc2, params).value.value
            rhs_x = zc1.value ** -4 * phi_kprime_level1(wc1, zc2, params).value.value
            const = lhs_x / rhs_x
            pass_x = float(abs(abs(const) - 1)) <= tol_b
            pass_b &= pass_x
            details.append(
                {
                    "name": "b_change_of_chart",
                    "point": "z = (i, 4i), w = (-1/(2 z1), z2)",
                    "observed_constant": _num(const, 12),
                    "form": "Phi_level2(z) = C z1^-4 Phi_level1(w)",
                    "pass": pass_x,
                }
            )
            # (c) Psi at both cusps
            W1, W2 = weber_eval(z1).value, weber_eval(z2).value
            G = (W1 - W2) ** 2 / (W1 * W2)
            psi = mpmath.mpf(2) ** -48 * phi2.value.value ** 9 * G**-4
            target2 = 2**24 * (q1 * q2) ** 4 * (q2 - q1)
            err_c2 = float(abs(psi / target2 - 1))
            # compare magnitudes: Phi is negative here, so complex logs would pick up branch terms
            observed_k = mpmath.log(abs(target2 * mpmath.mpf(2) ** 48 * G**4)) / mpmath.log(abs(phi2.value.value))
            w1, w2 = z1, z2
            y1 = HalfPlanePoint.from_value(-1 / (2 * w1.value), params.prec)
            V1, V2 = weber_eval(y1).value, weber_eval(w2).value
            G1 = (V1 - V2) ** 2 / (V1 * V2)
            psi1 = mpmath.mpf(2) ** -48 * phi1.value.value ** 9 * G1**-4
            p1 = mpmath.expj(2 * mp.pi * w1.value)
            p2 = mpmath.expj(2 * mp.pi * w2.value)
            err_c1 = float(abs(psi1 / (p1 * p2) ** 4 - 1))
            pass_c = err_c2 <= tol_c and err_c1 <= tol_c
            details.append({"name": "c_level2_constant_2^24", "rel_error": err_c2, "tolerance": tol_c})
            details.append({"name": "c_level1_leading", "rel_error": err_c1, "tolerance": tol_c})
            details.append(
                {
                    "name": "c_observed_exponent",
                    "value": _num(observed_k, 10),
                    "note": "exponent k with 2^-48 Phi^k G^-4 = 2^24 (q1 q2)^4 (q2 - q1); a display with k = 4 does not fit",
                }
            )
    worst = max(err_a, err_b2, err_b1, err_c2, err_c1)
    return Report(
        check_name="section8",
        inputs={"z1": str(z1), "z2": str(z2)},
        lhs=_num(psi),
        rhs=_num(target2),
        abs_error=None,
        rel_error=worst,
        tolerance=max(tol_a, tol_b, tol_c),
        passed=pass_a and pass_b and pass_c,
        runtime_ms=timer.ms,
        params={**_params_obj(params), "tol_a": tol_a, "tol_b": tol_b, "tol_c": tol_c},
        details=details,
    )


# --------------------------------------------------------------------------
# glue lattice identities


def verify_appendix() -> Report:
    """Glue lattice invariants, characteristic-vector norms and SL2 lifts."""
    with _Timer() as timer:
        glue = appendix_glue()
        inv = invariants(glue)
        details = [{"name": "glue_invariants", "value": [list(inv[0]), inv[1], inv[2]]}]
        ok = inv == ((2, 10), 10, 0)
        I = standard_lattice("I29_2")
        half = Fraction(1, 2)
        l2 = (Fraction(3, 2),) + (-half,) * 10
        n2 = sum(l2[i] * I.gram[i][j] * l2[j] for i in range(11) for j in range(11))
        n1 = Fraction(-2) * half * half
        details.append({"name": "characteristic_norms", "value": [str(n1), str(n2)]})
        ok &= n1 == Fraction(-1, 2) and n2 == Fraction(1, 2)
        gens = {"S": ((0, -1), (1, 0)), "T": ((1, 1), (0, 1)), "-I": ((-1, 0), (0, -1))}
        for name, g in gens.items():
            try:
                sl2_lift_check(g)
                good = True
            except ArithmeticError:
                good = False
            ok &= good
            details.append({"name": f"lift_{name}", "pass": good})
    return Report(
        check_name="appendix",
        inputs={},
        lhs=str([list(inv[0]), inv[1], inv[2]]),
        rhs="[[2, 10], 10, 0]",
        abs_error=None,
        rel_error=None,
        tolerance=None,
        passed=ok,
        runtime_ms=timer.ms,
        params={},
        details=details,
    )


def reports_to_json(reports: list[Report]) -> str:
    return json.dumps([r.to_json_obj() for r in reports], indent=2, sort_keys=True, default=str)


__all__ += ["reports_to_json", "MAIN_POINTS"]

from fractions import Fraction

import sympy as sp

from refined_tr.algebra import RatFunc, parse_expr, var
from refined_tr.qtop import (
    Descent, check_qtop_consistency, compute_qtop, emit_quantum_curve, wkb_coefficients,
)
from refined_tr.recursion import FULL, QTOP
from refined_tr.validate import refinement_coefficient


X = var("x")


def _airy_s_oracle(kmax):
    """S_k from Q_k = 0 (k >= 1), solved with sympy; S_{-1} = z, d/dx = d/dz / 2z."""
    z = sp.Symbol("z")
    S = {-1: z}
    for k in range(1, kmax + 2):
        rest = sum(S[i] * S[k - 2 - i] for i in range(0, k - 1))
        rest += sp.diff(S[k - 2], z) / (2 * z)
        S[k - 1] = sp.simplify(-rest / (2 * S[-1]))
    return S


def test_lowest_levels_coincide(airy_store):
    assert airy_store.get(0, 3, QTOP).expr == airy_store.get(0, 3, FULL).expr
    top = refinement_coefficient(airy_store.get(1, 2, FULL).expr, 1)
    assert airy_store.get(1, 2, QTOP).expr == top


def test_consistency(airy_store, appendix_store):
    assert check_qtop_consistency(airy_store, 2, 1).passed
    assert check_qtop_consistency(appendix_store, 1, 2).passed
    assert check_qtop_consistency(appendix_store, 0, 3).passed


def test_qtop_has_no_q(airy, airy_store):
    assert not compute_qtop(airy_store, airy, Fraction(5, 2), 1).expr.involves("Q")


def test_airy_wkb_matches_riccati_oracle(airy, airy_store):
    wkb = wkb_coefficients(airy_store, airy, 6)
    oracle = _airy_s_oracle(6)
    for k in range(-1, 6):
        assert wkb.s(k) == parse_expr(str(oracle[k]).replace("**", "^")), k
    assert [str(wkb.s(k)) for k in range(-1, 3)] == ["z", "-1/4/z^2", "-5/32/z^5", "-15/64/z^8"]


def test_wkb_relation_both_curves(airy, airy_store, appendix, appendix_store):
    for curve, store in [(airy, airy_store), (appendix, appendix_store)]:
        wkb = wkb_coefficients(store, curve, 6)
        assert all(r.passed for r in wkb.reports)
        assert len(wkb.Q) == 7


def test_airy_quantum_curve(airy, airy_store):
    qc = emit_quantum_curve(airy_store, airy, 4)
    assert qc.operator() == "Δŷ² − x"
    assert qc.coefficients[0] == X
    assert all(q.is_zero() for q in qc.coefficients[1:])


def test_appendix_leading_coefficient(appendix, appendix_store):
    cfg = dict(appendix.config.parameters)
    l0, a = cfg["l0"], cfg["a"]
    k = 2 * l0 / a
    linf = -k * (1 + a * a) / 4
    qc = emit_quantum_curve(appendix_store, appendix, 1)
    assert qc.coefficients[0] == (X ** 2 + 4 * linf * X + 4 * l0 ** 2) / (4 * X ** 2)


def test_descended_q1_lifts_to_mu_term(appendix, appendix_store):
    wkb = wkb_coefficients(appendix_store, appendix, 1)
    w01 = appendix.omega01("z")
    mu_sum = RatFunc.constant(0)
    for p, mu in appendix.ramification.ptilde_plus:
        mu_sum = mu_sum + mu * appendix.eta(p, "z")
    expected = w01 * mu_sum / appendix.dx ** 2
    q1 = Descent(appendix)(wkb.Q[1])
    assert q1.substitute({"x": appendix.x}) == expected


def test_operator_text_with_higher_terms(appendix, appendix_store):
    text = emit_quantum_curve(appendix_store, appendix, 2).operator()
    assert text.startswith("Δŷ² − ") and "ε₁" in text

"""Engine values on Airy against the undetermined-coefficient oracle in
oracles/airy_ansatz.py (values below are its output, frozen)."""

from fractions import Fraction

import pytest

from refined_tr.algebra import parse_expr, var
from refined_tr.recursion import (
    FULL, QTOP, MissingDependency, RecursionStore, assemble_rec, compute_omega, compute_omega_alt,
)
from refined_tr.validate import refinement_coefficient

ORACLE = {
    (0, 3): "-1/(2*z0^2*z1^2*z2^2)",
    (1, 2): "Q*(z0^4 + 3*z0^3*z1 + 3*z0^2*z1^2 + 3*z0*z1^3 + z1^4)/(2*z0^3*z1^3*(z0 + z1)^3)",
    (2, 1): "-(5*Q^2 + 1)/(16*z0^4)",
    (3, 1): "-Q*(30*Q^2 + 17)/(64*z0^7)",
    (2, 2): "(25*Q^2*z0^8 + 100*Q^2*z0^7*z1 + 165*Q^2*z0^6*z1^2 + 176*Q^2*z0^5*z1^3"
            " + 184*Q^2*z0^4*z1^4 + 176*Q^2*z0^3*z1^5 + 165*Q^2*z0^2*z1^6 + 100*Q^2*z0*z1^7"
            " + 25*Q^2*z1^8 + 5*z0^8 + 20*z0^7*z1 + 33*z0^6*z1^2 + 32*z0^5*z1^3 + 28*z0^4*z1^4"
            " + 32*z0^3*z1^5 + 33*z0^2*z1^6 + 20*z0*z1^7 + 5*z1^8)/(32*z0^6*z1^6*(z0 + z1)^4)",
    (4, 1): "-5*(221*Q^4 + 236*Q^2 + 21)/(1024*z0^10)",
}


@pytest.mark.parametrize("key", sorted(ORACLE), ids=lambda k: f"2g={k[0]},n+1={k[1]}")
def test_airy_matches_oracle(airy_store, key):
    assert airy_store.get(*key).expr == parse_expr(ORACLE[key])


def test_airy_canonical_text(airy_store):
    assert airy_store.get(0, 3).canonical() == "-1/2*dz0*dz1*dz2/(z0^2*z1^2*z2^2)"
    assert airy_store.get(0, 2).canonical() == "dz0*dz1/(z0+z1)^2"
    assert airy_store.get(2, 1).canonical() == "(-5/16*Q^2-1/16)*dz0/z0^4"


def test_unrefined_airy_genus_three(airy_store):
    # Q^0 part of omega_{3,1}: the classical Airy value -25025/32768 dz/z^16
    w = airy_store.get(6, 1).expr
    z0 = var("z0")
    assert refinement_coefficient(w, 0) == Fraction(-25025, 32768) / z0 ** 16


def test_half_integer_genus_has_no_q0_part(airy_store):
    for key in [(1, 2), (3, 1), (5, 1)]:
        assert refinement_coefficient(airy_store.get(*key).expr, 0).is_zero()


def test_preloaded_passthrough(airy, airy_store):
    assert compute_omega(airy_store, airy, 0, 2).expr == airy.omega02("z0", "z1")


def test_cross_path_airy(airy, airy_store):
    for g, arity in [(Fraction(1, 2), 2), (1, 1), (Fraction(3, 2), 2)]:
        assert compute_omega_alt(airy_store, airy, g, arity).expr == \
            compute_omega(airy_store, airy, g, arity).expr


def test_cross_path_appendix(appendix, appendix_store):
    assert compute_omega_alt(appendix_store, appendix, 0, 3).expr == \
        compute_omega(appendix_store, appendix, 0, 3).expr


def test_rec_lowest_levels(airy, airy_store):
    z = var("z")
    # (1,1): omega_{1/2,1}^2 + omega_{0,2}(p,p) + Q dx d(omega_{1/2,1}/dx)
    w = -var("Q") / (2 * z)
    dx = 2 * z
    expected = w * w + 1 / (4 * z ** 2) + var("Q") * dx * (w / dx).derivative("z")
    assert assemble_rec(airy_store, 2, 1) == expected
    # (0,3) has no Q term
    assert not assemble_rec(airy_store, 0, 3).involves("Q")


def test_pole_locus_recorded(airy_store):
    assert [str(p) for p in airy_store.get(4, 1).pole_locus] == ["0"]


def test_unstable_request_rejected(airy_store):
    with pytest.raises(MissingDependency):
        airy_store.get(0, 0)


def test_qtop_tower_only_uses_one_point_entries(airy):
    store = RecursionStore(airy)
    for k in range(8):
        store.get(k, 1, QTOP)
    assert all(arity == 1 and flavor == QTOP for _, arity, flavor in store.log)
    assert not any(flavor == FULL for _, _, flavor in store.log)

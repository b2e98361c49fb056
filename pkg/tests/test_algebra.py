from fractions import Fraction

import pytest

from refined_tr.algebra import (
    INF, NoRationalPrimitive, ParseError, RatFunc, UnsupportedFactorization, laurent_expand,
    local_antiderivative, parse_differential, parse_expr, partial_fractions, residue_at, var,
)
from refined_tr.algebra.poly import format_ratfunc

z = var("z")
Q = var("Q")


def test_additive_inverse_is_zero():
    f = z / (z - 1)
    assert (f + (-z) / (z - 1)).is_zero()


def test_common_factor_cancels():
    assert (z ** 2 - 1) / (z - 1) == z + 1
    assert str((z ** 2 - 1) / (z - 1)) == "z+1"


def test_product_expands():
    assert (1 + Q * z) * (1 - Q * z) == 1 - Q ** 2 * z ** 2


def test_equal_values_have_equal_text():
    a = (z ** 2 + 2 * z + 1) / (2 * z + 2)
    b = (z + 1) / 2
    assert a == b and str(a) == str(b) and hash(a) == hash(b)


def test_denominator_sign_normalized():
    f = RatFunc.constant(1) / (1 - z)
    assert str(f) == "-1/(z-1)"


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        z / RatFunc.constant(0)


def test_swap_rename():
    z0, z1 = var("z0"), var("z1")
    f = z0 / (z1 + 1) ** 2
    assert f.rename({"z0": "z1", "z1": "z0"}) == z1 / (z0 + 1) ** 2


def test_laurent_at_zero():
    s = laurent_expand(1 / (z * (1 - z)), "z", 0, 1)
    assert [(k, c.constant_value()) for k, c in s.terms()] == [(-1, 1), (0, 1), (1, 1)]


def test_laurent_monomial():
    s = laurent_expand(1 / (z - 2) ** 2, "z", 2, -2)
    assert [(k, c.constant_value()) for k, c in s.terms()] == [(-2, 1)]


def test_laurent_at_infinity():
    # 1 + w + 2w^2 + ... in w = 1/z; the linear coefficient is 1, not 2
    s = laurent_expand((z ** 2 + 1) / (z * (z - 1)), "z", INF, 2)
    assert [(k, c.constant_value()) for k, c in s.terms()] == [(0, 1), (1, 1), (2, 2)]


def test_residues():
    assert residue_at(1 / z, "z", 0) == 1
    assert residue_at(1 / (z - 2) ** 2, "z", 2).is_zero()
    f = (z ** 2 + 1) / (z * (z - 1))
    assert residue_at(f, "z", 0) == -1
    assert residue_at(f, "z", 1) == 2
    assert residue_at(f, "z", INF) == -1


def test_residue_with_parameter():
    a = var("a")
    assert residue_at(1 / ((z - a) * (z + a)), "z", a) == 1 / (2 * a)


def test_partial_fractions():
    pf = partial_fractions(1 / (z ** 2 - 1), "z")
    assert pf.reconstruct() == 1 / (z ** 2 - 1)
    terms = {(str(p), k): c.constant_value() for p, k, c in pf.terms}
    assert terms == {("1", 1): Fraction(1, 2), ("-1", 1): Fraction(-1, 2)}
    assert pf.polynomial.is_zero()


def test_partial_fractions_of_polynomial():
    pf = partial_fractions(z ** 2, "z")
    assert pf.terms == () and pf.polynomial == z ** 2


def test_partial_fractions_irreducible_quadratic():
    with pytest.raises(UnsupportedFactorization):
        partial_fractions(1 / (z ** 2 + 1), "z")


def test_antiderivatives():
    germ = local_antiderivative(1 / z ** 2, "z", 0, 0)
    assert germ.to_ratfunc() == -1 / z
    germ = local_antiderivative(1 / z ** 3 + 3, "z", 0, 1)
    assert germ.to_ratfunc() == -1 / (2 * z ** 2) + 3 * z
    with pytest.raises(NoRationalPrimitive):
        local_antiderivative(1 / z, "z", 0)


def test_parse_and_format_round_trip():
    text = "(2*z^2*l0-2*a^2*l0)/(a*(z+1)*(z-1))"
    f = parse_expr(text)
    assert format_ratfunc(f) == text
    assert parse_expr(format_ratfunc(f)) == f


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse_expr("z^2 + $", line=3, column=5)
    assert (err.value.line, err.value.column) == (3, 11)
    with pytest.raises(ParseError):
        parse_expr("z^(1/2)")


def test_parse_differential():
    f = parse_differential("dz0*dz1/(z0+z1)^2", ["dz0", "dz1"])
    assert f == 1 / (var("z0") + var("z1")) ** 2

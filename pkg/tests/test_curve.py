import pytest

from refined_tr.algebra import INF, RatFunc, residue_at, var
from refined_tr.curve import (
    CoverFailure, CurveConfig, InvolutionFailure, unstable_differentials, validate_curve,
)

z = var("z")
Q = var("Q")


def test_airy_is_valid(airy):
    assert airy.sigma == -z


def test_involution_failure():
    with pytest.raises(InvolutionFailure):
        validate_curve(CurveConfig(z ** 2, z, z + 1))


def test_cover_failure():
    with pytest.raises(CoverFailure):
        validate_curve(CurveConfig(z ** 2, z, 1 / z))


def test_relation_failure():
    from refined_tr.curve import RelationFailure
    x = var("x")
    with pytest.raises(RelationFailure):
        validate_curve(CurveConfig(z ** 2, z, -z, (RatFunc.constant(1), RatFunc.constant(0), x + 1)))


def test_airy_classification(airy):
    ram = airy.ramification
    assert ram.fixed_points == (RatFunc.constant(0), INF)
    assert ram.effective == (RatFunc.constant(0),)
    assert ram.ineffective == (INF,)
    assert ram.ptilde == ()


def test_appendix_classification(appendix):
    ram = appendix.ramification
    assert len(ram.fixed_points) == 2 and len(ram.effective) == 2
    assert [t for _, t, _ in ram.ptilde] == ["oo"] * 4
    assert len(ram.ptilde_plus) == 2 and len(ram.ptilde_minus) == 2


def test_extra_zero_lands_in_ptilde_zero():
    # y = z(z - 2) gives Delta y dx = 8 z^2 (z - 2)... a zero off the fixed points
    curve = validate_curve(CurveConfig(z ** 2, z ** 3 - 4 * z, -z))
    ram = curve.ramification
    zeros = sorted(str(p) for p, t, _ in ram.ptilde if t == "0")
    assert zeros == ["-2", "2"]
    assert ram.auto_split


def test_airy_unstable(airy):
    u = unstable_differentials(airy)
    z0, z1 = var("z0"), var("z1")
    assert u.omega01 == 2 * z0 ** 2
    assert u.omega02 == 1 / (z0 + z1) ** 2
    assert u.omega_half_one == -Q / (2 * z0)


def test_bergman_sum(appendix):
    w02 = appendix.omega02("z0", "z1")
    mirrored = w02.substitute({"z1": appendix.sigma_in("z1")}) * appendix.sigma_prime.rename({"z": "z1"})
    assert w02 + mirrored == -appendix.bergman_sum("z0", "z1")


def test_eta_kernel(airy):
    z0, zp = var("z0"), var("z")
    eta = airy.eta_kernel("z0", "z")
    assert eta == 1 / (z0 - zp) - 1 / (z0 + zp)
    assert eta.substitute({"z0": -z0}) * -1 == -eta
    assert residue_at(eta, "z0", zp) == 1
    assert residue_at(eta, "z0", -zp) == -1


def test_omega_half_one_with_mu():
    mu = var("mu")
    base = validate_curve(CurveConfig(z ** 2, z ** 3 - 4 * z, -z))
    curve = validate_curve(CurveConfig(z ** 2, z ** 3 - 4 * z, -z,
                                       ptilde_plus=((RatFunc.constant(2), mu),)))
    diff = curve.omega_half_one() - base.omega_half_one()
    assert diff == Q * mu / 2 * curve.eta(RatFunc.constant(2))


def test_involution_split(airy):
    w01 = airy.omega01()
    inv, anti = airy.involution_split(w01)
    assert inv.is_zero() and anti == 2 * w01
    inv, anti = airy.involution_split(airy.dx)
    assert inv == 2 * airy.dx and anti.is_zero()
    # dz/z is invariant under z -> -z, so omega_{1/2,1} has no anti-invariant part
    inv, anti = airy.involution_split(airy.omega_half_one())
    assert inv == -Q / z and anti.is_zero()

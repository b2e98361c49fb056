"""Pairings with a primitive of omega_{0,1}, the dilaton equation and free energies.

A primitive phi of omega_{0,1} is never written down.  At a pole r of a
residue-free differential w, Res phi·w = -Res I_r[w]·omega_{0,1}, where I_r[w]
is the Laurent germ of a local antiderivative of w.  The shift U = alpha log x
enters the same way through dU = alpha dx/x.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import INF, RatFunc, local_antiderivative
from .algebra.poly import COORDINATE, REFINEMENT, format_ratfunc
from .algebra.series import differential_series, linear_factors
from .curve import SpectralCurve, point_text
from .recursion import FULL, RecursionStore, euler_level, genus_text, zvars
from .validate import CheckReport

Z = COORDINATE
ALPHA = "alpha"


class PairingError(ArithmeticError):
    pass


class FreeEnergyUndefined(ValueError):
    pass


@dataclass(frozen=True)
class PrimitiveSpec:
    """phi plus an optional U = alpha·log x (alpha rational or a symbol)."""

    alpha: RatFunc | None = None

    @classmethod
    def shifted(cls, alpha=None) -> "PrimitiveSpec":
        return cls(RatFunc.var(ALPHA) if alpha is None else RatFunc.coerce(alpha))


def _germ_pairing(germ, theta: RatFunc, var: str, center) -> RatFunc:
    """Res_{var=center} germ·theta d(var) with germ a Laurent series."""
    if germ.is_zero():
        return RatFunc.constant(0)
    top = -1 - germ.lowest_order
    if top < -1:
        return RatFunc.constant(0)
    s = differential_series(theta, var, center, top)
    total = RatFunc.constant(0)
    for k, c in germ.terms():
        other = s.coefficient(-1 - k)
        if not other.is_zero():
            total = total + c * other
    return total


def _is_pole(theta: RatFunc, var: str, center) -> bool:
    s = differential_series(theta, var, center, -1)
    return not s.is_zero()


def pairing_with_primitive(curve: SpectralCurve, omega: RatFunc, var: str, poles,
                           spec: PrimitiveSpec = PrimitiveSpec()) -> RatFunc:
    """Sum over ``poles`` of Res phi(p)·omega(p), p the variable ``var``."""
    w01 = curve.omega01(var)
    dlogx = None
    if spec.alpha is not None:
        x = curve.x.rename({Z: var})
        dlogx = x.derivative(var) / x * spec.alpha
    total = RatFunc.constant(0)
    for r in poles:
        if _is_pole(w01, var, r):
            raise PairingError(f"contour may not enclose the pole {point_text(r)} of omega_(0,1)")
        germ = local_antiderivative(omega, var, r, -1)
        total = total - _germ_pairing(germ, w01, var, r)
        if dlogx is not None:
            total = total - _germ_pairing(germ, dlogx, var, r)
    return total


def poles_in(expr: RatFunc, var: str) -> list:
    """Pole locus of expr·d(var) on the sphere, infinity included."""
    out = [r for r, _ in linear_factors(expr.den, var)] if expr.involves(var) else []
    dn, dd = expr.degree(var)
    if expr.is_zero():
        return []
    if dd - dn < 2:
        out.append(INF)
    return out


def dilaton_sides(store: RecursionStore, two_g: int, n: int,
                  spec: PrimitiveSpec = PrimitiveSpec()):
    """Both sides of (2-2g-n-1)·omega_{g,n+1}(p0, J) = pairing of omega_{g,n+2}."""
    curve = store.curve
    upper = store.get(two_g, n + 2, FULL)
    names = [Z] + zvars(n + 1)
    integrand = upper.at(names)
    w01 = curve.omega01(Z)
    poles = [r for r in poles_in(integrand, Z) if not _is_pole(w01, Z, r)]
    rhs = pairing_with_primitive(curve, integrand, Z, poles, spec)
    coefficient = 1 - two_g - n
    if coefficient == 0:
        lhs = RatFunc.constant(0)
    else:
        lhs = store.get(two_g, n + 1, FULL).expr * coefficient
    if (two_g, n) == (0, 0) and spec.alpha is not None:
        # the only pole is sigma(p0); omega_{0,1} is anti-invariant but dU is not
        x0 = curve.x.rename({Z: "z0"})
        lhs = lhs - spec.alpha * x0.derivative("z0") / x0
    return lhs, rhs, poles


def check_dilaton(store: RecursionStore, two_g: int, n: int,
                  spec: PrimitiveSpec = PrimitiveSpec()) -> CheckReport:
    lhs, rhs, poles = dilaton_sides(store, two_g, n, spec)
    diff = (lhs - rhs).compact()
    tag = "dilaton" if spec.alpha is None else "dilaton-shifted"
    where = ", ".join(point_text(p) for p in poles) or "none"
    label = f"(g,n)=({genus_text(two_g)},{n})"
    if diff.is_zero():
        return CheckReport(tag, (two_g, n + 1), True,
                           detail=f"(coefficient {1 - two_g - n}; poles {where})", label=label)
    return CheckReport(tag, (two_g, n + 1), False, diff,
                       f"(coefficient {1 - two_g - n}; poles {where})", label=label)


def free_energy_points(curve: SpectralCurve) -> list:
    """R* together with the zero-type points of Ptilde-."""
    ram = curve.ramification
    pts = list(ram.effective)
    for p in ram.ptilde_minus:
        if ram.ptilde_type(p) == "0":
            pts.append(p)
    return pts


def free_energy(store: RecursionStore, curve: SpectralCurve, g,
                spec: PrimitiveSpec = PrimitiveSpec()) -> RatFunc:
    two_g = int(Fraction(g) * 2)
    if two_g <= 2:
        raise FreeEnergyUndefined(f"free energy is only defined for g > 1, not g={genus_text(two_g)}")
    w = store.get(two_g, 1, FULL).expr.rename({"z0": Z})
    pairing = pairing_with_primitive(curve, w, Z, free_energy_points(curve), spec)
    return (pairing / (2 - two_g)).compact()


def coefficient_table(value: RatFunc) -> list:
    """(k, coefficient of Q^k) rows for a value polynomial in Q."""
    if value.degree(REFINEMENT)[1]:
        raise ValueError("value is not polynomial in Q")
    return [(k, c) for k, c in enumerate(value.coefficients(REFINEMENT)) if not c.is_zero()]


def format_table(value: RatFunc) -> str:
    rows = coefficient_table(value)
    if not rows:
        return "0"
    return "\n".join(f"Q^{k}: {format_ratfunc(c)}" for k, c in rows)


def oracle_free_energy(curve: SpectralCurve, oracle, g) -> RatFunc:
    """Unrefined F_g from the oracle's omega_{g,1}, paired against an explicit
    Taylor primitive of omega_{0,1} instead of integrating by parts."""
    two_g = int(Fraction(g) * 2)
    w = oracle.get(two_g, 1).rename({"z0": Z})
    w01 = oracle.omega01(Z)
    total = RatFunc.constant(0)
    for r in curve.ramification.effective:
        s = differential_series(w, Z, r, -1)
        if s.is_zero():
            continue
        depth = -s.lowest_order
        phi = local_antiderivative(w01, Z, r, depth)
        for k, c in phi.terms():
            other = s.coefficient(-1 - k)
            if not other.is_zero():
                total = total + c * other
    return (total / (2 - two_g)).compact()


def euler_ok(two_g: int, n: int) -> bool:
    return euler_level(two_g, n + 1) >= 0

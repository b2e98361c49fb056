"""The Q-top recursion, its WKB coefficients and the Q-top quantum curve."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import INF, RatFunc
from .algebra.poly import COORDINATE, format_ratfunc
from .curve import SpectralCurve
from .recursion import FULL, QTOP, MultiDiff, RecursionStore, residue_sums
from .validate import CheckReport, refinement_coefficient

Z = COORDINATE
BASE = "x"


class DescentFailure(ArithmeticError):
    pass


def compute_qtop(store: RecursionStore, curve: SpectralCurve, g, arity: int) -> MultiDiff:
    return store.get(int(Fraction(g) * 2), arity, QTOP)


def check_qtop_consistency(store: RecursionStore, two_g: int, arity: int) -> CheckReport:
    top = store.get(two_g, arity, QTOP).expr
    full = refinement_coefficient(store.get(two_g, arity, FULL).expr, two_g)
    diff = top - full
    if diff.is_zero():
        return CheckReport("qtop-consistency", (two_g, arity), True,
                           detail=f"(varpi equals the Q^{two_g} coefficient)")
    return CheckReport("qtop-consistency", (two_g, arity), False, diff,
                       f"(varpi differs from the Q^{two_g} coefficient)")


@dataclass
class WKBCoefficients:
    S: list  # S[k + 1] is S_k, starting at S_{-1}
    Q: list  # Q[k] as functions of z
    reports: list = field(default_factory=list)

    def s(self, k: int) -> RatFunc:
        return self.S[k + 1] if k + 1 < len(self.S) and k >= -1 else RatFunc.constant(0)


def _reference_q(store: RecursionStore, k: int):
    """Q_k from its defining formula (None when no formula applies)."""
    curve = store.curve
    dx = curve.dx
    w01 = curve.omega01(Z)
    if k == 0:
        if curve.relation is None:
            return None
        a, b, c = (f.substitute({BASE: curve.x}) for f in curve.relation)
        return (b * b - a * c * 4) / (a * a * 4)
    if k == 1:
        total = RatFunc.constant(0)
        for p, mu in curve.ramification.ptilde_plus:
            total = total + mu * curve.eta(p, Z)
        return w01 * total / (dx * dx)
    # R-hat carries the kernel eta/(2 omega_{0,1}), twice the recursion-1 residues
    r_hat = residue_sums(store, k, 1, QTOP).plus_hat.rename({"z0": Z}) * 2
    return w01 * 2 * r_hat / (dx * dx)


def wkb_coefficients(store: RecursionStore, curve: SpectralCurve, kmax: int) -> WKBCoefficients:
    dx = curve.dx
    S = []
    for two_g in range(kmax + 1):
        S.append(store.get(two_g, 1, QTOP).expr.rename({"z0": Z}) / dx)
    out = WKBCoefficients(S, [])

    for k in range(kmax + 1):
        total = RatFunc.constant(0)
        for i in range(-1, k):
            j = k - 2 - i
            if j < -1:
                continue
            total = total + out.s(i) * out.s(j)
        if k - 2 >= -1:
            total = total + out.s(k - 2).derivative(Z) / dx
        out.Q.append(total)
        mirror = curve.pull(total, Z) - total
        if not mirror.is_zero():
            out.reports.append(CheckReport("wkb-invariance", (k, 1), False, mirror,
                                           "(not sigma-invariant)", label=f"k={k}"))
        else:
            out.reports.append(CheckReport("wkb-invariance", (k, 1), True,
                                           detail="(sigma-invariant)", label=f"k={k}"))
        ref = _reference_q(store, k)
        if ref is not None:
            diff = total - ref
            out.reports.append(CheckReport(
                "wkb-relation", (k, 1), diff.is_zero(), None if diff.is_zero() else diff,
                "(against the defining formula of Q_k)", label=f"k={k}"))
    return out


# descent to the base ------------------------------------------------------------------

def _even_part(f: RatFunc, var: str, target: str) -> RatFunc:
    """F with f = F(var^2), written in ``target``; f must be even in var."""
    parts = []
    for poly in (f.num, f.den):
        coeffs = RatFunc(poly).coefficients(var)
        if any(not c.is_zero() for c in coeffs[1::2]):
            raise DescentFailure("function is not even in the normal coordinate")
        u = RatFunc.var(target)
        total = RatFunc.constant(0)
        for i, c in enumerate(coeffs[0::2]):
            if not c.is_zero():
                total = total + c * u ** i
        parts.append(total)
    return parts[0] / parts[1]


class Descent:
    """Rewrites sigma-invariant functions of z as rational functions of x.

    With fixed points r1, r2 the coordinate w = (z - r1)/(z - r2) (or z - r1
    when r2 is infinity) turns sigma into w -> -w, so invariants are functions
    of u = w^2, and x is a degree-one function of u that can be inverted.
    """

    def __init__(self, curve: SpectralCurve):
        self.curve = curve
        fixed = list(curve.ramification.fixed_points)
        if len(fixed) != 2:
            raise DescentFailure(f"expected two fixed points, found {len(fixed)}")
        r1, r2 = fixed
        w = RatFunc.var(Z)
        if r1 is INF:
            r1, r2 = r2, r1
        if r2 is INF:
            self.z_of_w = w + r1
        else:
            self.z_of_w = (r1 - r2 * w) / (1 - w)
        u = "z0"
        X = _even_part(curve.x.substitute({Z: self.z_of_w}), Z, u)
        dn, dd = X.degree(u)
        if max(dn, dd) != 1:
            raise DescentFailure("x is not a degree-one function of the invariant")
        a, b = _pad(RatFunc(X.num).coefficients(u))
        c, d = _pad(RatFunc(X.den).coefficients(u))
        xs = RatFunc.var(BASE)
        # x = (a + b u)/(c + d u)  =>  u = (a - c x)/(d x - b)
        self.u_of_x = (a - c * xs) / (d * xs - b)

    def __call__(self, f: RatFunc) -> RatFunc:
        if not f.involves(Z):
            return f
        F = _even_part(f.substitute({Z: self.z_of_w}), Z, "z0")
        out = F.substitute({"z0": self.u_of_x})
        if out.substitute({BASE: self.curve.x}) != f:
            raise DescentFailure("lift of the descended function does not match")
        return out


def _pad(coeffs):
    coeffs = list(coeffs) + [RatFunc.constant(0)] * (2 - len(coeffs))
    return coeffs[0], coeffs[1]


@dataclass
class QuantumCurve:
    coefficients: list  # Qbar_l(x)

    def operator(self) -> str:
        terms = ["Δŷ²"]
        for ell, q in enumerate(self.coefficients):
            if q.is_zero():
                continue
            text = format_ratfunc(q)
            weight = "" if ell == 0 else ("ε₁·" if ell == 1 else f"ε₁^{ell}·")
            if text.startswith("-") and _single_term(text[1:]):
                terms.append(f"+ {weight}{text[1:]}")
                continue
            if not _single_term(text):
                text = f"({text})"
            terms.append(f"− {weight}{text}")
        return " ".join(terms)

    def listing(self) -> str:
        lines = [self.operator()]
        for ell, q in enumerate(self.coefficients):
            lines.append(f"Qbar_{ell}(x) = {format_ratfunc(q)}")
        return "\n".join(lines)


def _single_term(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0 and text[i - 1] != "^":
            return False
    return True


def emit_quantum_curve(store: RecursionStore, curve: SpectralCurve, kmax: int,
                       wkb: WKBCoefficients | None = None) -> QuantumCurve:
    wkb = wkb or wkb_coefficients(store, curve, kmax)
    bad = [r for r in wkb.reports if not r.passed]
    if bad:
        raise DescentFailure(f"WKB check failed: {bad[0]}")
    descend = Descent(curve)
    return QuantumCurve([descend(q) for q in wkb.Q[:kmax + 1]])

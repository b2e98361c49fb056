"""Refined topological recursion as exact residue sums on the Riemann sphere.

Entries are stored as the coefficient of dz0*...*dzn, a RatFunc in
z0..zn (and the refinement symbol Q).  During a recursion step the
integration point p is the bare coordinate ``z`` and the remaining
external points are z1..zn.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import INF, RatFunc, laurent_expand
from .algebra.poly import COORDINATE, REFINEMENT, format_ratfunc
from .algebra.series import linear_factors, residue_at
from .curve import SpectralCurve, point_text

FULL = "full"
QTOP = "qtop"
UNREFINED = "unrefined"
FLAVORS = (FULL, QTOP, UNREFINED)

Z = COORDINATE


class RecursionError(ArithmeticError):
    pass


class MissingDependency(RecursionError):
    pass


class InvariantViolation(RecursionError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PathMismatch(RecursionError):
    pass


def zvars(count: int, start: int = 0) -> list[str]:
    return [f"z{i}" for i in range(start, start + count)]


def genus_text(two_g: int) -> str:
    return str(Fraction(two_g, 2))


@dataclass(frozen=True)
class MultiDiff:
    two_g: int
    arity: int
    expr: RatFunc
    flavor: str = FULL
    pole_locus: tuple = ()  # certified poles in z0 (other slots follow by symmetry)

    @property
    def genus(self) -> Fraction:
        return Fraction(self.two_g, 2)

    @property
    def variables(self) -> list[str]:
        return zvars(self.arity)

    @property
    def stable(self) -> bool:
        return self.two_g - 3 + self.arity >= 0

    def canonical(self) -> str:
        marks = tuple("d" + v for v in self.variables)
        return format_ratfunc(self.expr, marks)

    def at(self, names) -> RatFunc:
        """Expression with slot i renamed to names[i]."""
        return self.expr.rename({f"z{i}": n for i, n in enumerate(names)})

    def __str__(self):
        return self.canonical()


def euler_level(two_g: int, arity: int) -> Fraction:
    return Fraction(two_g, 1) - 2 + (arity - 1)


class RecursionStore:
    """Memo of computed entries keyed by (2g, arity, flavor)."""

    def __init__(self, curve: SpectralCurve, *, certify: bool = True, cache=None):
        self.curve = curve
        self.certify = certify
        self.cache = cache
        self.entries: dict = {}
        self.alternate: dict = {}
        self.reports: dict = {}
        self.log: list = []
        c = curve
        w01 = c.omega01("z0")
        w02 = c.omega02("z0", "z1")
        w_half = c.omega_half_one("z0")
        for flavor in (FULL, QTOP):
            self.entries[(0, 1, flavor)] = MultiDiff(0, 1, w01, flavor)
            self.entries[(0, 2, flavor)] = MultiDiff(0, 2, w02, flavor)
        self.entries[(1, 1, FULL)] = MultiDiff(1, 1, w_half, FULL)
        q_part = w_half.coefficients(REFINEMENT)
        top = q_part[1] if len(q_part) > 1 else RatFunc.constant(0)
        self.entries[(1, 1, QTOP)] = MultiDiff(1, 1, top, QTOP)
        self._w01_z = c.omega01(Z)
        self._dx = {}

    def has(self, two_g, arity, flavor=FULL) -> bool:
        return (two_g, arity, flavor) in self.entries

    def put(self, d: MultiDiff):
        self.entries[(d.two_g, d.arity, d.flavor)] = d

    def get(self, two_g: int, arity: int, flavor: str = FULL) -> MultiDiff:
        key = (two_g, arity, flavor)
        if key in self.entries:
            return self.entries[key]
        if flavor == UNREFINED:
            raise MissingDependency(f"unrefined entry {key} must come from the oracle")
        if two_g < 0 or arity < 1 or euler_level(two_g, arity) < 0:
            raise MissingDependency(f"no entry for 2g={two_g}, arity={arity}")
        if self.cache is not None:
            hit = self.cache.load(self.curve, two_g, arity, flavor)
            if hit is not None:
                self.entries[key] = hit
                return hit
        d = compute_entry(self, two_g, arity, flavor)
        if self.cache is not None:
            self.cache.store(self.curve, d)
        return d

    def dx(self, var: str) -> RatFunc:
        if var not in self._dx:
            self._dx[var] = self.curve.dx.rename({Z: var})
        return self._dx[var]


# Rec assembly ---------------------------------------------------------------

def _factor(store, two_g, arity, flavor, names):
    return store.get(two_g, arity, flavor).at(names)


def rec_terms(store: RecursionStore, two_g: int, arity: int, flavor: str = FULL) -> list:
    """The summands of Rec_{g,n+1}(p, J) with p = z and J = (z1, ..., zn).

    Kept separate because residues are linear and each summand has far
    fewer poles than their sum.
    """
    if flavor not in (FULL, QTOP):
        raise ValueError(f"flavor {flavor!r} has no Rec in this engine")
    curve = store.curve
    n = arity - 1
    J = zvars(n, 1)
    terms = []

    # quadratic sum over g1 + g2 = g and J1 ⊔ J2 = J, skipping omega_{0,1}
    full_mask = (1 << n) - 1
    seen = set()
    for mask in range(1 << n):
        J1 = [J[i] for i in range(n) if mask >> i & 1]
        J2 = [J[i] for i in range(n) if not mask >> i & 1]
        for g1 in range(two_g + 1):
            g2 = two_g - g1
            if (g1 == 0 and not J1) or (g2 == 0 and not J2):
                continue
            a, b = (g1, mask), (g2, full_mask ^ mask)
            if (b, a) in seen:
                continue
            seen.add((a, b))
            term = _factor(store, g1, len(J1) + 1, flavor, [Z] + J1) * \
                _factor(store, g2, len(J2) + 1, flavor, [Z] + J2)
            terms.append(term if a == b else term * 2)

    # cross term with dx dx/(x - x_t)^2
    for t in range(n):
        rest = [J[i] for i in range(n) if i != t]
        kern = store.dx(Z) * store.dx(J[t]) / (curve.x - curve.x.rename({Z: J[t]})) ** 2
        terms.append(kern * _factor(store, two_g, arity - 1, flavor, [Z] + rest))

    # diagonal omega_{g-1,n+2}(p, p, J)
    if flavor == FULL and two_g >= 2:
        terms.append(_factor(store, two_g - 2, arity + 1, flavor, [Z, Z] + J))

    # derivative term dx * d(omega_{g-1/2,n+1}/dx)
    if two_g >= 1:
        prev = _factor(store, two_g - 1, arity, flavor, [Z] + J)
        dx = store.dx(Z)
        deriv = dx * (prev / dx).derivative(Z)
        if flavor == FULL:
            deriv = deriv * RatFunc.var(REFINEMENT)
        terms.append(deriv)
    return [t for t in terms if not t.is_zero()]


def assemble_rec(store: RecursionStore, two_g: int, arity: int, flavor: str = FULL) -> RatFunc:
    """Rec_{g,n+1}(p, J) with p = z and J = (z1, ..., zn)."""
    total = RatFunc.constant(0)
    for t in rec_terms(store, two_g, arity, flavor):
        total = total + t
    return total


# residue sums ---------------------------------------------------------------

def _kernel_residue(lam: RatFunc, kernel: RatFunc, point) -> RatFunc:
    """Res_{z=point} kernel(z)·lam(z) dz where kernel is regular at point."""
    if point is INF:
        s = laurent_expand(lam, Z, INF, 1)
        if not s.coefficients:
            return RatFunc.constant(0)
        top = 1 - s.lowest_order
        if top < 0:
            return RatFunc.constant(0)
        e = laurent_expand(kernel, Z, INF, top)
        total = RatFunc.constant(0)
        for j in range(top + 1):
            ej = e.coefficient(j)
            if not ej.is_zero():
                total = total + ej * s.coefficient(1 - j)
        return -total
    s = laurent_expand(lam, Z, point, -1)
    if not s.coefficients:
        return RatFunc.constant(0)
    m = -s.lowest_order
    e = laurent_expand(kernel, Z, point, m - 1)
    total = RatFunc.constant(0)
    for j in range(m):
        ej = e.coefficient(j)
        if not ej.is_zero():
            total = total + ej * s.coefficient(-1 - j)
    return total


@dataclass
class ResidueSums:
    plus: RatFunc
    minus: RatFunc
    plus_hat: RatFunc  # plus without the p = p0 contribution
    at_p0: RatFunc


def residue_sums(store: RecursionStore, two_g: int, arity: int, flavor: str) -> ResidueSums:
    curve = store.curve
    ram = curve.ramification
    n = arity - 1
    J = zvars(n, 1)
    w4 = store._w01_z * 4
    lams = [t / w4 for t in rec_terms(store, two_g, arity, flavor)]
    lam = RatFunc.constant(0)
    for piece in lams:
        lam = lam + piece
    kernel = curve.eta_kernel("z0", Z)

    at_p0 = -lam.rename({Z: "z0"})
    s0 = curve.sigma_in("z0")
    at_sigma_p0 = lam.substitute({Z: s0}) * curve.sigma_prime.rename({Z: "z0"})

    def residue(a):
        total = RatFunc.constant(0)
        for piece in lams:
            total = total + _kernel_residue(piece, kernel, a)
        return total

    plus_hat = RatFunc.constant(0)
    for a in [RatFunc.var(v) for v in J] + [p for p, _ in ram.ptilde_plus]:
        plus_hat = plus_hat + residue(a)
    minus = at_sigma_p0
    minus_pts = list(ram.fixed_points)
    minus_pts += [curve.sigma_in(v) for v in J]
    minus_pts += list(ram.ptilde_minus)
    for a in minus_pts:
        minus = minus + residue(a)
    return ResidueSums(at_p0 + plus_hat, minus, plus_hat, at_p0)


def compute_entry(store: RecursionStore, two_g: int, arity: int, flavor: str) -> MultiDiff:
    if euler_level(two_g, arity) < 0:
        raise MissingDependency(f"unstable entry 2g={two_g}, arity={arity} is preloaded")
    sums = residue_sums(store, two_g, arity, flavor)
    first = (sums.plus - sums.minus).compact()
    second = (sums.at_p0 * 2 + sums.plus_hat * 2).compact()
    store.alternate[(two_g, arity, flavor)] = second
    if first != second:
        raise PathMismatch(
            f"recursion paths disagree for g={genus_text(two_g)}, n+1={arity} ({flavor})")
    d = MultiDiff(two_g, arity, first, flavor)
    if store.certify:
        locus = certify_entry(store.curve, d)
        d = MultiDiff(two_g, arity, first, flavor, locus)
    store.put(d)
    store.log.append((two_g, arity, flavor))
    return d


def compute_omega(store: RecursionStore, curve: SpectralCurve, g, arity: int) -> MultiDiff:
    """omega_{g,n+1} via the S+ minus S- residue sum (recursion 1)."""
    return store.get(int(Fraction(g) * 2), arity, FULL)


def compute_omega_alt(store: RecursionStore, curve: SpectralCurve, g, arity: int) -> MultiDiff:
    """omega_{g,n+1} = -Rec/(2 omega_{0,1}) + (residues at J and Ptilde+), recursion 2."""
    two_g = int(Fraction(g) * 2)
    key = (two_g, arity, FULL)
    d = store.get(two_g, arity, FULL)
    if euler_level(two_g, arity) < 0:
        return d
    if key not in store.alternate:
        sums = residue_sums(store, two_g, arity, FULL)
        store.alternate[key] = (sums.at_p0 * 2 + sums.plus_hat * 2).compact()
    alt = store.alternate[key]
    if alt != d.expr:
        raise PathMismatch(f"recursion 2 disagrees with recursion 1 at {key}")
    return MultiDiff(two_g, arity, alt, FULL, d.pole_locus)


# structural certification ---------------------------------------------------

@dataclass
class StructuralResult:
    ok: bool
    failures: list = field(default_factory=list)
    pole_locus: tuple = ()


def allowed_constant_poles(curve: SpectralCurve) -> list:
    ram = curve.ramification
    return list(ram.effective) + list(ram.ptilde_minus)


def _point_in(p, pts) -> bool:
    for q in pts:
        if (p is INF) != (q is INF):
            continue
        if p is INF or p == q:
            return True
    return False


def structural_check(curve: SpectralCurve, d: MultiDiff, *, symmetric=True) -> StructuralResult:
    """Symmetry, residue-freeness and pole containment in z0, refinement degree.

    With symmetry established exactly, the pole structure in every other
    slot is the image of the one in z0, so z0 is the only slot expanded.
    """
    fails = []
    expr = d.expr
    names = d.variables
    if symmetric:
        for i in range(1, d.arity):
            swapped = expr.rename({"z0": names[i], names[i]: "z0"})
            if swapped != expr:
                fails.append(("symmetry", f"z0<->{names[i]}", swapped - expr))
    locus = []
    if d.arity >= 1 and expr.involves("z0"):
        allowed = allowed_constant_poles(curve)
        others = [curve.sigma_in(v) for v in names[1:]]
        poles = [r for r, _ in linear_factors(expr.den, "z0")]
        dn, dd = expr.degree("z0")
        if dd - dn < 2:
            poles.append(INF)
        for r in poles:
            if not (_point_in(r, allowed) or (r is not INF and _point_in(r, others))):
                fails.append(("pole-locus", point_text(r), r))
            res = residue_at(expr, "z0", r)
            if not res.is_zero():
                fails.append(("residue", point_text(r), res))
            locus.append(r)
    if d.flavor == QTOP or d.flavor == UNREFINED:
        if expr.involves(REFINEMENT):
            fails.append(("q-degree", "refinement symbol present", expr))
    else:
        if expr.degree(REFINEMENT)[1] != 0:
            fails.append(("q-degree", "denominator depends on Q", expr))
        else:
            coeffs = expr.coefficients(REFINEMENT)
            for k, c in enumerate(coeffs):
                if c.is_zero():
                    continue
                if k > d.two_g:
                    fails.append(("q-degree", f"Q^{k} exceeds 2g={d.two_g}", c))
                elif (k - d.two_g) % 2:
                    fails.append(("q-parity", f"Q^{k} has the wrong parity", c))
    locus.sort(key=lambda p: (p is INF, "" if p is INF else str(p)))
    return StructuralResult(not fails, fails, tuple(locus))


def certify_entry(curve: SpectralCurve, d: MultiDiff) -> tuple:
    res = structural_check(curve, d)
    if not res.ok:
        kind, where, witness = res.failures[0]
        raise InvariantViolation(
            f"{kind} failure for g={genus_text(d.two_g)}, n+1={d.arity} ({d.flavor}) at {where}",
            witness)
    return res.pole_locus

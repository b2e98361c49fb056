"""Exact certification of computed entries against the refined loop equations.

Every check returns a :class:`CheckReport`; failures carry a witness
(the nonzero residual, the offending pole, or the transposition).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .algebra import RatFunc, residue_at
from .algebra.poly import COORDINATE, REFINEMENT
from .algebra.series import differential_series
from .curve import SpectralCurve, point_text
from .recursion import (FULL, QTOP, UNREFINED, MultiDiff, RecursionStore, euler_level,
                        genus_text, rec_terms, structural_check, zvars)

Z = COORDINATE


@dataclass
class CheckReport:
    name: str
    target: tuple  # (2g, arity)
    passed: bool
    witness: object = None
    detail: str = ""
    sampled: str | None = None  # "seed=..., params=..." when parameters were pinned
    label: str | None = None  # replaces the "g=.. n+1=.." target text

    def __str__(self):
        two_g, arity = self.target
        where = self.label or f"g={genus_text(two_g)} n+1={arity}"
        head = f"{'PASS' if self.passed else 'FAIL'} {self.name} {where}"
        parts = [head]
        if self.detail:
            parts.append(self.detail)
        if self.sampled:
            parts.append(f"[{self.sampled}]")
        if not self.passed and self.witness is not None:
            text = str(self.witness)
            parts.append("witness: " + (text if len(text) <= 200 else text[:200] + "..."))
        return " ".join(parts)


def invariant_part(curve: SpectralCurve, f: RatFunc, var: str = "z0") -> RatFunc:
    """Coefficient of f + sigma^*f for the differential f d var."""
    return f + curve.pull_diff(f, var)


def anti_invariant_part(curve: SpectralCurve, f: RatFunc, var: str = "z0") -> RatFunc:
    return f - curve.pull_diff(f, var)


# structural -------------------------------------------------------------------

def check_structural(store: RecursionStore, two_g: int, arity: int, flavor: str = FULL,
                     entry: MultiDiff | None = None) -> CheckReport:
    d = entry if entry is not None else store.get(two_g, arity, flavor)
    res = structural_check(store.curve, d, symmetric=d.stable or arity > 1)
    if res.ok:
        poles = ", ".join(point_text(p) for p in res.pole_locus) or "none"
        return CheckReport("structural", (two_g, arity), True,
                           detail=f"({flavor}; poles in z0: {poles})")
    kind, where, witness = res.failures[0]
    return CheckReport("structural", (two_g, arity), False, witness,
                       f"({flavor}; {kind} at {where})")


# refined loop equation ----------------------------------------------------------

def loop_residual(store: RecursionStore, two_g: int, arity: int) -> RatFunc:
    """R = Q_{g,n+1}/(2 omega_{0,1}) in p = z, with the full quadratic sum."""
    n = arity - 1
    w01 = store.curve.omega01(Z)
    rec = RatFunc.constant(0)
    for t in rec_terms(store, two_g, arity, FULL):
        rec = rec + t
    own = store.get(two_g, arity, FULL).at([Z] + zvars(n, 1))
    return rec / (w01 * 2) + own


def check_loop_equation(store: RecursionStore, two_g: int, arity: int) -> CheckReport:
    curve = store.curve
    R = loop_residual(store, two_g, arity)
    for r in curve.ramification.fixed_points:
        s = differential_series(R, Z, r, -1)
        if not s.is_zero():
            return CheckReport("loop-equation", (two_g, arity), False, s,
                               f"(pole of R at ramification point {point_text(r)})")
    mirror = curve.pull_diff(R, Z) + R
    if not mirror.is_zero():
        return CheckReport("loop-equation", (two_g, arity), False, mirror,
                           "(R + sigma^*R is nonzero)")
    return CheckReport("loop-equation", (two_g, arity), True,
                       detail="(holomorphic at R, anti-invariant)")


# independent unrefined recursion ------------------------------------------------

class UnrefinedOracle:
    """A second, separately written unrefined recursion.

    Only the raw curve data (x, y, sigma and the effective ramification
    points) is borrowed; differentials, the kernel and the recursion are
    rebuilt here and residues are taken of the full integrand at R* only.
    """

    def __init__(self, curve: SpectralCurve):
        self.curve = curve
        z = RatFunc.var(Z)
        self.sigma = curve.sigma
        y_mirror = curve.y.substitute({Z: self.sigma})
        self.ydiff = curve.y - y_mirror
        self.xprime = curve.x.derivative(Z)
        self.points = list(curve.ramification.effective)
        self.table: dict = {}
        s1 = self.sigma.rename({Z: "z1"})
        self.table[(0, 2)] = -s1.derivative("z1") / (RatFunc.var("z0") - s1) ** 2
        self._z = z

    def omega01(self, var: str) -> RatFunc:
        return (self.ydiff * self.xprime / 2).rename({Z: var})

    def kernel(self) -> RatFunc:
        """eta^z(z0) / (4 omega_{0,1}(z)), as a coefficient of dz0 (and 1/dz)."""
        z0 = RatFunc.var("z0")
        eta = 1 / (z0 - self._z) - 1 / (z0 - self.sigma)
        return eta / (self.omega01(Z) * 4)

    def _entry(self, two_g: int, arity: int, names) -> RatFunc:
        expr = self.get(two_g, arity)
        return expr.rename({f"z{i}": v for i, v in enumerate(names)})

    def rec(self, g: int, arity: int) -> RatFunc:
        """Unrefined Rec(z, z1..zn) for integer genus g."""
        ext = zvars(arity - 1, 1)
        total = RatFunc.constant(0)
        for size in range(len(ext) + 1):
            for part in itertools.combinations(ext, size):
                rest = [v for v in ext if v not in part]
                for g1 in range(g + 1):
                    g2 = g - g1
                    if (g1 == 0 and not part) or (g2 == 0 and not rest):
                        continue
                    total = total + self._entry(2 * g1, len(part) + 1, [Z, *part]) * \
                        self._entry(2 * g2, len(rest) + 1, [Z, *rest])
        x = self.curve.x
        for t in ext:
            others = [v for v in ext if v != t]
            bb = self.xprime * self.xprime.rename({Z: t}) / (x - x.rename({Z: t})) ** 2
            total = total + bb * self._entry(2 * g, arity - 1, [Z, *others])
        if g >= 1:
            total = total + self._entry(2 * g - 2, arity + 1, [Z, Z, *ext])
        return total

    def get(self, two_g: int, arity: int) -> RatFunc:
        key = (two_g, arity)
        if key in self.table:
            return self.table[key]
        if two_g % 2:
            return RatFunc.constant(0)
        if euler_level(two_g, arity) < 0:
            raise ValueError(f"no unrefined entry for 2g={two_g}, arity={arity}")
        integrand = self.kernel() * self.rec(two_g // 2, arity)
        out = RatFunc.constant(0)
        for r in self.points:
            out = out - residue_at(integrand, Z, r)
        out = out.compact()
        self.table[key] = out
        return out

    def multidiff(self, two_g: int, arity: int) -> MultiDiff:
        return MultiDiff(two_g, arity, self.get(two_g, arity), UNREFINED)


def unrefined_oracle(curve: SpectralCurve, g, arity: int, oracle: UnrefinedOracle | None = None):
    oracle = oracle or UnrefinedOracle(curve)
    return oracle.multidiff(int(Fraction(g) * 2), arity)


def refinement_coefficient(expr: RatFunc, k: int) -> RatFunc:
    coeffs = expr.coefficients(REFINEMENT)
    return coeffs[k] if k < len(coeffs) else RatFunc.constant(0)


def compare_q0(store: RecursionStore, two_g: int, arity: int,
               oracle: UnrefinedOracle | None = None) -> CheckReport:
    oracle = oracle or UnrefinedOracle(store.curve)
    ours = refinement_coefficient(store.get(two_g, arity, FULL).expr, 0)
    theirs = oracle.get(two_g, arity)
    diff = ours - theirs
    if diff.is_zero():
        return CheckReport("unrefined-oracle", (two_g, arity), True,
                           detail="(Q^0 part equals the independent recursion)")
    return CheckReport("unrefined-oracle", (two_g, arity), False, diff,
                       "(Q^0 part differs from the independent recursion)")


# linear loop equations ------------------------------------------------------------

def _d0(f: RatFunc) -> RatFunc:
    return f.derivative("z0")


def linear_loop_residual(store: RecursionStore, two_g: int, arity: int, flavor: str = FULL):
    """Pairs (label, residual) that must vanish for this entry."""
    curve = store.curve
    w01 = curve.omega01("z0")
    Q = RatFunc.var(REFINEMENT)
    out = []
    if flavor == FULL:
        d = store.get(two_g, arity, FULL)
        if d.stable:
            out.append(("Q^0 sector", invariant_part(curve, refinement_coefficient(d.expr, 0))))
        if (two_g, arity) == (1, 2):
            w02 = store.get(0, 2, FULL).expr
            rhs = -Q * _d0(anti_invariant_part(curve, w02) / (w01 * 2))
            out.append(("(1/2,2) identity", invariant_part(curve, d.expr) - rhs))
        if (two_g, arity) == (2, 1):
            half = store.get(1, 1, FULL).expr
            rhs = -Q / 2 * _d0(anti_invariant_part(curve, half) / w01)
            out.append(("(1,1) identity", invariant_part(curve, d.expr) - rhs))
    elif flavor == QTOP:
        if two_g >= 2:
            d = store.get(two_g, arity, QTOP)
            rhs = _d0(_qtop_potential(store, two_g, arity))
            out.append(("qtop identity", invariant_part(curve, d.expr) - rhs))
    else:
        raise ValueError(f"no linear loop equation for flavor {flavor!r}")
    return out


def _ordered_splits(items: list, parts: int):
    """All ways to distribute items into ``parts`` labelled (possibly empty) blocks."""
    for labels in itertools.product(range(parts), repeat=len(items)):
        yield [[v for v, lab in zip(items, labels) if lab == b] for b in range(parts)]


def _qtop_potential(store: RecursionStore, two_g: int, arity: int) -> RatFunc:
    """Sum over k of (1/k) prod (-Delta_0 varpi_{g_i}(p0, J_i)/(2 omega_{0,1})).

    The factors run over g_1 + ... + g_k = g - 1/2 and J_1 ⊔ ... ⊔ J_k = J,
    excluding only (g_i, J_i) = (0, empty); genus-zero factors with
    nonempty J_i are needed as soon as J is nonempty.
    """
    curve = store.curve
    w01_2 = curve.omega01("z0") * 2
    ext = zvars(arity - 1, 1)
    cache = {}

    def factor(g2, block):
        key = (g2, tuple(block))
        if key not in cache:
            d = store.get(g2, len(block) + 1, QTOP).at(["z0", *block])
            cache[key] = -anti_invariant_part(curve, d) / w01_2
        return cache[key]

    total = RatFunc.constant(0)
    for k in range(1, two_g + len(ext)):
        for genera in itertools.product(range(two_g), repeat=k):
            if sum(genera) != two_g - 1:
                continue
            for blocks in _ordered_splits(ext, k):
                if any(g2 == 0 and not b for g2, b in zip(genera, blocks)):
                    continue
                term = RatFunc.constant(Fraction(1, k))
                for g2, block in zip(genera, blocks):
                    term = term * factor(g2, block)
                total = total + term
    return total


def check_linear_loop(store: RecursionStore, two_g: int, arity: int,
                      flavor: str = FULL) -> CheckReport:
    checks = linear_loop_residual(store, two_g, arity, flavor)
    if not checks:
        return CheckReport("linear-loop", (two_g, arity), True,
                           detail=f"({flavor}; no identity applies)")
    for label, residual in checks:
        if not residual.is_zero():
            return CheckReport("linear-loop", (two_g, arity), False, residual,
                               f"({flavor}; {label})")
    labels = ", ".join(label for label, _ in checks)
    return CheckReport("linear-loop", (two_g, arity), True, detail=f"({flavor}; {labels})")


# negative controls ------------------------------------------------------------------

def mutated_store(store: RecursionStore, two_g: int, arity: int, expr: RatFunc,
                  flavor: str = FULL) -> RecursionStore:
    """Copy of ``store`` with one entry replaced and nothing above it."""
    copy = RecursionStore(store.curve, certify=False)
    level = euler_level(two_g, arity)
    for key, d in store.entries.items():
        if euler_level(key[0], key[1]) < level or key in copy.entries:
            copy.entries.setdefault(key, d)
    copy.put(MultiDiff(two_g, arity, expr, flavor))
    return copy


def negative_controls(store: RecursionStore) -> list[CheckReport]:
    """Each report passes when the corresponding mutation is detected."""
    out = []
    half = store.get(1, 1, FULL)
    store.get(2, 1, FULL)
    flipped = mutated_store(store, 1, 1, -half.expr)
    flipped.entries[(2, 1, FULL)] = store.get(2, 1, FULL)
    r = check_loop_equation(flipped, 2, 1)
    out.append(CheckReport("control: flipped omega_{1/2,1}", (2, 1), not r.passed, r.witness,
                           "(loop equation must fail)"))

    w03 = store.get(0, 3, FULL)
    broken = w03.expr + RatFunc.var("z0") / (RatFunc.var("z1") + 1) ** 2
    r = check_structural(store, 0, 3, entry=MultiDiff(0, 3, broken))
    out.append(CheckReport("control: broken symmetry", (0, 3), not r.passed, r.witness,
                           "(structural check must fail)"))

    w_half2 = store.get(1, 2, FULL)
    shifted = mutated_store(store, 1, 2, w_half2.expr * 2)
    r = check_linear_loop(shifted, 1, 2)
    out.append(CheckReport("control: scaled omega_{1/2,2}", (1, 2), not r.passed, r.witness,
                           "(linear loop equation must fail)"))
    return out

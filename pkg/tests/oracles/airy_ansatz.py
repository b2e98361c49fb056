"""Independent sympy oracle for the Airy curve x = z^2, y = z, sigma(z) = -z.

Each omega_{g,n+1} is found by undetermined coefficients instead of by a
residue formula: an ansatz

    omega = P(z0, ..., zn; Q) / (prod z_i^A * prod_{i<j} (z_i + z_j)^B)

with P symmetric of bounded degree, coefficients polynomial in Q of degree
<= 2g and matching parity, is constrained by

  * residue-freeness in z0 (at 0 and at z0 = -z_j),
  * holomorphy at z0 = infinity,
  * the refined loop equation: R = Rec/(2 omega_{0,1}) + omega is holomorphic
    at z = 0 and z = infinity and satisfies R(-z) = R(z) (anti-invariance of
    R(z) dz).

The solution is unique, and the values produced here are frozen in the tests.
Run ``python3 tests/oracles/airy_ansatz.py`` to reprint them.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import sympy as sp

Q = sp.Symbol("Q")
Z = sp.Symbol("z")


def zs(k):
    return sp.symbols(f"z0:{k}")


def omega01(p):
    return 2 * p ** 2


def omega02(a, b):
    return 1 / (a + b) ** 2


def omega_half_one(p):
    return -Q / (2 * p)


def _bergman_sum(p, t):
    # dx(p) dx(t) / (x(p) - x(t))^2 with x = z^2
    return 4 * p * t / (p ** 2 - t ** 2) ** 2


@lru_cache(maxsize=None)
def omega(two_g: int, arity: int) -> sp.Expr:
    """Coefficient of dz0...dz_{arity-1}."""
    z = zs(arity)
    if (two_g, arity) == (0, 1):
        return omega01(z[0])
    if (two_g, arity) == (0, 2):
        return omega02(z[0], z[1])
    if (two_g, arity) == (1, 1):
        return omega_half_one(z[0])
    return _solve(two_g, arity)


def _at(two_g, arity, args):
    z = zs(arity)
    return omega(two_g, arity).subs(dict(zip(z, args)), simultaneous=True)


def rec(two_g: int, arity: int, p, J) -> sp.Expr:
    n = arity - 1
    total = 0
    for g1 in range(two_g + 1):
        g2 = two_g - g1
        for mask in range(1 << n):
            J1 = [J[i] for i in range(n) if mask >> i & 1]
            J2 = [J[i] for i in range(n) if not mask >> i & 1]
            if (g1 == 0 and not J1) or (g2 == 0 and not J2):
                continue
            total += _at(g1, len(J1) + 1, [p] + J1) * _at(g2, len(J2) + 1, [p] + J2)
    for t in range(n):
        rest = [J[i] for i in range(n) if i != t]
        total += _bergman_sum(p, J[t]) * _at(two_g, arity - 1, [p] + rest)
    if two_g >= 2:
        total += _at(two_g - 2, arity + 1, [p, p] + list(J))
    if two_g >= 1:
        dx = 2 * p
        total += Q * dx * sp.diff(_at(two_g - 1, arity, [p] + list(J)) / dx, p)
    return total


def _symmetric_numerator(z, degree, two_g, tag):
    """Symmetric homogeneous polynomial ansatz; returns (expression, unknowns)."""
    unknowns = []
    expr = 0
    n = len(z)
    for d in [degree]:
        for part in _partitions(d, n):
            mono = sum(sp.prod(v ** e for v, e in zip(z, perm))
                       for perm in set(itertools.permutations(part)))
            for k in range(two_g % 2, two_g + 1, 2):
                c = sp.Symbol(f"{tag}_{d}_{'_'.join(map(str, part))}_{k}")
                unknowns.append(c)
                expr += c * Q ** k * mono
    return expr, unknowns


def _partitions(d, n):
    """Non-increasing n-tuples of non-negative integers summing to d."""
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _partitions(d - first, n - 1):
            if rest[0] <= first:
                yield (first,) + rest


def _coefficient_equations(expr, gens):
    num = sp.numer(sp.together(expr))
    poly = sp.Poly(sp.expand(num), *gens)
    return [c for c in poly.coeffs()]


def _solve(two_g: int, arity: int):
    z = zs(arity)
    n = arity - 1
    A = 3 * two_g + 2 * arity  # generous pole-order bounds
    B = 2 * two_g + 2 if n else 0
    den = sp.prod(v ** A for v in z) * sp.prod((a + b) ** B for a, b in itertools.combinations(z, 2))
    den_degree = A * arity + B * arity * (arity - 1) // 2
    # the solution is homogeneous: x = z^2 makes omega_{g,n+1} scale with
    # weight -(6g + 4(n+1) - 6) under z -> lambda z
    degree = den_degree - (3 * two_g + 4 * arity - 6)
    num, unknowns = _symmetric_numerator(z, degree, two_g, f"c{two_g}_{arity}")
    w = num / den
    gens = (Q,) + tuple(z)
    eqs = []

    # regular at z0 = infinity: w dz0 needs deg_z0(num) <= deg_z0(den) - 2
    lead = sp.Poly(num, z[0])
    for k, c in zip(range(lead.degree(), -1, -1), lead.all_coeffs()):
        if k > A + B * n - 2:
            eqs += sp.Poly(c, *((Q,) + tuple(z[1:]))).coeffs()
    # residue-free in z0 at 0 and at -z_j
    eqs += _residue_equations(w, z[0], 0, A, gens)
    for j in range(1, arity):
        eqs += _residue_equations(w, z[0], -z[j], B, gens)

    # loop equation in p with J = z1..zn
    p = Z
    J = list(z[1:])
    wp = w.subs(z[0], p)
    R = sp.together(rec(two_g, arity, p, J) / (2 * omega01(p)) + wp)
    eqs += _coefficient_equations(R - R.subs(p, -p), (Q, p) + tuple(J))
    Rn, Rd = sp.fraction(R)
    Rn, Rd = sp.Poly(sp.expand(Rn), p), sp.Poly(sp.expand(Rd), p)
    order0 = min(m[0] for m in Rd.monoms())  # power of p dividing the denominator
    for k, c in Rn.terms():
        if k[0] < order0:
            eqs += sp.Poly(c, *((Q,) + tuple(J))).coeffs()
    # at infinity: deg_p(Rn) <= deg_p(Rd) - 2
    for k, c in Rn.terms():
        if k[0] > Rd.degree() - 2:
            eqs += sp.Poly(c, *((Q,) + tuple(J))).coeffs()

    sol = sp.linsolve(eqs, unknowns)
    if not sol:
        raise RuntimeError("the loop equation has no solution in the ansatz")
    value = sp.factor(sp.together(w.subs(dict(zip(unknowns, next(iter(sol)))))))
    free = value.free_symbols - set(gens)
    if free:
        raise RuntimeError(f"solution not unique, free parameters {free}")
    return value


def _residue_equations(w, var, center, order, gens):
    if order == 0:
        return []
    t = sp.Symbol("t")
    shifted = sp.together(w.subs(var, center + t) * t ** order)
    num, den = sp.fraction(shifted)
    # coefficient of t^(order-1) in the Taylor expansion of num/den at t=0
    series = sp.series(num / den, t, 0, order).removeO()
    coeff = sp.together(series.coeff(t, order - 1))
    return _coefficient_equations(coeff, tuple(g for g in gens if g != var))


TARGETS = [(0, 3), (1, 2), (2, 1), (3, 1), (0, 4), (2, 2), (4, 1)]


if __name__ == "__main__":
    for two_g, arity in TARGETS:
        print(f"2g={two_g} arity={arity}:", sp.factor(omega(two_g, arity)))

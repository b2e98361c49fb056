"""Laurent expansion, residues, partial fractions and local primitives.

Expansions are taken in one variable; every other variable is treated as an
element of the coefficient field.  Centers are finite rational functions of
the other variables or the point at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .poly import AlgebraError, RatFunc, poly_coefficients


class UnsupportedPoint(AlgebraError):
    pass


class UnsupportedFactorization(AlgebraError):
    pass


class NoRationalPrimitive(AlgebraError):
    pass


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "oo"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def as_center(center, var: str):
    """Validate a center: INF, or an exact value not involving ``var``."""
    if center is INF:
        return INF
    if isinstance(center, bool) or isinstance(center, float) or isinstance(center, complex):
        raise UnsupportedPoint(f"center {center!r} is not exact")
    if isinstance(center, (int, Fraction)):
        return RatFunc.constant(center)
    if isinstance(center, RatFunc):
        if center.involves(var):
            raise UnsupportedPoint(f"center depends on the expansion variable {var}")
        return center
    raise UnsupportedPoint(f"center {center!r} is not a rational point")


@dataclass(frozen=True)
class LaurentSeries:
    """Truncated Laurent series; at INF the local coordinate is w = 1/var."""

    variable: str
    center: object
    lowest_order: int
    coefficients: tuple
    truncation_order: int

    def coefficient(self, k: int) -> RatFunc:
        if k > self.truncation_order:
            raise IndexError(f"exponent {k} beyond truncation {self.truncation_order}")
        i = k - self.lowest_order
        if 0 <= i < len(self.coefficients):
            return self.coefficients[i]
        return RatFunc.constant(0)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def terms(self):
        for i, c in enumerate(self.coefficients):
            if not c.is_zero():
                yield self.lowest_order + i, c

    def local_coordinate(self) -> RatFunc:
        v = RatFunc.var(self.variable)
        if self.center is INF:
            return v.inverse()
        return v - self.center

    def to_ratfunc(self) -> RatFunc:
        """Re-sum the window as a rational function of the variable."""
        t = self.local_coordinate()
        total = RatFunc.constant(0)
        for k, c in self.terms():
            total = total + c * t ** k
        return total

    def __str__(self):
        t = "w" if self.center is INF else (
            self.variable if self.center == 0 else f"({self.variable}-({self.center}))")
        parts = [f"({c})*{t}^{k}" for k, c in self.terms()]
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O({t}^{self.truncation_order + 1})"


def _reverse(p, i: int, d: int):
    """var^d * p(1/var) for a raw polynomial p of degree <= d in variable i."""
    ctx = p.context()
    data = {}
    for exps, c in zip(p.monoms(), p.coeffs()):
        e = list(exps)
        e[i] = d - e[i]
        data[tuple(e)] = c
    return ctx.from_dict(data)


def _shift(p, var: str, center: RatFunc):
    """Raw p(var + c) times den(c)^deg, plus that degree; c free of var."""
    ctx = p.context()
    i = ctx.names().index(var)
    if center.is_polynomial():
        c = center.lift(ctx.names())
        cn = c.num / c.den.leading_coefficient()
        g = ctx.gens()
        args = [g[j] + cn if j == i else g[j] for j in range(ctx.nvars())]
        return p.compose(*args), 0
    c = center.lift(ctx.names())
    alpha, beta = c.num, c.den
    # p((alpha + beta*var)/beta) * beta^d
    d = int(p.degrees()[i])
    lin = alpha + beta * ctx.gens()[i]
    acc = ctx.from_dict({})
    for k, ck in enumerate(poly_coefficients(p, var)):
        if not ck.is_zero():
            acc = acc + ck * lin ** k * beta ** (d - k)
    return acc, d


def _inverse_numerators(psi_coeffs, e: int, K: int):
    """Series of psi^(-e) through t^K as numerators over d0^(K+1), d0 = psi(0)^e."""
    ctx = psi_coeffs[0].context()
    zero = ctx.from_dict({})
    power = [ctx.constant(1)]
    for _ in range(e):
        nxt = [zero] * min(len(power) + len(psi_coeffs) - 1, K + 1)
        for i, u in enumerate(power):
            if u.is_zero():
                continue
            for j, v in enumerate(psi_coeffs):
                if i + j > K:
                    break
                if not v.is_zero():
                    nxt[i + j] = nxt[i + j] + u * v
        power = nxt
    d0 = power[0]
    Q = []
    for j in range(K + 1):
        acc = ctx.constant(1) if j == 0 else zero
        for i in range(1, min(j, len(power) - 1) + 1):
            if not power[i].is_zero() and not Q[j - i].is_zero():
                acc = acc - power[i] * Q[j - i] * d0 ** (i - 1)
        Q.append(acc)
    # q_j = Q_j / d0^(j+1); rescale onto the common denominator d0^(K+1)
    return d0, [q * d0 ** (K - j) for j, q in enumerate(Q)]


def _expand_factored(num, den, var: str, center: RatFunc, order: int):
    """Laurent window of num/den at var = center using the factorization of den.

    Each factor gets its own short inverse series, so factors free of var
    and far-away poles are never raised to high powers.  Returns
    (lowest, coefficient list) or None when the window is empty.
    """
    ctx = num.context()
    content, facs = den.factor()
    const_part = ctx.constant(content)
    local = []
    k = 0
    i = ctx.names().index(var)
    scale = 0
    for fac, e in facs:
        e = int(e)
        if fac.degrees()[i] == 0:
            const_part = const_part * fac ** e
            continue
        shifted, hom = _shift(fac, var, center)
        coeffs = poly_coefficients(shifted, var)
        v = next(j for j, c in enumerate(coeffs) if not c.is_zero())
        k += v * e
        scale += hom * e
        local.append((coeffs[v:], e))
    K = order + k
    if K < 0:
        return None
    zero = ctx.from_dict({})
    series = [ctx.constant(1)] + [zero] * K
    common = ctx.constant(1)
    for coeffs, e in local:
        d0, nums = _inverse_numerators(coeffs, e, K)
        common = common * d0 ** (K + 1)
        out = [zero] * (K + 1)
        for a, u in enumerate(series):
            if u.is_zero():
                continue
            for b in range(K + 1 - a):
                if not nums[b].is_zero():
                    out[a + b] = out[a + b] + u * nums[b]
        series = out
    sn, hom_n = _shift(num, var, center)
    ns = poly_coefficients(sn, var)
    den_all = common * const_part
    result = []
    for j in range(K + 1):
        acc = zero
        for a in range(min(j, len(ns) - 1) + 1):
            if not ns[a].is_zero() and not series[j - a].is_zero():
                acc = acc + ns[a] * series[j - a]
        result.append(RatFunc(acc, den_all))
    if scale != hom_n:
        beta = RatFunc(center.lift(ctx.names()).den)
        factor = beta ** (scale - hom_n)
        result = [c * factor for c in result]
    return -k, result


def _trim(var, center, lowest, coeffs, order) -> LaurentSeries:
    start = 0
    while start < len(coeffs) and coeffs[start].is_zero():
        start += 1
    if start == len(coeffs):
        return LaurentSeries(var, center, order, (), order)
    return LaurentSeries(var, center, lowest + start, tuple(coeffs[start:]), order)


def laurent_expand(f: RatFunc, var: str, center, order: int) -> LaurentSeries:
    """Exact Laurent coefficients of f about center through exponent ``order``.

    At INF the expansion is of f(1/w) in w; differential Jacobians are the
    caller's business.
    """
    center = as_center(center, var)
    f = RatFunc.coerce(f)
    if var not in f.names:
        f = f.lift([var])
    if f.is_zero():
        return LaurentSeries(var, center, order, (), order)
    if center is INF:
        num, den = f.num, f.den
        i = num.context().names().index(var)
        dn, dd = int(num.degrees()[i]), int(den.degrees()[i])
        shift = dd - dn
        origin = RatFunc.constant(0)
        got = _expand_factored(_reverse(num, i, dn), _reverse(den, i, dd), var, origin,
                               order - shift)
        if got is None:
            return LaurentSeries(var, center, order, (), order)
        return _trim(var, center, got[0] + shift, got[1], order)
    f = f.lift(center.names)
    if _pole_order(f, var, center) + order < 0:
        return LaurentSeries(var, center, order, (), order)
    got = _expand_factored(f.num, f.den, var, center, order)
    if got is None:
        return LaurentSeries(var, center, order, (), order)
    return _trim(var, center, got[0], got[1], order)


def _pole_order(f: RatFunc, var: str, center) -> int:
    """Order of the pole of f (as a function) at a finite center; 0 if regular."""
    den = f.den
    sd, _ = _shift(den, var, center)
    for k, c in enumerate(poly_coefficients(sd, var)):
        if not c.is_zero():
            return k
    return 0


def residue_at(f: RatFunc, var: str, center) -> RatFunc:
    """Residue of the differential f·d(var) at center."""
    center = as_center(center, var)
    f = RatFunc.coerce(f)
    if f.is_zero() or not f.involves(var):
        return RatFunc.constant(0)
    if center is INF:
        s = laurent_expand(f, var, INF, 1)
        return -s.coefficient(1)
    f = f.lift(center.names)
    if _pole_order(f, var, center) == 0:
        return RatFunc.constant(0)
    return laurent_expand(f, var, center, -1).coefficient(-1)


def differential_series(f: RatFunc, var: str, center, order: int) -> LaurentSeries:
    """Expansion of f·d(var) in the local coordinate, Jacobian included."""
    center = as_center(center, var)
    if center is not INF:
        return laurent_expand(f, var, center, order)
    s = laurent_expand(f, var, INF, order + 2)
    coeffs = tuple(-c for c in s.coefficients)
    return _trim(var, INF, s.lowest_order - 2, list(coeffs), order)


@dataclass(frozen=True)
class PartialFractions:
    variable: str
    terms: tuple  # (pole, order, coefficient) for coefficient/(var - pole)^order
    polynomial: RatFunc

    def poles(self):
        seen = []
        for p, _, _ in self.terms:
            if p not in seen:
                seen.append(p)
        return seen

    def reconstruct(self) -> RatFunc:
        v = RatFunc.var(self.variable)
        total = self.polynomial
        for pole, k, c in self.terms:
            total = total + c / (v - pole) ** k
        return total


def linear_factors(p, var: str):
    """Roots of a raw polynomial in ``var`` with multiplicities.

    Raises UnsupportedFactorization for an irreducible factor of degree >= 2.
    """
    ctx = p.context()
    i = ctx.names().index(var)
    _, facs = p.factor()
    roots = []
    for fac, e in facs:
        d = fac.degrees()[i]
        if d == 0:
            continue
        if d > 1:
            raise UnsupportedFactorization(
                f"irreducible factor of degree {d} in {var}: {fac}")
        b, a = poly_coefficients(fac, var)
        roots.append((RatFunc(-b, a), e))
    roots.sort(key=lambda t: str(t[0]))
    return roots


def partial_fractions(f: RatFunc, var: str) -> PartialFractions:
    f = RatFunc.coerce(f)
    if not f.involves(var):
        return PartialFractions(var, (), f)
    terms = []
    for root, mult in linear_factors(f.den, var):
        s = laurent_expand(f, var, root, -1)
        for k in range(mult, 0, -1):
            c = s.coefficient(-k)
            if not c.is_zero():
                terms.append((root, k, c))
    dn, dd = f.degree(var)
    poly = RatFunc.constant(0)
    if dn >= dd:
        s = laurent_expand(f, var, INF, 0)
        v = RatFunc.var(var)
        for k, c in s.terms():
            poly = poly + c * v ** (-k)
    return PartialFractions(var, tuple(terms), poly)


def pole_locus(f: RatFunc, var: str) -> list:
    """Finite poles of f in var, plus INF if f·d(var) is singular there."""
    poles = [r for r, _ in linear_factors(f.den, var)] if f.involves(var) else []
    if not f.is_zero():
        dn, dd = f.degree(var)
        if dd - dn < 2:
            poles.append(INF)
    return poles


def local_antiderivative(omega: RatFunc, var: str, center, order: int = 0) -> LaurentSeries:
    """Laurent germ F at center with dF = omega·d(var) through exponent ``order``."""
    s = differential_series(omega, var, center, max(order - 1, -1))
    if not s.coefficient(-1).is_zero():
        raise NoRationalPrimitive(f"nonzero residue at {center}")
    out = []
    lowest = s.lowest_order + 1
    for i, c in enumerate(s.coefficients):
        k = s.lowest_order + i
        out.append(RatFunc.constant(0) if k == -1 else c / (k + 1))
    return _trim(var, s.center, lowest, out, order)

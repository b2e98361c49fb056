"""Exact multivariate polynomials and rational functions over the rationals.

Arithmetic is delegated to FLINT's ``fmpq_mpoly`` (via python-flint).  This
module adds what the engine needs on top of it: a canonical variable order,
normalized rational functions, variable renaming, and a byte-stable text
format.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import flint

REFINEMENT = "Q"
BASE = "x"
COORDINATE = "z"

_INDEXED = re.compile(r"^z(\d+)$")
_DIFF = re.compile(r"^dz(\d+)$")


class AlgebraError(ArithmeticError):
    """Base class for exact-arithmetic failures."""


class ZeroDivision(AlgebraError, ZeroDivisionError):
    pass


def variable_key(name: str):
    """Sort key realizing the canonical variable order.

    Geometry variables come first (base ``x``, coordinate ``z``, then
    ``z0, z1, ...`` by index), then the refinement symbol, then parameters
    alphabetically.  Differential markers ``dzK`` sort after everything; they
    only ever appear transiently while parsing.
    """
    if name == BASE:
        return (0, -2, "")
    if name == COORDINATE:
        return (0, -1, "")
    m = _INDEXED.match(name)
    if m:
        return (0, int(m.group(1)), "")
    if name == REFINEMENT:
        return (1, 0, "")
    m = _DIFF.match(name)
    if m:
        return (3, int(m.group(1)), "")
    return (2, 0, name)


def canonical_names(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=variable_key))


@lru_cache(maxsize=None)
def _context(names: tuple[str, ...]):
    return flint.fmpq_mpoly_ctx.get(names, "deglex")


def context_for(names: Iterable[str]):
    return _context(canonical_names(names))


def _to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, int):
        return flint.fmpq(c)
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    raise TypeError(f"not an exact rational: {c!r}")


def fmpq_to_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _lift(p, ctx):
    if p.context() is ctx:
        return p
    return p.project_to_context(ctx)


def _used_names(p) -> set[str]:
    names = p.context().names()
    return {names[i] for i, d in enumerate(p.degrees()) if d > 0}


def format_poly(p) -> str:
    """Canonical text of a raw fmpq_mpoly: graded-lex descending, no spaces."""
    if p.is_zero():
        return "0"
    names = p.context().names()
    pieces = []
    for k, (exps, c) in enumerate(zip(p.monoms(), p.coeffs())):
        mono = []
        for name, e in zip(names, exps):
            if e == 1:
                mono.append(name)
            elif e > 1:
                mono.append(f"{name}^{e}")
        c = fmpq_to_fraction(c)
        neg = c < 0
        c = -c if neg else c
        if mono:
            head = [] if c == 1 else [str(c)]
            body = "*".join(head + mono)
        else:
            body = str(c)
        if k == 0:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append(("-" if neg else "+") + body)
    return "".join(pieces)


class RatFunc:
    """Normalized quotient num/den of polynomials with rational coefficients.

    The pair is kept coprime and den is monic with respect to the canonical
    graded-lex order, so structurally equal values have identical text.
    Instances are immutable.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, normalized: bool = False):
        if den is None:
            den = num.context().from_dict({(0,) * num.context().nvars(): 1})
        if den.context() is not num.context():
            ctx = context_for(set(num.context().names()) | set(den.context().names()))
            num, den = _lift(num, ctx), _lift(den, ctx)
        if den.is_zero():
            raise ZeroDivision("division by the zero rational function")
        if not normalized:
            if num.is_zero():
                den = den.context().from_dict({(0,) * den.context().nvars(): 1})
            elif not den.is_constant():
                g = num.gcd(den)
                if not g.is_one():
                    num, den = num // g, den // g
            lc = den.leading_coefficient()
            if lc != 1:
                num, den = num / lc, den / lc
        self.num = num
        self.den = den
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, names: Iterable[str] = ()) -> "RatFunc":
        ctx = context_for(names)
        return cls(ctx.constant(_to_fmpq(Fraction(value))), normalized=True)

    @classmethod
    def var(cls, name: str, names: Iterable[str] = ()) -> "RatFunc":
        ctx = context_for(set(names) | {name})
        return cls(ctx.gen(ctx.variable_to_index(name)), normalized=True)

    @classmethod
    def coerce(cls, value) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.constant(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to RatFunc")

    # basic queries ------------------------------------------------------
    @property
    def names(self) -> tuple[str, ...]:
        return self.num.context().names()

    def variables(self) -> tuple[str, ...]:
        """Variables actually occurring, in canonical order."""
        return canonical_names(_used_names(self.num) | _used_names(self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        if self.num.is_zero():
            return Fraction(0)
        return fmpq_to_fraction(self.num.leading_coefficient() / self.den.leading_coefficient())

    def involves(self, name: str) -> bool:
        return name in self.variables()

    def degree(self, name: str) -> tuple[int, int]:
        """Degrees of (num, den) in one variable."""
        names = self.names
        if name not in names:
            return (0, 0)
        i = names.index(name)
        dn = 0 if self.num.is_zero() else int(self.num.degrees()[i])
        return (dn, int(self.den.degrees()[i]))

    # context management -------------------------------------------------
    def lift(self, names: Iterable[str]) -> "RatFunc":
        ctx = context_for(set(names) | set(self.names))
        if ctx is self.num.context():
            return self
        return RatFunc(_lift(self.num, ctx), _lift(self.den, ctx), normalized=True)

    def compact(self) -> "RatFunc":
        """Same value in the smallest ring holding its variables."""
        ctx = _context(self.variables())
        if ctx is self.num.context():
            return self
        return RatFunc(self.num.project_to_context(ctx), self.den.project_to_context(ctx),
                       normalized=True)

    def _pair(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc.coerce(other)
        a, b = self, other
        if a.num.context() is not b.num.context():
            ctx = context_for(set(a.names) | set(b.names))
            a = RatFunc(_lift(a.num, ctx), _lift(a.den, ctx), normalized=True)
            b = RatFunc(_lift(b.num, ctx), _lift(b.den, ctx), normalized=True)
        return a, b

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        a, b = self._pair(other)
        if b.num.is_zero():
            return a
        if a.num.is_zero():
            return b
        if a.den == b.den:
            return RatFunc(a.num + b.num, a.den)
        if a.den.is_constant() and b.den.is_constant():
            return RatFunc(a.num * b.den + b.num * a.den, a.den * b.den)
        g = a.den.gcd(b.den)
        bd, ad = b.den // g, a.den // g
        return RatFunc(a.num * bd + b.num * ad, a.den * bd)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, normalized=True)

    def __sub__(self, other):
        a, b = self._pair(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        if a.num.is_zero() or b.num.is_zero():
            return RatFunc(a.num.context().from_dict({}), normalized=False)
        n1, d1, n2, d2 = a.num, a.den, b.num, b.den
        if not d2.is_constant():
            g = n1.gcd(d2)
            if not g.is_one():
                n1, d2 = n1 // g, d2 // g
        if not d1.is_constant():
            g = n2.gcd(d1)
            if not g.is_one():
                n2, d1 = n2 // g, d1 // g
        den = d1 * d2
        num = n1 * n2
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFunc(num, den, normalized=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivision("division by the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        a, b = self._pair(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise TypeError("only integer exponents are supported")
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.num ** e, self.den ** e, normalized=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.constant(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        a, b = self._pair(other)
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(str(self))
        return self._hash

    # calculus and substitution -----------------------------------------
    def derivative(self, name: str) -> "RatFunc":
        if name not in self.names:
            return RatFunc(self.num.context().from_dict({}))
        n, d = self.num, self.den
        if d.is_constant():
            return RatFunc(n.derivative(name), d, normalized=True)
        return RatFunc(n.derivative(name) * d - n * d.derivative(name), d * d)

    def rename(self, mapping: Mapping[str, str]) -> "RatFunc":
        """Rename variables (several may map to the same target)."""
        mapping = {k: v for k, v in mapping.items() if k in self.names and k != v}
        if not mapping:
            return self
        targets = [mapping.get(n, n) for n in self.names]
        ctx = context_for(targets)
        # compose with generators: project_to_context ignores swapped names
        gens = ctx.gens()
        index = {n: i for i, n in enumerate(ctx.names())}
        args = [gens[index[t]] for t in targets]
        num = self.num.compose(*args, ctx=ctx)
        den = self.den.compose(*args, ctx=ctx)
        if den.is_zero():
            raise ZeroDivision("renaming collapsed the denominator to zero")
        return RatFunc(num, den)

    def substitute(self, values: Mapping[str, "RatFunc | int | Fraction"]) -> "RatFunc":
        """Simultaneous substitution of rational functions for variables."""
        values = {k: RatFunc.coerce(v) for k, v in values.items() if k in self.names}
        if not values:
            return self
        names = set(self.names) - set(values)
        for v in values.values():
            names |= set(v.names)
        ctx = context_for(names)
        # bring every substituted value to a common denominator per variable and
        # evaluate num and den as homogenized compositions
        num = _compose_rational(self.num, values, ctx)
        den = _compose_rational(self.den, values, ctx)
        if den[0].is_zero():
            raise ZeroDivision("substitution makes the denominator vanish")
        n_num, n_den = num
        d_num, d_den = den
        return RatFunc(n_num * d_den, n_den * d_num)

    def coefficients(self, name: str) -> list["RatFunc"]:
        """Coefficients of a polynomial dependence on ``name``.

        Requires the denominator to be free of ``name``; entry k is the
        coefficient of name^k.
        """
        if self.degree(name)[1] != 0:
            raise AlgebraError(f"denominator depends on {name}")
        return [RatFunc(c, self.den) for c in poly_coefficients(self.num, name)]

    # text ---------------------------------------------------------------
    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFunc({self})"


def poly_coefficients(p, name: str) -> list:
    """Split a raw polynomial into coefficients of powers of one variable."""
    ctx = p.context()
    if name not in ctx.names():
        return [p]
    i = ctx.names().index(name)
    if p.is_zero():
        return [p]
    buckets: dict[int, dict] = {}
    for exps, c in zip(p.monoms(), p.coeffs()):
        k = exps[i]
        e = list(exps)
        e[i] = 0
        buckets.setdefault(k, {})[tuple(e)] = c
    top = max(buckets)
    return [ctx.from_dict(buckets.get(k, {})) for k in range(top + 1)]


def _compose_rational(p, values: Mapping[str, RatFunc], ctx):
    """Evaluate raw polynomial p at rational substitutions; returns (num, den)."""
    src = p.context()
    one = ctx.constant(1)
    if p.is_zero():
        return ctx.from_dict({}), one
    # common denominator per substituted variable, homogenize in each
    degs = [int(d) for d in p.degrees()]
    parts = {}
    for name, v in values.items():
        v = v.lift(ctx.names())
        parts[name] = (_lift(v.num, ctx), _lift(v.den, ctx))
    total_den = one
    args = []
    scale = {}
    for idx, name in enumerate(src.names()):
        if name in parts:
            vn, vd = parts[name]
            d = degs[idx]
            scale[name] = (vn, vd, d)
            total_den = total_den * vd ** d
            args.append(None)
        else:
            args.append(ctx.gen(ctx.variable_to_index(name)))
    if all(vd.is_constant() for vn, vd, d in scale.values()):
        # polynomial substitutions: plain composition suffices
        comp = [a if a is not None else scale[n][0] / scale[n][1].leading_coefficient()
                for a, n in zip(args, src.names())]
        return p.compose(*comp, ctx=ctx), one
    acc = ctx.from_dict({})
    for exps, c in zip(p.monoms(), p.coeffs()):
        term = ctx.constant(c)
        for idx, (name, e) in enumerate(zip(src.names(), exps)):
            if name in scale:
                vn, vd, d = scale[name]
                term = term * vn ** e * vd ** (d - e)
            elif e:
                term = term * args[idx] ** e
        acc = acc + term
    return acc, total_den


def format_ratfunc(f: RatFunc, diff_markers: tuple[str, ...] = ()) -> str:
    """Canonical text: numerator, optional differential markers, factored denominator.

    The denominator is written as a product of integer-primitive irreducible
    factors; its rational content is folded into the numerator.
    """
    num = f.num
    factors = ""
    if not f.den.is_constant():
        content, facs = f.den.factor()
        num = num / content
        factors = _format_factors(facs)
    text = format_poly(num)
    multi = len(num.coeffs()) > 1
    if diff_markers:
        marks = "*".join(diff_markers)
        if num.is_zero():
            head = "0"
        elif text == "1":
            head = marks
        elif text == "-1":
            head = "-" + marks
        elif not multi:
            head = text + "*" + marks
        else:
            head = "(" + text + ")*" + marks
    else:
        head = "(" + text + ")" if multi and factors else text
    return head + "/" + factors if factors else head


def _format_factors(facs) -> str:
    items = []
    for fac, e in facs:
        s = format_poly(fac)
        items.append((fac.total_degree(), s, int(e), len(fac.coeffs()) > 1))
    items.sort(key=lambda t: (t[0], t[1]))
    texts = []
    for _, s, e, compound in items:
        base = f"({s})" if compound else s
        texts.append(base if e == 1 else f"{base}^{e}")
    body = "*".join(texts)
    return body if len(texts) == 1 else f"({body})"


def format_factored(p) -> str:
    content, facs = p.factor()
    body = _format_factors(facs)
    if content != 1:
        return f"{fmpq_to_fraction(content)}*{body}"
    return body


def var(name: str) -> RatFunc:
    return RatFunc.var(name)


def const(value) -> RatFunc:
    return RatFunc.constant(value)

"""Genus-zero hyperelliptic refined spectral curves.

A curve is given in a global coordinate ``z`` on the Riemann sphere by
rational functions x(z), y(z) and a Moebius involution sigma(z) with
x∘sigma = x.  Every distinguished point must be rational (over the field
of symbolic parameters) or infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import INF, RatFunc, UnsupportedFactorization, ZeroDivision
from .algebra.poly import COORDINATE, REFINEMENT
from .algebra.series import linear_factors

Z = COORDINATE


class CurveError(ValueError):
    kind = "curve-error"


class InvolutionFailure(CurveError):
    kind = "involution-failure"


class CoverFailure(CurveError):
    kind = "cover-failure"


class RelationFailure(CurveError):
    kind = "relation-failure"


class IrrationalPoint(CurveError):
    kind = "irrational-distinguished-point"


class InvalidHalf(CurveError):
    kind = "invalid-ptilde-half"


@dataclass(frozen=True)
class CurveConfig:
    """User-level curve data; expressions are already in the coordinate ``z``."""

    x: RatFunc
    y: RatFunc
    sigma: RatFunc
    relation: tuple | None = None  # (a, b, c) as RatFunc in "x"
    ptilde_plus: tuple = ()  # ((point or INF, mu), ...)
    parameters: tuple = ()  # ((name, Fraction or None), ...)
    options: tuple = ()  # ((key, value), ...)
    coordinate: str = Z

    def bindings(self) -> dict:
        return {k: v for k, v in self.parameters if v is not None}

    def symbolic(self) -> list[str]:
        return [k for k, v in self.parameters if v is None]

    def option(self, key, default=None):
        return dict(self.options).get(key, default)

    def with_parameters(self, values: dict) -> "CurveConfig":
        params = []
        for k, v in self.parameters:
            params.append((k, values.get(k, v)))
        for k in values:
            if k not in dict(self.parameters):
                raise CurveError(f"unknown parameter {k!r}")
        return CurveConfig(self.x, self.y, self.sigma, self.relation, self.ptilde_plus,
                           tuple(params), self.options, self.coordinate)

    def canonical_text(self) -> str:
        """Deterministic description used for content hashing."""
        lines = [f"x={self.x}", f"y={self.y}", f"sigma={self.sigma}"]
        if self.relation:
            lines += [f"{k}={v}" for k, v in zip("abc", self.relation)]
        for p, mu in self.ptilde_plus:
            lines.append(f"ptilde+ {p}: {mu}")
        for k, v in sorted(self.parameters):
            lines.append(f"param {k}={'symbolic' if v is None else v}")
        return "\n".join(lines) + "\n"


def _point_key(p):
    return (1, "") if p is INF else (0, str(p))


def point_text(p) -> str:
    return "oo" if p is INF else str(p)


@dataclass(frozen=True)
class RamificationData:
    fixed_points: tuple
    effective: tuple
    ineffective: tuple
    ptilde: tuple  # ((point, "0" or "oo", order), ...)
    ptilde_plus: tuple  # ((point, mu), ...)
    ptilde_minus: tuple  # points
    auto_split: bool = False

    def ptilde_type(self, p):
        for q, t, _ in self.ptilde:
            if _same(q, p):
                return t
        return None

    def summary(self) -> str:
        def pts(seq):
            return "{" + ", ".join(point_text(p) for p in seq) + "}"

        zeros = [p for p, t, _ in self.ptilde if t == "0"]
        poles = [p for p, t, _ in self.ptilde if t == "oo"]
        lines = [
            f"R = {pts(self.fixed_points)}",
            f"R* = {pts(self.effective)}",
            f"R ineffective = {pts(self.ineffective)}",
            f"Ptilde(0) = {pts(zeros)}",
            f"Ptilde(oo) = {pts(poles)}",
            "Ptilde+ = {" + ", ".join(f"{point_text(p)}: mu={m}" for p, m in self.ptilde_plus)
            + "}" + (" (automatic split, mu=0)" if self.auto_split else ""),
            f"Ptilde- = {pts(self.ptilde_minus)}",
        ]
        return "\n".join(lines)


def _same(p, q) -> bool:
    if p is INF or q is INF:
        return p is q
    return p == q


class SpectralCurve:
    """Validated curve with parameters pinned; built by :func:`validate_curve`."""

    def __init__(self, config: CurveConfig, x: RatFunc, y: RatFunc, sigma: RatFunc,
                 relation, ptilde_plus):
        self.config = config
        self.x = x
        self.y = y
        self.sigma = sigma
        self.relation = relation
        self.declared_plus = ptilde_plus
        self.dx = x.derivative(Z)
        self.sigma_prime = sigma.derivative(Z)
        self.delta_y = y - self.pull(y, Z)
        self.ramification = classify_points(self)

    # sigma action -----------------------------------------------------------
    def sigma_in(self, var: str) -> RatFunc:
        return self.sigma.rename({Z: var})

    def pull(self, f: RatFunc, var: str) -> RatFunc:
        """Function pullback f(sigma(var))."""
        if not f.involves(var):
            return f
        return f.substitute({var: self.sigma_in(var)})

    def pull_diff(self, f: RatFunc, var: str) -> RatFunc:
        """Coefficient of the differential pullback sigma^*(f d var)."""
        return self.pull(f, var) * self.sigma_prime.rename({Z: var})

    def sigma_point(self, p):
        """Image of a point (RatFunc free of z, or INF) under sigma."""
        num = RatFunc(self.sigma.num)
        den = RatFunc(self.sigma.den)
        if p is INF:
            a = num.coefficients(Z)
            c = den.coefficients(Z)
            a1 = a[1] if len(a) > 1 else RatFunc.constant(0)
            c1 = c[1] if len(c) > 1 else RatFunc.constant(0)
            if c1.is_zero():
                return INF
            return a1 / c1
        d = den.substitute({Z: p})
        if d.is_zero():
            return INF
        return num.substitute({Z: p}) / d

    def in_var(self, f: RatFunc, var: str) -> RatFunc:
        return f.rename({Z: var})

    # unstable data ----------------------------------------------------------
    def omega01(self, var: str = Z) -> RatFunc:
        return (self.delta_y * self.dx / 2).rename({Z: var})

    def omega02(self, v0: str = "z0", v1: str = "z1") -> RatFunc:
        s1 = self.sigma_in(v1)
        sp1 = self.sigma_prime.rename({Z: v1})
        return -sp1 / (RatFunc.var(v0) - s1) ** 2

    def eta(self, p, var: str = Z) -> RatFunc:
        """Coefficient of eta^p(var) for a concrete point p (not fixed by sigma)."""
        for r in self.ramification.fixed_points:
            if _same(r, p):
                raise CurveError(f"eta^p undefined at the fixed point {point_text(p)}")
        v = RatFunc.var(var)
        q = self.sigma_point(p)
        out = RatFunc.constant(0)
        if p is not INF:
            out = out + 1 / (v - p)
        if q is not INF:
            out = out - 1 / (v - q)
        return out

    def eta_kernel(self, v0: str = "z0", vp: str = Z) -> RatFunc:
        """eta^p(p0) with p given by the variable ``vp``."""
        w0 = RatFunc.var(v0)
        return 1 / (w0 - RatFunc.var(vp)) - 1 / (w0 - self.sigma_in(vp))

    def omega_half_one(self, var: str = Z) -> RatFunc:
        dlog = self.delta_y.derivative(Z) / self.delta_y
        total = -dlog
        for p, mu in self.ramification.ptilde_plus:
            total = total + mu * self.eta(p, Z)
        return (RatFunc.var(REFINEMENT) / 2 * total).rename({Z: var})

    def involution_split(self, f: RatFunc, var: str = Z):
        """(f + sigma^*f, f - sigma^*f) for the differential f d var."""
        s = self.pull_diff(f, var)
        return f + s, f - s

    def bergman_sum(self, v0: str = "z0", v1: str = "z1") -> RatFunc:
        x0, x1 = self.x.rename({Z: v0}), self.x.rename({Z: v1})
        return self.dx.rename({Z: v0}) * self.dx.rename({Z: v1}) / (x0 - x1) ** 2


def _bind(f: RatFunc, bindings: dict) -> RatFunc:
    vals = {k: RatFunc.constant(v) for k, v in bindings.items()}
    return f.substitute(vals) if vals else f


def validate_curve(cfg: CurveConfig) -> SpectralCurve:
    b = cfg.bindings()
    x, y, sigma = (_bind(f, b) for f in (cfg.x, cfg.y, cfg.sigma))
    z = RatFunc.var(Z)
    dn, dd = sigma.degree(Z)
    if max(dn, dd) != 1:
        raise InvolutionFailure("sigma is not a Moebius transformation of z")
    if sigma == z:
        raise InvolutionFailure("sigma is the identity")
    try:
        twice = sigma.substitute({Z: sigma})
    except ZeroDivision:
        raise InvolutionFailure("sigma∘sigma is undefined") from None
    if twice != z:
        raise InvolutionFailure(f"sigma∘sigma = {twice}, not the identity")
    if x.substitute({Z: sigma}) != x:
        raise CoverFailure("x∘sigma differs from x")
    relation = None
    if cfg.relation:
        relation = tuple(_bind(f, b) for f in cfg.relation)
        a, bb, c = (f.substitute({"x": x}) for f in relation)
        if not (a * y ** 2 + bb * y + c).is_zero():
            raise RelationFailure("a(x)y^2 + b(x)y + c(x) does not vanish on the curve")
    plus = []
    for p, mu in cfg.ptilde_plus:
        p = p if p is INF else _bind(p, b)
        plus.append((p, _bind(RatFunc.coerce(mu), b)))
    return SpectralCurve(cfg, x, y, sigma, relation, tuple(plus))


def _roots(poly, what: str):
    try:
        return linear_factors(poly, Z)
    except UnsupportedFactorization as e:
        raise IrrationalPoint(f"{what}: {e}") from None


def _order_at_infinity(f: RatFunc) -> int:
    """Order of the differential f dz at infinity."""
    dn, dd = f.degree(Z)
    return dd - dn - 2


def classify_points(curve: SpectralCurve) -> RamificationData:
    sigma = curve.sigma
    z = RatFunc.var(Z)
    fixed = [r for r, _ in _roots((sigma - z).num, "fixed point of sigma")]
    if curve.sigma_point(INF) is INF:
        fixed.append(INF)

    form = curve.delta_y * curve.dx  # Delta y * dx as a coefficient of dz
    if form.is_zero():
        raise CurveError("Delta y vanishes identically: y is sigma-invariant")
    divisor = []
    if form.involves(Z):
        for r, m in _roots(form.num, "zero of Delta y dx"):
            divisor.append((r, m))
        for r, m in _roots(form.den, "pole of Delta y dx"):
            divisor.append((r, -m))
    ord_inf = _order_at_infinity(form)
    if ord_inf != 0:
        divisor.append((INF, ord_inf))

    def order_at(p):
        for q, m in divisor:
            if _same(p, q):
                return m
        return 0

    effective = [r for r in fixed if order_at(r) >= 0]
    ineffective = [r for r in fixed if order_at(r) < 0]
    ptilde = []
    for q, m in divisor:
        if any(_same(q, r) for r in fixed):
            continue
        ptilde.append((q, "0" if m > 0 else "oo", m))
    ptilde.sort(key=lambda t: _point_key(t[0]))

    declared = list(curve.declared_plus)
    auto = False
    if not declared and ptilde:
        auto = True
        seen = []
        for q, _, _ in ptilde:
            if any(_same(q, s) or _same(curve.sigma_point(q), s) for s in seen):
                continue
            seen.append(q)
        declared = [(q, RatFunc.constant(0)) for q in seen]
    plus_pts = [p for p, _ in declared]
    for p in plus_pts:
        if not any(_same(p, q) for q, _, _ in ptilde):
            raise InvalidHalf(f"declared point {point_text(p)} is not in Ptilde")
    minus = [curve.sigma_point(p) for p in plus_pts]
    for m in minus:
        if any(_same(m, p) for p in plus_pts):
            raise InvalidHalf(f"Ptilde+ contains both {point_text(m)} and its sigma-image")
    if len(plus_pts) + len(minus) != len(ptilde) or len(
            {point_text(p) for p in plus_pts}) != len(plus_pts):
        raise InvalidHalf("declared Ptilde+ does not cover Ptilde exactly once per sigma-pair")
    fixed.sort(key=_point_key)
    effective.sort(key=_point_key)
    ineffective.sort(key=_point_key)
    return RamificationData(tuple(fixed), tuple(effective), tuple(ineffective), tuple(ptilde),
                            tuple(declared), tuple(minus), auto)


def unstable_differentials(curve: SpectralCurve):
    return UnstableSet(curve.omega01("z0"), curve.omega02("z0", "z1"),
                       curve.omega_half_one("z0"))


@dataclass(frozen=True)
class UnstableSet:
    omega01: RatFunc
    omega02: RatFunc
    omega_half_one: RatFunc

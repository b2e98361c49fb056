"""Curve files: a small INI-like format describing a refined spectral curve.

Example::

    [curve]
    z = z
    x = z^2
    y = z
    sigma = -z

    [relation]
    a = 1
    b = 0
    c = -x

    [parameters]
    l0 = 3/2
    mu0 = symbolic

    [ptilde_plus]
    point = 1, mu = mu0

    [options]
    depth = 2
    kmax = 6
    seeds = 1, 2, 3

Comments start with ``#``.  ``point = oo`` declares the point at infinity,
and ``mu`` may also sit on its own line directly after its ``point``.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction

from .algebra import INF, ParseError, RatFunc, parse_expr
from .algebra.poly import COORDINATE, format_ratfunc, variable_key
from .curve import CurveConfig

SECTIONS = ("curve", "relation", "parameters", "ptilde_plus", "options")
CURVE_KEYS = ("z", "x", "y", "sigma")
RELATION_KEYS = ("a", "b", "c")
OPTION_KEYS = ("depth", "kmax", "seeds")
INFINITY_NAMES = ("oo", "infinity")

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_RESERVED = re.compile(r"(x|z|Q|alpha|oo|infinity|symbolic|z\d+|dz\d*)$")
_RATIONAL = re.compile(r"\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


class ConfigError(ParseError):
    pass


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _split_assignment(body: str, lineno: int, offset: int):
    """key = value; returns (key, value, column of value)."""
    if "=" not in body:
        col = offset + len(body) - len(body.lstrip()) + 1
        raise ConfigError("expected 'key = value'", lineno, col)
    key_part, value_part = body.split("=", 1)
    key = key_part.strip()
    if not key:
        raise ConfigError("missing key before '='", lineno, offset + 1)
    value_col = offset + len(key_part) + 2 + len(value_part) - len(value_part.lstrip())
    return key, value_part.strip(), value_col


def _key_column(body: str, offset: int) -> int:
    return offset + len(body) - len(body.lstrip()) + 1


def _parse_int(text: str, lineno: int, col: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", lineno, col) from None


def parse_curve_config(text: str) -> CurveConfig:
    section = None
    seen_sections = set()
    curve = {}
    relation = {}
    params = {}
    plus = []  # [point, mu, line] with mu None until given
    options = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        stripped = body.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError("unterminated section header", lineno, _key_column(body, 0))
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise ConfigError(f"unknown section [{name}]", lineno, _key_column(body, 0))
            if name in seen_sections:
                raise ConfigError(f"duplicate section [{name}]", lineno, _key_column(body, 0))
            seen_sections.add(name)
            section = name
            continue
        if section is None:
            raise ConfigError("assignment outside of a section", lineno, _key_column(body, 0))
        if section == "ptilde_plus":
            _ptilde_line(body, lineno, plus)
            continue
        key, value, vcol = _split_assignment(body, lineno, 0)
        kcol = _key_column(body, 0)
        if section == "curve":
            if key not in CURVE_KEYS:
                raise ConfigError(f"unknown key {key!r} in [curve]", lineno, kcol)
            if key in curve:
                raise ConfigError(f"duplicate key {key!r}", lineno, kcol)
            curve[key] = (value, lineno, vcol)
        elif section == "relation":
            if key not in RELATION_KEYS:
                raise ConfigError(f"unknown key {key!r} in [relation]", lineno, kcol)
            if key in relation:
                raise ConfigError(f"duplicate key {key!r}", lineno, kcol)
            relation[key] = (value, lineno, vcol)
        elif section == "parameters":
            if not _NAME.match(key):
                raise ConfigError(f"invalid parameter name {key!r}", lineno, kcol)
            if _RESERVED.match(key):
                raise ConfigError(f"parameter name {key!r} is reserved", lineno, kcol)
            if key in params:
                raise ConfigError(f"duplicate parameter {key!r}", lineno, kcol)
            if value == "symbolic":
                params[key] = None
            else:
                params[key] = parse_rational(value, lineno, vcol)
        else:
            if key not in OPTION_KEYS:
                raise ConfigError(f"unknown option {key!r}", lineno, kcol)
            if key in options:
                raise ConfigError(f"duplicate option {key!r}", lineno, kcol)
            if key == "seeds":
                items = [s.strip() for s in value.split(",") if s.strip()]
                options[key] = tuple(_parse_int(s, lineno, vcol) for s in items)
            else:
                options[key] = _parse_int(value, lineno, vcol)

    for key in ("x", "y", "sigma"):
        if key not in curve:
            raise ConfigError(f"[curve] is missing {key!r}", len(text.splitlines()) + 1, 1)
    coord = curve["z"][0] if "z" in curve else COORDINATE
    if "z" in curve:
        _, lineno, vcol = curve["z"]
        if not _NAME.match(coord) or coord in ("x", "Q", "alpha") or coord in params:
            raise ConfigError(f"invalid coordinate symbol {coord!r}", lineno, vcol)
    for name in params:
        if name == coord:
            raise ConfigError(f"parameter {name!r} clashes with the coordinate", 1, 1)

    names = set(params)

    def expr(entry, allowed):
        value, lineno, vcol = entry
        f = parse_expr(value, allowed=allowed, line=lineno, column=vcol)
        return f.rename({coord: COORDINATE}) if coord != COORDINATE else f

    x, y, sigma = (expr(curve[k], names | {coord}) for k in ("x", "y", "sigma"))
    rel = None
    if relation:
        missing = [k for k in RELATION_KEYS if k not in relation]
        if missing:
            _, lineno, _ = next(iter(relation.values()))
            raise ConfigError(f"[relation] is missing {missing[0]!r}", lineno, 1)
        rel = tuple(parse_expr(relation[k][0], allowed=names | {"x"}, line=relation[k][1],
                               column=relation[k][2]) for k in RELATION_KEYS)
    declared = []
    for point_entry, mu_entry in plus:
        value, lineno, vcol = point_entry
        if value in INFINITY_NAMES:
            p = INF
        else:
            p = parse_expr(value, allowed=names, line=lineno, column=vcol)
        if mu_entry is None:
            mu = RatFunc.constant(0)
        else:
            mu = parse_expr(mu_entry[0], allowed=names, line=mu_entry[1], column=mu_entry[2])
        declared.append((p, mu))
    parameters = tuple(sorted(params.items(), key=lambda kv: variable_key(kv[0])))
    return CurveConfig(x, y, sigma, rel, tuple(declared), parameters,
                       tuple(sorted(options.items())), coord)


def _ptilde_line(body: str, lineno: int, plus: list) -> None:
    offset = 0
    for chunk in body.split(","):
        if chunk.strip():
            key, value, vcol = _split_assignment(chunk, lineno, offset)
            kcol = _key_column(chunk, offset)
            if key == "point":
                plus.append([(value, lineno, vcol), None])
            elif key == "mu":
                if not plus or plus[-1][1] is not None:
                    raise ConfigError("mu given for an undeclared point", lineno, kcol)
                plus[-1][1] = (value, lineno, vcol)
            else:
                raise ConfigError(f"unknown key {key!r} in [ptilde_plus]", lineno, kcol)
        offset += len(chunk) + 1


def parse_rational(text: str, line: int = 1, column: int = 1) -> Fraction:
    m = _RATIONAL.match(text)
    if not m:
        raise ConfigError(f"expected a rational number or 'symbolic', got {text!r}", line, column)
    num = int(m.group(1))
    den = int(m.group(2) or 1)
    if den == 0:
        raise ConfigError("zero denominator", line, column)
    return Fraction(num, den)


def _in_coordinate(f: RatFunc, coord: str) -> str:
    if coord != COORDINATE:
        f = f.rename({COORDINATE: coord})
    return format_ratfunc(f)


def serialize_curve_config(cfg: CurveConfig) -> str:
    """Canonical curve-file text; parse_curve_config inverts it exactly."""
    coord = cfg.coordinate
    lines = ["[curve]", f"z = {coord}"]
    for key, f in (("x", cfg.x), ("y", cfg.y), ("sigma", cfg.sigma)):
        lines.append(f"{key} = {_in_coordinate(f, coord)}")
    if cfg.relation:
        lines += ["", "[relation]"]
        lines += [f"{k} = {format_ratfunc(f)}" for k, f in zip(RELATION_KEYS, cfg.relation)]
    if cfg.parameters:
        lines += ["", "[parameters]"]
        for name, value in cfg.parameters:
            lines.append(f"{name} = {'symbolic' if value is None else value}")
    if cfg.ptilde_plus:
        lines += ["", "[ptilde_plus]"]
        for p, mu in cfg.ptilde_plus:
            point = "oo" if p is INF else format_ratfunc(p)
            lines.append(f"point = {point}, mu = {format_ratfunc(RatFunc.coerce(mu))}")
    if cfg.options:
        lines += ["", "[options]"]
        for key, value in cfg.options:
            text = ", ".join(str(v) for v in value) if isinstance(value, tuple) else str(value)
            lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def sample_parameters(cfg: CurveConfig, seed: int) -> dict:
    """Random small rationals for the symbolic parameters, reproducible from ``seed``.

    Draws that make the curve degenerate are rejected and redrawn.
    """
    from .curve import CurveError, validate_curve

    rng = random.Random(seed)
    names = cfg.symbolic()
    for _ in range(100):
        values = {}
        for name in names:
            num = rng.choice([k for k in range(-9, 10) if k])
            values[name] = Fraction(num, rng.randint(1, 9))
        try:
            validate_curve(cfg.with_parameters(values)).ramification
        except (CurveError, ArithmeticError):
            continue
        return values
    raise ValueError(f"no admissible parameter sample found for seed {seed}")


def parse_assignments(text: str) -> dict:
    """``a=1/3,l0=3/2`` as a parameter map."""
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise ConfigError(f"expected name=value, got {item.strip()!r}")
        name, value = (s.strip() for s in item.split("=", 1))
        out[name] = parse_rational(value)
    return out


def load_curve_file(path) -> CurveConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_curve_config(fh.read())

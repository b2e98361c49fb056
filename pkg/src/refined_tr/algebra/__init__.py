from .poly import AlgebraError, RatFunc, ZeroDivision, const, var
from .parse import ParseError, parse_expr, parse_differential
from .series import (
    INF,
    LaurentSeries,
    NoRationalPrimitive,
    PartialFractions,
    UnsupportedFactorization,
    UnsupportedPoint,
    laurent_expand,
    local_antiderivative,
    partial_fractions,
    residue_at,
)

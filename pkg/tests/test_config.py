from fractions import Fraction

import pytest

from refined_tr.algebra import INF, ParseError, var
from refined_tr.config import (
    load_curve_file, parse_assignments, parse_curve_config, sample_parameters,
    serialize_curve_config,
)
from refined_tr.curve import InvolutionFailure, validate_curve

from conftest import CURVES

AIRY = """[curve]
x = z^2
y = z
sigma = -z
"""


def test_minimal_airy_file():
    cfg = parse_curve_config(AIRY)
    z = var("z")
    assert (cfg.x, cfg.y, cfg.sigma) == (z ** 2, z, -z)
    assert validate_curve(cfg).ramification.effective == (var("z") * 0,)


def test_parser_accepts_what_validation_rejects():
    cfg = parse_curve_config(AIRY.replace("-z", "z+1"))
    with pytest.raises(InvolutionFailure):
        validate_curve(cfg)


def test_appendix_file():
    cfg = load_curve_file(CURVES / "appendix.curve")
    assert cfg.symbolic() == ["a", "l0", "mu0", "muinf"]
    assert [str(p) for p, _ in cfg.ptilde_plus] == ["a", "1"]
    assert [str(mu) for _, mu in cfg.ptilde_plus] == ["mu0", "muinf"]
    pinned = cfg.with_parameters({"l0": Fraction(3, 2), "a": Fraction(1, 3)})
    x = var("x")
    # 4x^2 y^2 - (x^2 + 4 linf x + 4 l0^2) with linf = -l0 (1 + a^2) / (2a)
    curve = validate_curve(pinned.with_parameters({"mu0": Fraction(1), "muinf": Fraction(2)}))
    assert curve.relation == (4 * x ** 2, 0 * x, -(x ** 2 - 10 * x + 9))


def test_coordinate_symbol_and_infinity():
    cfg = parse_curve_config("[curve]\nz = t\nx = t^2 + 1/t^2\ny = t\nsigma = 1/t\n"
                             "[ptilde_plus]\npoint = oo, mu = 3\n")
    assert cfg.coordinate == "t" and cfg.x == var("z") ** 2 + 1 / var("z") ** 2
    assert cfg.ptilde_plus[0][0] is INF
    assert "x = (t^4+1)/t^2" in serialize_curve_config(cfg)


@pytest.mark.parametrize("name", ["airy.curve", "appendix.curve"])
def test_canonical_round_trip(name):
    cfg = load_curve_file(CURVES / name)
    text = serialize_curve_config(cfg)
    again = parse_curve_config(text)
    assert again == cfg
    assert serialize_curve_config(again) == text


def test_comments_and_whitespace_do_not_matter():
    noisy = "# Airy\n[curve]   \n  x=z^2   # cover\n\ny =  z\nsigma=-z\n"
    assert parse_curve_config(noisy) == parse_curve_config(AIRY)


@pytest.mark.parametrize("text, line, column, message", [
    ("[curve]\nx = z^\ny = z\nsigma = -z\n", 2, 7, "exponent"),
    ("[curve]\nw = 1\n", 2, 1, "unknown key"),
    ("[parameters]\na = 1\na = 2\n", 3, 1, "duplicate parameter"),
    ("[ptilde_plus]\nmu = 1\n", 2, 1, "undeclared point"),
    ("[curve]\nx = z^2\ny = zz\nsigma = -z\n", 3, 5, "unknown symbol"),
    ("[parameters]\nQ = 1\n", 2, 1, "reserved"),
    ("[options]\ndepth = two\n", 2, 9, "integer"),
    ("[colour]\n", 1, 1, "unknown section"),
    ("x = 1\n", 1, 1, "outside"),
])
def test_errors_have_positions(text, line, column, message):
    with pytest.raises(ParseError) as err:
        parse_curve_config(text)
    assert message in str(err.value)
    assert (err.value.line, err.value.column) == (line, column)


def test_assignments_and_samples():
    assert parse_assignments("a=1/3, l0=-3/2") == {"a": Fraction(1, 3), "l0": Fraction(-3, 2)}
    cfg = load_curve_file(CURVES / "appendix.curve")
    first = sample_parameters(cfg, 7)
    assert first == sample_parameters(cfg, 7)
    assert set(first) == {"a", "l0", "mu0", "muinf"}
    validate_curve(cfg.with_parameters(first))

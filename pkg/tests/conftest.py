import sys
from fractions import Fraction
from pathlib import Path

import pytest

from refined_tr.algebra import RatFunc, var
from refined_tr.config import load_curve_file
from refined_tr.curve import CurveConfig, validate_curve
from refined_tr.recursion import RecursionStore

CURVES = Path(__file__).resolve().parent.parent / "curves"

# (l0, a, mu0, muinf) tuples for the appendix curve
APPENDIX_TUPLES = [
    (Fraction(3, 2), Fraction(1, 3), Fraction(2, 7), Fraction(-3, 5)),
    (Fraction(-5, 4), Fraction(2, 5), Fraction(1, 3), Fraction(7, 2)),
    (Fraction(2, 3), Fraction(-3, 7), Fraction(-5, 2), Fraction(1, 4)),
]


def appendix_config(l0, a, mu0, muinf) -> CurveConfig:
    cfg = load_curve_file(CURVES / "appendix.curve")
    return cfg.with_parameters({"l0": l0, "a": a, "mu0": mu0, "muinf": muinf})


@pytest.fixture(scope="session")
def airy():
    z = var("z")
    return validate_curve(CurveConfig(z ** 2, z, -z, (RatFunc.constant(1), RatFunc.constant(0),
                                                      -var("x"))))


@pytest.fixture(scope="session")
def airy_store(airy):
    return RecursionStore(airy)


@pytest.fixture(scope="session", params=range(len(APPENDIX_TUPLES)), ids=lambda i: f"tuple{i}")
def appendix(request):
    return validate_curve(appendix_config(*APPENDIX_TUPLES[request.param]))


@pytest.fixture(scope="session")
def appendix_store(appendix):
    return RecursionStore(appendix)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

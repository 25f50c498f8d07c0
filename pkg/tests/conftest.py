from fractions import Fraction

import pytest

from gptrestrict.core import Effect, dichotomic_meter, gbit


@pytest.fixture
def square():
    return gbit()


@pytest.fixture
def edge_x(square):
    return dichotomic_meter(square, Effect(Fraction(1, 2), (Fraction(1, 2), Fraction(0))))


@pytest.fixture
def edge_y(square):
    return dichotomic_meter(square, Effect(Fraction(1, 2), (Fraction(0), Fraction(1, 2))))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])

from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from compound_tails.coeff_ring import ParamPoly
from compound_tails.operator_ring import TruncatedOperator

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
positive_fractions = st.fractions(min_value=Fraction(1, 30), max_value=50, max_denominator=30)
polys = st.lists(fractions, max_size=5).map(ParamPoly)


@st.composite
def operators(draw, m=None, coeffs=fractions, c0=None):
    if m is None:
        m = draw(st.integers(0, 6))
    cs = draw(st.lists(coeffs, min_size=m + 1, max_size=m + 1))
    if c0 is not None:
        cs[0] = c0
    return TruncatedOperator(cs)


@st.composite
def operator_pairs(draw, count=2, coeffs=fractions):
    m = draw(st.integers(0, 6))
    return tuple(draw(operators(m=m, coeffs=coeffs)) for _ in range(count))


@st.composite
def moment_sequences(draw, m):
    """mu_0 = 1 followed by m positive rationals."""
    return [Fraction(1)] + draw(st.lists(positive_fractions, min_size=m, max_size=m))


# acceptance summary: one line per criterion ---------------------------------

_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture
def alpha_third():
    from compound_tails.tails import SummandSpec

    return SummandSpec(Fraction(1, 3))

from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

F = Fraction

# (criterion, passed, detail) lines collected by the acceptance module
ACCEPTANCE_LINES = []


def sizes(max_denominator=60):
    return st.builds(
        Fraction,
        st.integers(1, max_denominator),
        st.just(max_denominator),
    )


def size_lists(min_size=0, max_size=10, max_denominator=60):
    return st.lists(sizes(max_denominator), min_size=min_size, max_size=max_size)


def alphas(lo=1, hi=99):
    return st.integers(lo, hi).map(lambda k: Fraction(k, 100))


@pytest.fixture
def f():
    return Fraction


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")

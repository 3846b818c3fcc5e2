from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from reservekp import enclosure as enc
from reservekp.enclosure import RatioValue
from reservekp.errors import PrecisionExhausted


def test_exact_value():
    v = RatioValue.exact(F(5, 2))
    assert v.is_exact and v.width == 0


def test_bad_interval():
    with pytest.raises(ValueError):
        RatioValue(F(1), F(0))


def test_floats_rejected():
    with pytest.raises(TypeError):
        enc.lift(0.5)


@pytest.mark.parametrize("n", [2, 3, 5, F(19, 5)])
def test_sqrt_brackets_root(n):
    r = enc.sqrt(n)
    assert r.lower ** 2 <= n <= r.upper ** 2
    assert r.width <= F(1, 10 ** 30)


def test_sqrt_of_square_is_exact():
    assert enc.sqrt(F(9, 4)) == RatioValue.exact(F(3, 2))


def test_overlap_raises():
    a = RatioValue(F(0), F(2))
    with pytest.raises(PrecisionExhausted):
        enc.lt(a, 1)


def test_comparisons():
    root2 = enc.sqrt(2)
    assert enc.lt(F(141, 100), root2)
    assert enc.gt(root2, F(141, 100))
    assert enc.le(2, 2) and enc.ge(2, 2)


def test_rmax_picks_larger():
    assert enc.rmax(2, enc.sqrt(5)) == enc.sqrt(5)
    assert enc.rmax(3, enc.sqrt(5)) == RatioValue.exact(3)


def test_round_to_denominator():
    assert enc.round_to_denominator(enc.sqrt(2), 1000) == F(1414, 1000)


def test_bisect_root_straddles_zero():
    r = enc.bisect_root([-2, 0, 1], 1, 2, 25)
    values = enc.poly_eval([-2, 0, 1], r)
    assert values.lower <= 0 <= values.upper
    assert r.width <= F(1, 10 ** 25)


@given(st.fractions(min_value=-5, max_value=5, max_denominator=50),
       st.fractions(min_value=F(1, 10), max_value=5, max_denominator=50))
def test_arithmetic_contains_exact_result(x, y):
    a = RatioValue(x - F(1, 1000), x + F(1, 1000))
    b = RatioValue(y - F(1, 1000), y + F(1, 1000))
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    assert (a / b).contains(x / y)

"""Rational interval enclosures for the few irrational constants we need.

Every quantity is carried as a closed interval ``[lower, upper]`` with
:class:`fractions.Fraction` endpoints.  Rational values are degenerate
intervals and compare exactly; everything else is compared by separation
of the intervals.  If two intervals overlap (and are not both exact) the
comparison cannot be decided and :class:`PrecisionExhausted` is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

from .errors import PrecisionExhausted

DEFAULT_DIGITS = 30
# extra decimal digits carried through intermediate steps so that the
# final width still meets the requested 10**-digits after a few operations
GUARD_DIGITS = 10

Number = Union[int, Fraction, "RatioValue"]


@dataclass(frozen=True)
class RatioValue:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lower), Fraction(self.upper)
        if lo > hi:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def exact(cls, value) -> RatioValue:
        q = Fraction(value)
        return cls(q, q)

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, x) -> bool:
        x = lift(x)
        return self.lower <= x.lower and x.upper <= self.upper

    def intersects(self, other) -> bool:
        other = lift(other)
        return self.lower <= other.upper and other.lower <= self.upper

    def __float__(self) -> float:
        return float(self.midpoint)

    def __repr__(self) -> str:
        if self.is_exact:
            return f"RatioValue({self.lower})"
        return f"RatioValue(~{float(self.midpoint):.15g}, width={float(self.width):.1e})"

    # interval arithmetic -------------------------------------------------

    def __neg__(self) -> RatioValue:
        return RatioValue(-self.upper, -self.lower)

    def __add__(self, other) -> RatioValue:
        other = lift(other)
        return RatioValue(self.lower + other.lower, self.upper + other.upper)

    __radd__ = __add__

    def __sub__(self, other) -> RatioValue:
        other = lift(other)
        return RatioValue(self.lower - other.upper, self.upper - other.lower)

    def __rsub__(self, other) -> RatioValue:
        return lift(other) - self

    def __mul__(self, other) -> RatioValue:
        other = lift(other)
        products = (
            self.lower * other.lower,
            self.lower * other.upper,
            self.upper * other.lower,
            self.upper * other.upper,
        )
        return RatioValue(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other) -> RatioValue:
        other = lift(other)
        if other.lower <= 0 <= other.upper:
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self * RatioValue(1 / other.upper, 1 / other.lower)

    def __rtruediv__(self, other) -> RatioValue:
        return lift(other) / self


def lift(x) -> RatioValue:
    if isinstance(x, RatioValue):
        return x
    if isinstance(x, (Rational, str)):
        return RatioValue.exact(Fraction(x))
    raise TypeError(f"cannot enclose {type(x).__name__}; use an exact rational")


def rmax(a, b) -> RatioValue:
    a, b = lift(a), lift(b)
    return RatioValue(max(a.lower, b.lower), max(a.upper, b.upper))


# comparisons ---------------------------------------------------------------


def compare(a, b) -> int:
    """Return -1, 0 or 1 as ``a`` is below, equal to or above ``b``.

    Raises PrecisionExhausted when the enclosures overlap and the answer
    cannot be certified.
    """
    a, b = lift(a), lift(b)
    if a.upper < b.lower:
        return -1
    if a.lower > b.upper:
        return 1
    if a.is_exact and b.is_exact:
        return 0
    raise PrecisionExhausted(f"cannot separate {a!r} from {b!r}")


def lt(a, b) -> bool:
    return compare(a, b) < 0


def le(a, b) -> bool:
    return compare(a, b) <= 0


def gt(a, b) -> bool:
    return compare(a, b) > 0


def ge(a, b) -> bool:
    return compare(a, b) >= 0


# constructors ----------------------------------------------------------------


def _exact_sqrt(q: Fraction):
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sqrt_bounds(q: Fraction, digits: int) -> tuple[Fraction, Fraction]:
    if q < 0:
        raise ValueError(f"square root of negative value {q}")
    root = _exact_sqrt(q)
    if root is not None:
        return root, root
    # sqrt(n/d) = sqrt(n*d)/d, scaled by 10**digits before the integer root
    n, d = q.numerator, q.denominator
    scale = 10 ** digits
    r = math.isqrt(n * d * scale * scale)
    return Fraction(r, scale * d), Fraction(r + 1, scale * d)


def sqrt(x, digits: int = DEFAULT_DIGITS) -> RatioValue:
    """Enclosure of the square root of a nonnegative rational or enclosure."""
    x = lift(x)
    guard = digits + GUARD_DIGITS
    lo, _ = _sqrt_bounds(x.lower, guard)
    _, hi = _sqrt_bounds(x.upper, guard)
    return RatioValue(lo, hi)


def round_to_denominator(x, denominator: int) -> Fraction:
    """Nearest fraction with the given denominator to the enclosure midpoint."""
    mid = lift(x).midpoint
    return Fraction(round(mid * denominator), denominator)


def poly_eval(coefficients: Sequence, x) -> RatioValue:
    """Evaluate ``c0 + c1*x + c2*x**2 + ...`` by Horner's rule in interval arithmetic."""
    x = lift(x)
    acc = lift(0)
    for c in reversed(coefficients):
        acc = acc * x + lift(c)
    return acc


def _poly_exact(coefficients: Sequence, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coefficients):
        acc = acc * x + c
    return acc


def bisect_root(coefficients: Sequence, lo, hi, digits: int = DEFAULT_DIGITS) -> RatioValue:
    """Isolate a root of a polynomial on ``[lo, hi]`` by exact bisection.

    The polynomial must change sign on the bracket.  The result is an
    enclosure of width at most ``10**-digits`` whose endpoints still have
    opposite signs.
    """
    coefficients = [Fraction(c) for c in coefficients]
    lo, hi = Fraction(lo), Fraction(hi)
    f_lo, f_hi = _poly_exact(coefficients, lo), _poly_exact(coefficients, hi)
    if f_lo == 0:
        return RatioValue.exact(lo)
    if f_hi == 0:
        return RatioValue.exact(hi)
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    target = Fraction(1, 10 ** digits)
    while hi - lo > target:
        mid = (lo + hi) / 2
        f_mid = _poly_exact(coefficients, mid)
        if f_mid == 0:
            return RatioValue.exact(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return RatioValue(lo, hi)

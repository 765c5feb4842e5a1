"""Outward-rounded float64 interval arithmetic.

Every arithmetic operation computes candidate endpoints in ordinary
round-to-nearest float64 and then widens the result by one unit in the
last place on each side.  Since round-to-nearest is always within one
ulp of the true real value, the widened interval encloses the exact
result.  This trades a little tightness for not having to touch the FPU
rounding mode, and is what the enclosure property tests exercise.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _down(x: float) -> float:
    if math.isinf(x):
        return x
    return math.nextafter(x, -math.inf)


def _up(x: float) -> float:
    if math.isinf(x):
        return x
    return math.nextafter(x, math.inf)


class Interval:
    """Closed interval [lo, hi] of float64 endpoints, lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("NaN interval endpoint")
        if lo > hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @staticmethod
    def from_fraction(q) -> "Interval":
        """Tightest representable enclosure of an exact rational."""
        q = Fraction(q)
        try:
            f = float(q)
        except OverflowError:
            huge = 1.7976931348623157e308
            if q > 0:
                return Interval(huge, math.inf)
            return Interval(-math.inf, -huge)
        if Fraction(f) == q:
            return Interval(f, f)
        return Interval(_down(f), _up(f))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other):
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    # --- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, Fraction):
            return Interval.from_fraction(x)
        return Interval(float(x))

    def _widened(self, lo: float, hi: float) -> "Interval":
        return Interval(_down(lo), _up(hi))

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        o = Interval._coerce(other)
        return self._widened(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = Interval._coerce(other)
        return self._widened(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return Interval._coerce(other) - self

    def __mul__(self, other):
        o = Interval._coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return self._widened(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError("interval denominator contains zero")
        quotients = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return self._widened(min(quotients), max(quotients))

    def __rtruediv__(self, other):
        return Interval._coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("interval powers require a non-negative integer exponent")
        if n == 0:
            return Interval(1.0, 1.0)
        if n == 1:
            return self
        if n % 2 == 0 and self.lo <= 0.0 <= self.hi:
            m = max(-self.lo, self.hi)
            return self._widened(0.0, m ** n)
        a, b = self.lo ** n, self.hi ** n
        return self._widened(min(a, b), max(a, b))

    # --- queries ----------------------------------------------------------

    def contains(self, value) -> bool:
        """Exact membership test; Fractions are compared without rounding."""
        if isinstance(value, Fraction):
            return Fraction(self.lo) <= value <= Fraction(self.hi)
        return self.lo <= value <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def strictly_positive(self) -> bool:
        return self.lo > 0.0

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def mag(self) -> float:
        """max |x| over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

"""Minimal double-double arithmetic (unevaluated sum of two floats).

Only what the Maclaurin-series oracle needs: addition, multiplication and
division by plain floats or other double-doubles.  Error-free transforms
follow Dekker/Knuth.
"""
from decimal import Decimal

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


class DD:
    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=0.0):
        self.hi = hi
        self.lo = lo

    @classmethod
    def from_string(cls, text):
        hi = float(text)
        lo = float(Decimal(text) - Decimal(hi))
        return cls(hi, lo)

    def __add__(self, other):
        if not isinstance(other, DD):
            other = DD(float(other))
        s, e = two_sum(self.hi, other.hi)
        t, f = two_sum(self.lo, other.lo)
        e += t
        s, e = quick_two_sum(s, e)
        e += f
        return DD(*quick_two_sum(s, e))

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __sub__(self, other):
        if not isinstance(other, DD):
            other = DD(float(other))
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, DD):
            p, e = two_prod(self.hi, float(other))
            e += self.lo * float(other)
            return DD(*quick_two_sum(p, e))
        p, e = two_prod(self.hi, other.hi)
        e += self.hi * other.lo + self.lo * other.hi
        return DD(*quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, DD):
            other = DD(float(other))
        q1 = self.hi / other.hi
        r = self - other * q1
        q2 = r.hi / other.hi
        r = r - other * q2
        q3 = r.hi / other.hi
        s, e = quick_two_sum(q1, q2)
        return DD(s, e) + q3

    def __abs__(self):
        return -self if self.hi < 0 else self

    def __float__(self):
        return self.hi + self.lo

    def __repr__(self):
        return f"DD({self.hi!r}, {self.lo!r})"

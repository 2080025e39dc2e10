"""Exact scalars over Q and Q(i).

Rationals are ``gmpy2.mpq``. Non-real Gaussian rationals are
:class:`GaussianRational`; every arithmetic result whose imaginary part
vanishes collapses back to a plain ``mpq`` so that real computations never
pay for the complex wrapper.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral

import gmpy2
from gmpy2 import mpq

MPQ = type(mpq(0))
MPZ = type(gmpy2.mpz(0))
ZERO = mpq(0)
ONE = mpq(1)


class GaussianRational:
    """a + b*i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return gauss(self.re + other.re, self.im + other.im)
        if isinstance(other, (MPQ, MPZ, int)):
            return GaussianRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return gauss(self.re - other.re, self.im - other.im)
        if isinstance(other, (MPQ, MPZ, int)):
            return GaussianRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (MPQ, MPZ, int)):
            return GaussianRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return gauss(self.re * other.re - self.im * other.im,
                         self.re * other.im + self.im * other.re)
        if isinstance(other, (MPQ, MPZ, int)):
            if not other:
                return ZERO
            return GaussianRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            d = other.re * other.re + other.im * other.im
            return gauss((self.re * other.re + self.im * other.im) / d,
                         (self.im * other.re - self.re * other.im) / d)
        if isinstance(other, (MPQ, MPZ, int)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return GaussianRational(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (MPQ, MPZ, int)):
            d = self.re * self.re + self.im * self.im
            return gauss(other * self.re / d, -other * self.im / d)
        return NotImplemented

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, Integral):
            return NotImplemented
        if k < 0:
            return ONE / (self ** (-k))
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparisons ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (MPQ, MPZ, int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


I = GaussianRational(0, 1)


def gauss(re, im=0):
    """Canonical scalar for re + im*i (a plain mpq when im == 0)."""
    if not im:
        return mpq(re)
    return GaussianRational(re, im)


def conj(x):
    if isinstance(x, GaussianRational):
        return GaussianRational(x.re, -x.im)
    return x


def re_part(x):
    return x.re if isinstance(x, GaussianRational) else mpq(x)


def im_part(x):
    return x.im if isinstance(x, GaussianRational) else ZERO


def is_real(x) -> bool:
    return not isinstance(x, GaussianRational) or not x.im


def i_power(k: int):
    """i**k for an integer k."""
    return (ONE, I, mpq(-1), -I)[k % 4]


def to_scalar(obj):
    """Coerce ints, strings "p/q", Fractions, dicts {"re","im"} or complex
    numbers with integral parts into an exact scalar."""
    if isinstance(obj, GaussianRational):
        return gauss(obj.re, obj.im)
    if isinstance(obj, MPQ):
        return obj
    if isinstance(obj, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(obj, Integral):
        return mpq(int(obj))
    if isinstance(obj, Fraction):
        return mpq(obj.numerator, obj.denominator)
    if isinstance(obj, str):
        s = obj.strip()
        try:
            return mpq(s)
        except ValueError:
            raise ValueError(f"not a rational literal: {obj!r}") from None
    if isinstance(obj, dict):
        if set(obj) - {"re", "im"}:
            raise ValueError(f"unexpected keys in Gaussian rational: {sorted(obj)}")
        return gauss(to_scalar(obj.get("re", 0)), to_scalar(obj.get("im", 0)))
    if isinstance(obj, complex):
        if obj.real != int(obj.real) or obj.imag != int(obj.imag):
            raise ValueError("only complex numbers with integral parts are exact")
        return gauss(int(obj.real), int(obj.imag))
    if isinstance(obj, float):
        raise TypeError("floats are not accepted as exact scalars")
    raise TypeError(f"cannot interpret {obj!r} as a scalar")


def rational_str(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def scalar_to_json(x):
    if isinstance(x, GaussianRational):
        if not x.im:
            return rational_str(x.re)
        return {"re": rational_str(x.re), "im": rational_str(x.im)}
    return rational_str(x)


def denominator(x) -> int:
    """Least common denominator of the real and imaginary parts."""
    if isinstance(x, GaussianRational):
        return int(gmpy2.lcm(x.re.denominator, x.im.denominator))
    return int(mpq(x).denominator)


def is_integral(x) -> bool:
    return denominator(x) == 1

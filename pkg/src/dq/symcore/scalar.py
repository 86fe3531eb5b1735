"""Exact Gaussian rationals a + b*i with a, b in Q."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["Scalar", "as_scalar"]

_ZERO = Fraction(0)


class Scalar:
    """Immutable Gaussian rational.

    Both parts are :class:`fractions.Fraction`, so denominators are positive
    and reduced by construction.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "Scalar":
        s = object.__new__(cls)
        object.__setattr__(s, "re", re)
        object.__setattr__(s, "im", im)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # the four integers named in the data model
    @property
    def re_num(self) -> int:
        return self.re.numerator

    @property
    def re_den(self) -> int:
        return self.re.denominator

    @property
    def im_num(self) -> int:
        return self.im.numerator

    @property
    def im_den(self) -> int:
        return self.im.denominator

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other) -> "Scalar":
        o = as_scalar(other)
        return Scalar._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        o = as_scalar(other)
        return Scalar._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> "Scalar":
        return as_scalar(other) - self

    def __neg__(self) -> "Scalar":
        return Scalar._raw(-self.re, -self.im)

    def __mul__(self, other) -> "Scalar":
        o = as_scalar(other)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return Scalar._raw(a * c, _ZERO)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("inverse of zero Scalar")
        n = self.re * self.re + self.im * self.im
        return Scalar._raw(self.re / n, -self.im / n)

    def __truediv__(self, other) -> "Scalar":
        return self * as_scalar(other).inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return as_scalar(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int):
            raise TypeError("Scalar powers must be integers")
        base = self if n >= 0 else self.inverse()
        out = ONE
        for _ in range(abs(n)):
            out = out * base
        return out

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"Scalar({self.re}, {self.im})"

    def __str__(self) -> str:
        return format_scalar(self)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar._raw(Fraction(x), _ZERO)
    if isinstance(x, Rational):
        return Scalar._raw(Fraction(x.numerator, x.denominator), _ZERO)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact Scalar")


def _fmt_rational(r: Fraction) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"({r.numerator}/{r.denominator})"


def format_scalar(s: Scalar) -> str:
    """Text form that the expression parser reads back exactly."""
    if not s.im:
        return _fmt_rational(s.re)
    if not s.re:
        if s.im == 1:
            return "i"
        if s.im == -1:
            return "-i"
        return f"{_fmt_rational(s.im)}*i"
    sign = "+" if s.im > 0 else "-"
    mag = abs(s.im)
    im_txt = "i" if mag == 1 else f"{_fmt_rational(mag)}*i"
    return f"({_fmt_rational(s.re)} {sign} {im_txt})"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)

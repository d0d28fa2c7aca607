import re
from fractions import Fraction
from typing import Union

from sympy import QQ, QQ_I

_RATIONAL = r'[+-]?\d+(?:/\d+)?'
_SCALAR = re.compile(rf'^(?P<re>{_RATIONAL})(?:(?P<sign>[+-])(?P<im>\d+(?:/\d+)?)?\s*i)?$')
_IMAG_ONLY = re.compile(r'^(?P<sign>[+-]?)(?P<im>\d+(?:/\d+)?)?\s*i$')


def _rational(value) -> "QQ.dtype":
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class GaussianRational:
    """Exact element of Q(i), backed by an element of sympy's QQ_I domain."""

    __slots__ = ('value',)

    def __init__(self, re: Union[int, str, Fraction] = 0, im: Union[int, str, Fraction] = 0):
        self.value = QQ_I(_rational(re), _rational(im))

    @classmethod
    def from_domain(cls, element) -> "GaussianRational":
        result = cls.__new__(cls)
        result.value = QQ_I.convert(element)
        return result

    @property
    def re(self) -> Fraction:
        return _fraction(self.value.x)

    @property
    def im(self) -> Fraction:
        return _fraction(self.value.y)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, float):
            # shortest repr, so 0.1 becomes 1/10 rather than its binary expansion
            return cls(Fraction(repr(value)), 0)
        if isinstance(value, complex):
            return cls(Fraction(repr(value.real)), Fraction(repr(value.imag)))
        if isinstance(value, QQ_I.dtype):
            return cls.from_domain(value)
        raise TypeError(f"Cannot use {type(value).__name__} as exact scalar")

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        text = text.strip()
        match = _SCALAR.match(text)
        if match:
            im = Fraction(0)
            if match.group('sign'):
                im = Fraction(match.group('im') or 1)
                if match.group('sign') == '-':
                    im = -im
            return cls(Fraction(match.group('re')), im)
        match = _IMAG_ONLY.match(text)
        if match:
            im = Fraction(match.group('im') or 1)
            return cls(0, -im if match.group('sign') == '-' else im)
        try:
            # decimal notation such as "0.25" is exact as well
            return cls(Fraction(text), 0)
        except ValueError:
            raise ValueError(f"Invalid exact scalar '{text}'")

    def __str__(self) -> str:
        re_part, im_part = self.re, self.im
        if im_part == 0:
            return str(re_part)
        sign = '-' if im_part < 0 else '+'
        return f"{re_part}{sign}{abs(im_part)}i"

    def __repr__(self) -> str:
        return f"GaussianRational({self})"

    def __reduce__(self):
        return GaussianRational, (self.re, self.im)

    def __hash__(self):
        return hash(self.value)

    def __eq__(self, other) -> bool:
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.value == other.value

    def __bool__(self) -> bool:
        return bool(self.value)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __neg__(self) -> "GaussianRational":
        return GaussianRational.from_domain(-self.value)

    def __add__(self, other) -> "GaussianRational":
        return GaussianRational.from_domain(self.value + GaussianRational.coerce(other).value)

    __radd__ = __add__

    def __sub__(self, other) -> "GaussianRational":
        return GaussianRational.from_domain(self.value - GaussianRational.coerce(other).value)

    def __rsub__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other) -> "GaussianRational":
        return GaussianRational.from_domain(self.value * GaussianRational.coerce(other).value)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational.from_domain(self.value / other.value)

    def __rtruediv__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) / self

    def __pow__(self, exponent: int) -> "GaussianRational":
        if exponent < 0 and not self:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational.from_domain(self.value ** exponent)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational.from_domain(QQ_I(self.value.x, -self.value.y))

    def is_integer(self) -> bool:
        return self.value.y == 0 and self.value.x.denominator == 1


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

"""Exact rational functions of one variable over Q(i).

A function is kept in partial-fraction form: a polynomial part plus a pole
atlas mapping every pole c to its Laurent coefficients, index k - 1 holding
the coefficient of 1/(t - c)^k. The form is unique, so equality of two
functions is equality of their atlases. Polynomial arithmetic runs on
sympy's ``Poly`` over ``QQ_I``.
"""
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from sympy import Poly, QQ_I, Symbol
from sympy.polys.densetools import dup_eval

from .gaussian import GaussianRational, ZERO, ONE

Scalar = Union[int, GaussianRational]
Coefficients = List[GaussianRational]

T = Symbol('t')


def _trim(coeffs: Sequence[GaussianRational]) -> Coefficients:
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def to_poly(coeffs: Sequence[Scalar]) -> Poly:
    """Poly in t from ascending coefficients."""
    return Poly.from_list([GaussianRational.coerce(c).value for c in reversed(list(coeffs))], T, domain=QQ_I)


def from_poly(p: Poly) -> Coefficients:
    """Ascending coefficients of a Poly over QQ_I."""
    return [GaussianRational.from_domain(c) for c in reversed(p.rep.to_list())]


def linear_power(loc: GaussianRational, k: int) -> Poly:
    """(t - loc)^k."""
    return to_poly([-loc, ONE]) ** k


class RationalFunction:

    __slots__ = ('poly', 'poles')

    def __init__(self, poly: Sequence[Scalar] = (), poles: Dict[GaussianRational, Sequence[Scalar]] = None):
        self.poly: Coefficients = _trim([GaussianRational.coerce(c) for c in poly])
        atlas: Dict[GaussianRational, Tuple[GaussianRational, ...]] = {}
        for loc, coeffs in (poles or {}).items():
            trimmed = _trim([GaussianRational.coerce(c) for c in coeffs])
            if trimmed:
                atlas[GaussianRational.coerce(loc)] = tuple(trimmed)
        self.poles = atlas

    # -- constructors

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls()

    @classmethod
    def constant(cls, value: Scalar) -> "RationalFunction":
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, coeff: Scalar = 1) -> "RationalFunction":
        return cls([ZERO] * degree + [GaussianRational.coerce(coeff)])

    @classmethod
    def pole(cls, loc: Scalar, coeff: Scalar = 1, order: int = 1) -> "RationalFunction":
        return cls((), {GaussianRational.coerce(loc): [ZERO] * (order - 1) + [GaussianRational.coerce(coeff)]})

    @classmethod
    def linear_ratio(cls, num_root: Scalar, den_root: Scalar) -> "RationalFunction":
        """(t - num_root) / (t - den_root)."""
        num_root = GaussianRational.coerce(num_root)
        den_root = GaussianRational.coerce(den_root)
        return cls([ONE], {den_root: [den_root - num_root]})

    # -- inspection

    def is_zero(self) -> bool:
        return not self.poly and not self.poles

    def degree(self) -> int:
        return len(self.poly) - 1

    def max_order(self) -> int:
        return max((len(c) for c in self.poles.values()), default=0)

    def residue(self, loc: Scalar) -> GaussianRational:
        coeffs = self.poles.get(GaussianRational.coerce(loc))
        return coeffs[0] if coeffs else ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.poly == other.poly and self.poles == other.poles

    def __repr__(self) -> str:
        parts = [f"{c}*t^{i}" for i, c in enumerate(self.poly) if c]
        for loc, coeffs in sorted(self.poles.items(), key=lambda kv: (kv[0].re, kv[0].im)):
            parts.extend(f"{c}/(t-({loc}))^{k + 1}" for k, c in enumerate(coeffs) if c)
        return "RationalFunction(" + (" + ".join(parts) or "0") + ")"

    # -- arithmetic

    def __neg__(self) -> "RationalFunction":
        return self.scale(GaussianRational(-1))

    def __add__(self, other) -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            other = RationalFunction.constant(other)
        poles = dict(self.poles)
        for loc, coeffs in other.poles.items():
            mine = poles.get(loc, ())
            size = max(len(mine), len(coeffs))
            poles[loc] = [(mine[k] if k < len(mine) else ZERO) + (coeffs[k] if k < len(coeffs) else ZERO)
                          for k in range(size)]
        return RationalFunction(from_poly(to_poly(self.poly) + to_poly(other.poly)), poles)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            other = RationalFunction.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "RationalFunction":
        return RationalFunction.constant(other) - self

    def scale(self, s: Scalar) -> "RationalFunction":
        s = GaussianRational.coerce(s)
        if not s:
            return RationalFunction()
        return RationalFunction([s * c for c in self.poly],
                                {loc: [s * c for c in coeffs] for loc, coeffs in self.poles.items()})

    def __mul__(self, other) -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return self.scale(other)
        if not self.poles and not other.poles:
            return RationalFunction(from_poly(to_poly(self.poly) * to_poly(other.poly)))
        num_a, _ = self.to_numden()
        num_b, _ = other.to_numden()
        roots = {loc: len(coeffs) for loc, coeffs in self.poles.items()}
        for loc, coeffs in other.poles.items():
            roots[loc] = roots.get(loc, 0) + len(coeffs)
        return RationalFunction.from_numden(num_a * num_b, roots)

    __rmul__ = __mul__

    def __truediv__(self, s: Scalar) -> "RationalFunction":
        return self.scale(ONE / GaussianRational.coerce(s))

    def shift(self, s: Scalar) -> "RationalFunction":
        """The function t -> f(t + s)."""
        s = GaussianRational.coerce(s)
        poly = from_poly(to_poly(self.poly).shift(s.value))
        return RationalFunction(poly, {loc - s: coeffs for loc, coeffs in self.poles.items()})

    def derivative(self) -> "RationalFunction":
        poly = from_poly(to_poly(self.poly).diff(T))
        poles = {loc: [ZERO] + [c * -(k + 1) for k, c in enumerate(coeffs)] for loc, coeffs in self.poles.items()}
        return RationalFunction(poly, poles)

    def __call__(self, t):
        """Exact value at a Gaussian rational, complex values otherwise (arrays allowed)."""
        if isinstance(t, GaussianRational):
            value = GaussianRational.from_domain(dup_eval(to_poly(self.poly).rep.to_list(), t.value, QQ_I))
            for loc, coeffs in self.poles.items():
                d = t - loc
                if not d:
                    raise ZeroDivisionError(f"evaluation at pole {loc}")
                inv = ONE / d
                power = inv
                for c in coeffs:
                    value = value + c * power
                    power = power * inv
            return value
        t = np.asarray(t, dtype=complex)
        value = np.polyval([complex(c) for c in reversed(self.poly)] or [0j], t) + np.zeros(t.shape, dtype=complex)
        for loc, coeffs in self.poles.items():
            d = t - complex(loc)
            if np.any(d == 0):
                raise ZeroDivisionError(f"evaluation at pole {loc}")
            inv = 1.0 / d
            power = inv
            for c in coeffs:
                value = value + complex(c) * power
                power = power * inv
        return complex(value) if value.ndim == 0 else value

    # -- numerator/denominator form

    def to_numden(self) -> Tuple[Poly, Poly]:
        den = to_poly([ONE])
        for loc, coeffs in self.poles.items():
            den = den * linear_power(loc, len(coeffs))
        num = to_poly(self.poly) * den
        for loc, coeffs in self.poles.items():
            for k, c in enumerate(coeffs):
                num = num + den.exquo(linear_power(loc, k + 1)) * to_poly([c])
        return num, den

    @classmethod
    def from_numden(cls, num: Union[Poly, Sequence[Scalar]], roots: Dict[GaussianRational, int]) -> "RationalFunction":
        """Partial fractions of num / prod (t - c)^m for a known root table."""
        if not isinstance(num, Poly):
            num = to_poly(num)
        roots = {GaussianRational.coerce(loc): mult for loc, mult in roots.items() if mult > 0}
        den = to_poly([ONE])
        for loc, mult in roots.items():
            den = den * linear_power(loc, mult)
        quotient, remainder = num.div(den)
        poles = {}
        for loc, mult in roots.items():
            # Taylor series at loc of remainder / prod_{d != loc} (t - d)^m_d, truncated at u^mult
            truncation = to_poly([ZERO] * mult + [ONE])
            rest = den.exquo(linear_power(loc, mult)).shift(loc.value)
            series = from_poly((remainder.shift(loc.value) * rest.invert(truncation)).rem(truncation))
            series += [ZERO] * (mult - len(series))
            poles[loc] = [series[mult - k] for k in range(1, mult + 1)]
        return cls(from_poly(quotient), poles)

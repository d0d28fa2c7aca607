"""Master functions, coefficient functions, weight functions and the
singularity lattices of the p-deformed master function.

Parameters are held exactly (Gaussian rationals) so the same
:class:`ParameterSet` drives both the exact reduction engine and the
floating point quadratures; the ``*_c`` views give numpy copies.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple
import hashlib
import logging
import math

import numpy as np

from ._exact import GaussianRational, RationalFunction, ONE, I
from .complexfn import log_gamma, log_gamma_stirling, STIRLING_THRESHOLD
from .exception import DomainError, GenericityError, PoleError, ShapeError

logger = logging.getLogger(__name__)

WORKING_DEPTH = 32
COLLISION_TOLERANCE = 1e-9
_POLE_TOLERANCE = 1e-12


def _exact_tuple(values: Iterable) -> Tuple[GaussianRational, ...]:
    return tuple(GaussianRational.coerce(v) for v in values)


@dataclass(frozen=True)
class ParameterSet:
    z: Tuple[GaussianRational, ...]
    a: Tuple[GaussianRational, ...]
    p: GaussianRational
    kappa: Optional[GaussianRational] = None

    def __post_init__(self):
        object.__setattr__(self, 'z', _exact_tuple(self.z))
        object.__setattr__(self, 'a', _exact_tuple(self.a))
        object.__setattr__(self, 'p', GaussianRational.coerce(self.p))
        kappa = self.p / 2 if self.kappa is None else GaussianRational.coerce(self.kappa)
        object.__setattr__(self, 'kappa', kappa)
        if len(self.z) != len(self.a):
            raise ShapeError(f"Got {len(self.z)} points but {len(self.a)} weights")
        if not self.z:
            raise ShapeError("At least one point is required")
        if not self.p:
            raise DomainError("Step p must be nonzero")
        if not self.kappa:
            raise DomainError("kappa must be nonzero")

    @classmethod
    def from_imaginary(cls, z: Sequence, a_imag: Sequence, p_imag, kappa=None) -> "ParameterSet":
        """Parameters of the integration domain: a = i*a_imag, p = i*p_imag."""
        return cls(
            z=_exact_tuple(z),
            a=tuple(I * v for v in _exact_tuple(a_imag)),
            p=I * GaussianRational.coerce(p_imag),
            kappa=kappa,
        )

    @property
    def n(self) -> int:
        return len(self.z)

    # -- floating point views

    @cached_property
    def z_c(self) -> np.ndarray:
        return np.array([complex(v) for v in self.z])

    @cached_property
    def a_c(self) -> np.ndarray:
        return np.array([complex(v) for v in self.a])

    @cached_property
    def p_c(self) -> complex:
        return complex(self.p)

    @cached_property
    def kappa_c(self) -> complex:
        return complex(self.kappa)

    @cached_property
    def alpha(self) -> np.ndarray:
        """Classical exponents a_l / kappa."""
        return self.a_c / self.kappa_c

    # -- derived parameter points

    def shifted(self, ell: int, steps: int = 1) -> "ParameterSet":
        """The point (..., z_ell + steps*p, ...)."""
        self._check_index(ell)
        z = list(self.z)
        z[ell - 1] = z[ell - 1] + self.p * steps
        return ParameterSet(tuple(z), self.a, self.p, self.kappa)

    def scaled(self, s) -> "ParameterSet":
        s = GaussianRational.coerce(s)
        return ParameterSet(tuple(s * v for v in self.z), self.a, self.p, self.kappa)

    def translated(self, c) -> "ParameterSet":
        c = GaussianRational.coerce(c)
        return ParameterSet(tuple(v + c for v in self.z), self.a, self.p, self.kappa)

    def with_z(self, z: Sequence) -> "ParameterSet":
        return ParameterSet(_exact_tuple(z), self.a, self.p, self.kappa)

    def _check_index(self, ell: int):
        if not 1 <= ell <= self.n:
            raise ShapeError(f"Index {ell} out of range 1..{self.n}")

    # -- validation

    def domain_violations(self) -> List[str]:
        problems = []
        if any(v.im != 0 for v in self.z):
            problems.append("z must be real")
        elif any(self.z[i].re >= self.z[i + 1].re for i in range(self.n - 1)):
            problems.append("z must be strictly increasing")
        if self.p.re != 0 or self.p.im <= 0:
            problems.append("p must be purely imaginary with Im p > 0")
        for ell, a in enumerate(self.a, 1):
            if a.re != 0 or a.im <= 0:
                problems.append(f"a_{ell} must be purely imaginary with Im a > 0")
        return problems

    def in_domain(self) -> bool:
        return not self.domain_violations()

    def check_domain(self):
        problems = self.domain_violations()
        if problems:
            raise DomainError("Parameters outside the integration domain: " + "; ".join(problems))

    def check_real_increasing(self):
        if any(v.im != 0 for v in self.z) or any(self.z[i].re >= self.z[i + 1].re for i in range(self.n - 1)):
            raise DomainError("Interval cycles need real, strictly increasing z")

    def check_generic(self, depth: int = WORKING_DEPTH):
        """Raises GenericityError on coinciding lattice points.

        The checked set is the dual lattice up to ``depth`` together with the
        zeros z_l - a_l of b0, since the reduction divides by b0 there.
        """
        for ell, a in enumerate(self.a, 1):
            if not a:
                raise GenericityError(f"a_{ell} vanishes, b0 is degenerate")
        points = [pt for pt in SingularLattice.build(self, LatticeKind.DUAL, depth).points]
        points.extend(LatticePoint(z - a, ell, -1, -1) for ell, (z, a) in enumerate(zip(self.z, self.a), 1))
        locs = np.array([complex(pt.loc) for pt in points])
        dist = np.abs(locs[:, None] - locs[None, :])
        np.fill_diagonal(dist, np.inf)
        hit = np.argwhere(dist <= COLLISION_TOLERANCE * abs(self.p_c))
        if hit.size:
            i, j = hit[0]
            raise GenericityError(f"Lattice points {points[i].tag} and {points[j].tag} collide at {points[i].loc}")

    # -- serialisation

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'z': [str(v) for v in self.z],
            'a': [str(v) for v in self.a],
            'p': str(self.p),
            'kappa': str(self.kappa),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParameterSet":
        return cls(data['z'], data['a'], data['p'], data.get('kappa'))

    def param_hash(self) -> str:
        text = ";".join([",".join(map(str, self.z)), ",".join(map(str, self.a)), str(self.p), str(self.kappa)])
        return hashlib.sha1(text.encode()).hexdigest()[:12]


class LatticeKind(Enum):
    SING = 'sing'
    DUAL = 'dual'


@dataclass(frozen=True)
class LatticePoint:
    loc: GaussianRational
    ell: int
    sign: int
    depth: int

    @property
    def tag(self) -> Tuple[int, int, int]:
        return (self.ell, self.sign, self.depth)


@dataclass
class SingularLattice:
    """Pole lattice of the master function (SING) or its dual (DUAL).

    SING:  z_l - a_l - N p  (sign -1)  and  z_l + a_l + (N+1) p  (sign +1)
    DUAL:  z_l - a_l + (N+1) p  (sign -1)  and  z_l + a_l - N p  (sign +1)
    """
    kind: LatticeKind
    points: List[LatticePoint] = field(default_factory=list)

    @staticmethod
    def generator(params: ParameterSet, kind: LatticeKind, ell: int, sign: int, depth: int) -> GaussianRational:
        z, a, p = params.z[ell - 1], params.a[ell - 1], params.p
        if kind == LatticeKind.SING:
            return z - a - p * depth if sign < 0 else z + a + p * (depth + 1)
        return z - a + p * (depth + 1) if sign < 0 else z + a - p * depth

    @classmethod
    def build(cls, params: ParameterSet, kind: LatticeKind, depth: int) -> "SingularLattice":
        points = []
        for ell in range(1, params.n + 1):
            for sign in (-1, 1):
                for N in range(depth + 1):
                    points.append(LatticePoint(cls.generator(params, kind, ell, sign, N), ell, sign, N))
        return cls(kind, points)

    @classmethod
    def tags_of(cls, params: ParameterSet, x, kind: LatticeKind = LatticeKind.DUAL) -> List[LatticePoint]:
        """All generator tags whose lattice point equals x exactly (any depth)."""
        x = GaussianRational.coerce(x)
        found = []
        for ell in range(1, params.n + 1):
            for sign in (-1, 1):
                base = cls.generator(params, kind, ell, sign, 0)
                # both families step by -p or +p away from their base point
                step = params.p if (kind == LatticeKind.SING) == (sign > 0) else -params.p
                N = (x - base) / step
                if N.is_integer() and N.re >= 0:
                    found.append(LatticePoint(x, ell, sign, int(N.re)))
        return found

    def locations(self) -> np.ndarray:
        return np.array([complex(pt.loc) for pt in self.points])


def singular_lattice(params: ParameterSet, dual: bool = False, depth: int = 4) -> SingularLattice:
    return SingularLattice.build(params, LatticeKind.DUAL if dual else LatticeKind.SING, depth)


# -- p-deformed master function

def log_phi_p(t, params: ParameterSet):
    """log of prod_l G((t-z_l+a_l)/p) G(1-(t-z_l-a_l)/p) exp(-pi i (t-z_l)/p)."""
    t = np.asarray(t, dtype=complex)
    p = params.p_c
    result = np.zeros(t.shape, dtype=complex)
    for z, a in zip(params.z_c, params.a_c):
        result = result + log_gamma((t - z + a) / p) + log_gamma(1 - (t - z - a) / p) - 1j * math.pi * (t - z) / p
    return complex(result) if result.ndim == 0 else result


def scalar_solution(t, a, p):
    """log y for the scalar equation y(t+p) = (t+a)/(t-a) y(t)."""
    return log_phi_p(t, ParameterSet((0,), (a,), p))


def _linear_factors(t, params: ParameterSet, numerator_shift, denominator_shift, indices):
    exact = isinstance(t, GaussianRational)
    if exact:
        value = ONE
        for ell in indices:
            den = t - params.z[ell - 1] + denominator_shift(ell)
            if not den:
                raise PoleError(f"Pole of coefficient function at t={t}")
            value = value * (t - params.z[ell - 1] + numerator_shift(ell)) / den
        return value
    t = np.asarray(t, dtype=complex)
    value = np.ones(t.shape, dtype=complex)
    for ell in indices:
        den = t - params.z_c[ell - 1] + complex(denominator_shift(ell))
        if np.any(np.abs(den) <= _POLE_TOLERANCE * max(1.0, abs(params.p_c))):
            raise PoleError("Pole of coefficient function")
        value = value * (t - params.z_c[ell - 1] + complex(numerator_shift(ell))) / den
    return complex(value) if value.ndim == 0 else value


def b0(t, params: ParameterSet):
    """prod_l (t - z_l + a_l)/(t - z_l - a_l); exact for Gaussian rational t."""
    return _linear_factors(t, params, lambda ell: params.a[ell - 1], lambda ell: -params.a[ell - 1],
                           range(1, params.n + 1))


def b_ell(t, params: ParameterSet, ell: int):
    """(t - z_l - a_l - p)/(t - z_l + a_l - p)."""
    params._check_index(ell)
    return _linear_factors(t, params, lambda _: -params.a[ell - 1] - params.p,
                           lambda _: params.a[ell - 1] - params.p, [ell])


def weight_w(j: int, t, params: ParameterSet):
    """1/(t - z_j - a_j) prod_{l<j} (t - z_l + a_l)/(t - z_l - a_l)."""
    params._check_index(j)
    if isinstance(t, GaussianRational):
        den = t - params.z[j - 1] - params.a[j - 1]
        if not den:
            raise PoleError(f"Pole of w_{j} at t={t}")
        head = ONE / den
    else:
        den = np.asarray(t, dtype=complex) - params.z_c[j - 1] - params.a_c[j - 1]
        if np.any(np.abs(den) <= _POLE_TOLERANCE * max(1.0, abs(params.p_c))):
            raise PoleError(f"Pole of w_{j}")
        head = 1.0 / den
        head = complex(head) if head.ndim == 0 else head
    tail = _linear_factors(t, params, lambda ell: params.a[ell - 1], lambda ell: -params.a[ell - 1], range(1, j))
    return head * tail


def b0_rational(params: ParameterSet) -> RationalFunction:
    result = RationalFunction.constant(1)
    for z, a in zip(params.z, params.a):
        result = result * RationalFunction.linear_ratio(z - a, z + a)
    return result


def b_ell_rational(params: ParameterSet, ell: int) -> RationalFunction:
    params._check_index(ell)
    z, a, p = params.z[ell - 1], params.a[ell - 1], params.p
    return RationalFunction.linear_ratio(z + a + p, z - a + p)


def weight_rational(params: ParameterSet, j: int) -> RationalFunction:
    params._check_index(j)
    result = RationalFunction.pole(params.z[j - 1] + params.a[j - 1])
    for z, a in zip(params.z[:j - 1], params.a[:j - 1]):
        result = result * RationalFunction.linear_ratio(z - a, z + a)
    return result


# -- classical master function

def log_phi_classical(t, params: ParameterSet, m: Optional[int] = None):
    """sum_l alpha_l log|t - z_l| plus i pi alpha_l for every z_l right of t.

    ``m`` pins the interval (z_m, z_{m+1}) the points are taken from; it is
    inferred from the position of t otherwise.
    """
    params.check_real_increasing()
    t = np.asarray(t, dtype=float)
    z = params.z_c.real
    diff = t[..., None] - z
    if np.any(diff == 0):
        raise DomainError("t coincides with a marked point")
    if m is None:
        right = diff < 0
    else:
        right = np.broadcast_to(np.arange(1, params.n + 1) > m, diff.shape)
    result = np.sum(params.alpha * np.log(np.abs(diff)) + 1j * math.pi * params.alpha * right, axis=-1)
    return complex(result) if result.ndim == 0 else result


# -- decay model of G_m Phi_p along the real line

@dataclass(frozen=True)
class DecayExponents:
    """Exponential rates of |G_m Phi_p| along the negative/positive real axis.

    The model per side is log|integrand| ~ -c|t| + q log|t| + r.
    """
    c_minus: float
    c_plus: float
    q_minus: float = 0.0
    q_plus: float = 0.0
    r_minus: float = 0.0
    r_plus: float = 0.0

    def admissible(self) -> bool:
        return min(self.c_minus, self.c_plus) > 0

    def log_tail(self, radius: float) -> float:
        """Bound for log of the integrated tails beyond |t| = radius."""
        tails = []
        for c, q, r in ((self.c_minus, self.q_minus, self.r_minus), (self.c_plus, self.q_plus, self.r_plus)):
            tails.append(-c * radius + q * math.log(radius) + r - math.log(c))
        return float(np.logaddexp(*tails))


def log_abs_periodic_phi(t, params: ParameterSet, m: int, stirling: bool = False):
    """Re log(G_m Phi_p) on real t, with G_m(t) = exp(2 pi i m t / p)."""
    t = np.asarray(t, dtype=complex)
    lg = log_gamma_stirling if stirling else log_gamma
    p = params.p_c
    result = np.real(2j * math.pi * m * t / p)
    for z, a in zip(params.z_c, params.a_c):
        result = result + np.real(lg((t - z + a) / p) + lg(1 - (t - z - a) / p) - 1j * math.pi * (t - z) / p)
    return result


def decay_exponents(params: ParameterSet, m: int) -> DecayExponents:
    """Fits the Stirling log-modulus at three far abscissae on each side."""
    reach = float(np.max(np.abs(params.z_c)) + np.max(np.abs(params.a_c)))
    base = reach + 4 * STIRLING_THRESHOLD * abs(params.p_c)
    radii = np.array([base, 2 * base, 4 * base])
    model = np.stack([-radii, np.log(radii), np.ones(3)], axis=1)
    fits = []
    for side in (-1.0, 1.0):
        values = log_abs_periodic_phi(side * radii, params, m, stirling=True)
        fits.append(np.linalg.solve(model, values))
    # true rates are multiples of 2 pi / |p|; the fit carries O(1/r^2) noise
    threshold = 1e-3 * 2 * math.pi / abs(params.p_c)
    rates = [0.0 if abs(fit[0]) < threshold else float(fit[0]) for fit in fits]
    logger.debug("decay rates for m=%d: %s", m, rates)
    return DecayExponents(rates[0], rates[1], float(fits[0][1]), float(fits[1][1]),
                          float(fits[0][2]), float(fits[1][2]))

"""Complex gamma kernel.

All analytic quantities of the package (master functions, gamma products of
the closed forms, integrands) go through :func:`log_gamma`, which works on
scalars and numpy arrays alike and returns the principal branch, i.e. the
branch for which ``log_gamma(w + 1) == log(w) + log_gamma(w)`` holds with the
principal logarithm.
"""
import math
import re
from typing import Union

import numpy as np
from scipy.special import bernoulli

from .exception import PoleError, DomainError

ComplexLike = Union[complex, float, np.ndarray]

STIRLING_THRESHOLD = 12.0

_TERMS = 10
_B = bernoulli(2 * _TERMS)
_SERIES = np.array([_B[2 * k] / (2 * k * (2 * k - 1)) for k in range(1, _TERMS + 1)])
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_POLE_TOLERANCE = 8 * np.finfo(float).eps

_NUMBER = r'\d+(?:\.\d*)?(?:[eE][+-]?\d+)?'
_FULL_LITERAL = re.compile(rf'^(?P<re>[+-]?{_NUMBER})(?P<sign>[+-])(?P<im>{_NUMBER})?i$')
_IMAG_LITERAL = re.compile(rf'^(?P<sign>[+-]?)(?P<im>{_NUMBER})?i$')
_REAL_LITERAL = re.compile(rf'^(?P<re>[+-]?{_NUMBER})$')


def _as_array(w: ComplexLike) -> np.ndarray:
    arr = np.asarray(w, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Non-finite complex argument")
    return arr


def _unwrap(arr: np.ndarray):
    if arr.ndim == 0:
        return complex(arr)
    return arr


def _check_poles(w: np.ndarray):
    nearest = np.round(w.real)
    distance = np.abs(w - nearest)
    hit = (nearest <= 0) & (distance <= _POLE_TOLERANCE * np.maximum(1.0, np.abs(nearest)))
    if np.any(hit):
        bad = w[hit].flat[0] if w.ndim else w
        raise PoleError(f"Gamma pole at {complex(bad)}")


def _stirling_series(w: np.ndarray) -> np.ndarray:
    inv = 1.0 / w
    inv2 = inv * inv
    acc = np.zeros_like(w)
    for c in _SERIES[::-1]:
        acc = acc * inv2 + c
    return (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + acc * inv


def log_gamma(w: ComplexLike):
    """Principal-branch log Γ(w).

    The argument is lifted by the recurrence until ``Re w >= 12`` and the
    Stirling series is evaluated there; the lift is undone by subtracting
    principal logarithms, which keeps the branch of the recurrence.
    """
    arr = _as_array(w)
    _check_poles(arr)
    shift = np.maximum(0, np.ceil(STIRLING_THRESHOLD - arr.real)).astype(int)
    result = _stirling_series(arr + shift)
    for j in range(int(shift.max(initial=0))):
        active = j < shift
        result = result - np.where(active, np.log(np.where(active, arr + j, 1.0)), 0.0)
    return _unwrap(result)


def log_gamma_stirling(w: ComplexLike):
    """Leading Stirling form (w - 1/2) log w - w + log sqrt(2 pi) + 1/(12 w).

    Only meant for asymptotic estimates, never for final values.
    """
    arr = _as_array(w)
    if np.any(np.abs(arr) < STIRLING_THRESHOLD):
        raise DomainError(f"Stirling form requires |w| >= {STIRLING_THRESHOLD}")
    result = (arr - 0.5) * np.log(arr) - arr + _HALF_LOG_2PI + 1.0 / (12.0 * arr)
    return _unwrap(result)


def log_gamma_high_precision(w: complex, dps: int = 40) -> complex:
    """Oracle value of log Γ(w) through mpmath; used to build test references."""
    import mpmath
    with mpmath.workdps(dps):
        value = mpmath.loggamma(mpmath.mpc(w.real, w.imag) if isinstance(w, complex) else mpmath.mpf(w))
        return complex(value)


def parse_complex(literal: str) -> complex:
    """Parses ``<re>(+|-)<im>i``, plain reals and plain imaginaries like ``2i``."""
    text = literal.strip()
    real = 0.0
    match = _REAL_LITERAL.match(text)
    if match:
        value = complex(float(match.group('re')), 0.0)
    else:
        match = _FULL_LITERAL.match(text) or _IMAG_LITERAL.match(text)
        if match is None:
            raise DomainError(f"Invalid complex literal '{literal}'")
        if 're' in match.groupdict():
            real = float(match.group('re'))
        imag = float(match.group('im')) if match.group('im') else 1.0
        if match.group('sign') == '-':
            imag = -imag
        value = complex(real, imag)
    _as_array(value)
    return value


def format_complex(value: complex) -> str:
    sign = '-' if value.imag < 0 or (value.imag == 0 and math.copysign(1, value.imag) < 0) else '+'
    return f"{value.real!r}{sign}{abs(value.imag)!r}i"

"""Quadrature engines.

Two integral families occur: gamma-product integrands over the real line,
which decay exponentially with rates known from the master function, and
finite-interval integrands with algebraic endpoint singularities.

Integrands are passed as *log* functions returning complex logarithms of
the integrand; values are exponentiated once per node against a running
log scale, so results are reported as ``mantissa * exp(log_scale)``.
"""
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Tuple
import logging
import math

import numpy as np

from .exception import ConfigError, DivergentIntegralError, DomainError, NoConvergenceError
from .master import DecayExponents

logger = logging.getLogger(__name__)

LogIntegrand = Callable[[np.ndarray], np.ndarray]
LogIntervalIntegrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]

_RESCALE_MARGIN = 600.0
_ROUNDOFF = 1e-15
_MAX_LEVELS = 12
_MAX_X = 345.0


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    max_panels: int = 20000
    eps_trunc: float = 1e-14
    r_max: float = 1e5
    order: int = 20

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ConfigError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ConfigError("abs_tol must not be negative")
        if not math.isfinite(self.r_max) or self.r_max <= 0:
            raise ConfigError("r_max must be finite and positive")
        if not 0 < self.eps_trunc < 1:
            raise ConfigError("eps_trunc must lie in (0, 1)")
        if self.max_panels < 1 or self.order < 2:
            raise ConfigError("max_panels and order must be positive")

    def tightened(self, factor: float) -> "QuadratureSpec":
        return replace(self, rel_tol=self.rel_tol * factor, eps_trunc=min(self.eps_trunc, self.rel_tol * factor))


@dataclass
class IntegralResult:
    mantissa: complex
    log_scale: float = 0.0
    error_estimate: float = 0.0
    panels_used: int = 0
    truncation_radius: float = 0.0
    magnitude: float = 0.0

    @property
    def value(self) -> complex:
        return self.mantissa * math.exp(self.log_scale)

    @property
    def log_value(self) -> complex:
        return complex(np.log(self.mantissa)) + self.log_scale

    @property
    def relative_error(self) -> float:
        if self.mantissa == 0:
            return math.inf if self.error_estimate > 0 else 0.0
        return self.error_estimate / abs(self.mantissa)

    def rescaled(self, log_scale: float) -> "IntegralResult":
        factor = math.exp(self.log_scale - log_scale)
        return IntegralResult(self.mantissa * factor, log_scale, self.error_estimate * factor,
                              self.panels_used, self.truncation_radius, self.magnitude * factor)

    def to_dict(self) -> dict:
        return {
            'panels': self.panels_used,
            'truncation_radius': self.truncation_radius,
            'est_error': self.relative_error,
        }


@lru_cache(maxsize=8)
def _gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _edges(lo: float, hi: float, width: float) -> np.ndarray:
    count = max(1, int(math.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, count + 1)


class _Accumulator:
    """Sums contributions evaluated from log values against a common scale."""

    def __init__(self, log_scale: float, spec: QuadratureSpec):
        self.log_scale = log_scale
        self.spec = spec
        self.value = 0j
        self.magnitude = 0.0
        self.error = 0.0
        self.used = 0

    def exponentiate(self, logs: np.ndarray) -> np.ndarray:
        peak = float(np.max(logs.real, initial=-np.inf))
        if peak > self.log_scale + _RESCALE_MARGIN:
            factor = math.exp(self.log_scale - peak)
            self.value *= factor
            self.magnitude *= factor
            self.error *= factor
            self.log_scale = peak
        with np.errstate(under='ignore'):
            return np.exp(logs - self.log_scale)

    def budget(self, value=None, magnitude=None) -> float:
        value = self.value if value is None else value
        magnitude = self.magnitude if magnitude is None else magnitude
        absolute = self.spec.abs_tol * math.exp(-self.log_scale) if self.spec.abs_tol else 0.0
        return max(self.spec.rel_tol * abs(value), absolute, _ROUNDOFF * magnitude)

    def value_at(self, log_scale: float, value: complex) -> complex:
        return value * math.exp(log_scale - self.log_scale)


class _Panels(_Accumulator):

    def __init__(self, log_f: LogIntegrand, log_scale: float, spec: QuadratureSpec):
        super().__init__(log_scale, spec)
        self.log_f = log_f

    def _rule(self, lo: np.ndarray, hi: np.ndarray):
        x, w = _gauss_legendre(self.spec.order)
        k = self.spec.order
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        quarter = 0.5 * half
        nodes = np.concatenate([
            mid[:, None] + half[:, None] * x,
            (mid - quarter)[:, None] + quarter[:, None] * x,
            (mid + quarter)[:, None] + quarter[:, None] * x,
        ], axis=1)
        with np.errstate(divide='ignore'):
            logs = np.asarray(self.log_f(nodes), dtype=complex)
        values = self.exponentiate(logs)
        coarse = half * (values[:, :k] @ w)
        fine = quarter * (values[:, k:2 * k] @ w + values[:, 2 * k:] @ w)
        magnitude = quarter * (np.abs(values[:, k:2 * k]) @ w + np.abs(values[:, 2 * k:]) @ w)
        return coarse, fine, magnitude

    def integrate(self, edges: np.ndarray):
        """Adds the integral over [edges[0], edges[-1]], splitting panels until
        each one's coarse/fine discrepancy fits its share of the budget."""
        span = edges[-1] - edges[0]
        lo, hi = edges[:-1], edges[1:]
        while lo.size:
            self.used += lo.size
            if self.used > self.spec.max_panels:
                raise NoConvergenceError(f"Panel limit {self.spec.max_panels} exhausted")
            coarse, fine, magnitude = self._rule(lo, hi)
            error = np.abs(coarse - fine)
            budget = self.budget(self.value + fine.sum(), self.magnitude + magnitude.sum())
            accept = error <= budget * (hi - lo) / span
            self.value += fine[accept].sum()
            self.magnitude += magnitude[accept].sum()
            self.error += error[accept].sum()
            lo, hi = lo[~accept], hi[~accept]
            mid = 0.5 * (lo + hi)
            lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])


def integrate_real_line(log_f: LogIntegrand, decay: DecayExponents, spec: QuadratureSpec = None,
                        reach: float = 0.0, step: float = 1.0) -> IntegralResult:
    """Integral over the real line of exp(log_f(t)).

    ``reach`` bounds the region holding the integrand's structure and
    ``step`` is the initial panel width. The truncation radius starts where
    the decay model puts the tails below ``eps_trunc`` times the peak and is
    doubled until the endpoint values are negligible and two successive
    radii agree.
    """
    spec = spec or QuadratureSpec()
    if not decay.admissible():
        raise DivergentIntegralError(
            f"Integrand does not decay on both ends (rates {decay.c_minus:.6g}, {decay.c_plus:.6g})")
    radius = reach + 4 * step
    grid = np.linspace(-radius, radius, max(64, int(16 * radius / step)))
    with np.errstate(divide='ignore'):
        log_scale = float(np.max(np.real(log_f(grid))))
    log_eps = math.log(spec.eps_trunc)
    while decay.log_tail(radius) > log_scale + log_eps:
        radius *= 2
        if radius > spec.r_max:
            raise NoConvergenceError(f"Truncation radius exceeds r_max={spec.r_max}")
    panels = _Panels(log_f, log_scale, spec)
    panels.integrate(_edges(-radius, radius, step))
    while True:
        before, before_scale = panels.value, panels.log_scale
        with np.errstate(divide='ignore'):
            ends = float(np.max(np.real(log_f(np.array([-radius, radius])))))
        negligible = ends - panels.log_scale < log_eps + math.log(max(panels.magnitude, 1e-300))
        outer = 2 * radius
        if outer > spec.r_max:
            raise NoConvergenceError(f"Truncation radius exceeds r_max={spec.r_max}")
        panels.integrate(_edges(-outer, -radius, 4 * step))
        panels.integrate(_edges(radius, outer, 4 * step))
        radius = outer
        delta = abs(panels.value - panels.value_at(before_scale, before))
        logger.debug("radius %g: delta %.3g of budget %.3g", radius, delta, panels.budget())
        if negligible and delta <= panels.budget():
            break
    tail = math.exp(min(decay.log_tail(radius) - panels.log_scale, 700.0))
    return IntegralResult(panels.value, panels.log_scale, panels.error + delta + tail, panels.used, radius,
                          panels.magnitude)


def _tanh_sinh_nodes(lo: float, hi: float, u: np.ndarray):
    half = 0.5 * (hi - lo)
    x = 0.5 * math.pi * np.sinh(u)
    dist_left = 2 * half / (1 + np.exp(-2 * x))
    dist_right = 2 * half / (1 + np.exp(2 * x))
    t = np.where(u < 0, lo + dist_left, hi - dist_right)
    log_cosh_x = np.abs(x) + np.log1p(np.exp(-2 * np.abs(x))) - math.log(2)
    log_weight = math.log(half * 0.5 * math.pi) + np.log(np.cosh(u)) - 2 * log_cosh_x
    return t, dist_left, dist_right, log_weight


def integrate_interval(log_f: LogIntervalIntegrand, lo: float, hi: float,
                       endpoint_exponents: Tuple[complex, complex], spec: QuadratureSpec = None) -> IntegralResult:
    """Integral over [lo, hi] of exp(log_f(t, t - lo, hi - t)).

    Double-exponential substitution; the integrand receives the endpoint
    distances separately since they are far more accurate than t - lo.
    """
    spec = spec or QuadratureSpec()
    if not lo < hi:
        raise DomainError("Interval must satisfy lo < hi")
    worst = min(complex(e).real for e in endpoint_exponents)
    if worst <= -1:
        raise DomainError(f"Endpoint exponent with real part {worst} is not integrable")
    log_eps = math.log(max(spec.rel_tol * 1e-3, 1e-300))
    limit = math.asinh(min(-log_eps / ((1 + worst) * math.pi), 2 * _MAX_X / math.pi))

    def evaluate(u: np.ndarray):
        t, dl, dr, log_weight = _tanh_sinh_nodes(lo, hi, u)
        with np.errstate(divide='ignore'):
            return np.asarray(log_f(t, dl, dr), dtype=complex) + log_weight

    h = 0.5
    count = int(math.ceil(limit / h))
    logs = evaluate(h * np.arange(-count, count + 1))
    acc = _Accumulator(float(np.max(logs.real)), spec)
    acc.used = logs.size
    values = acc.exponentiate(logs)
    total, magnitude = h * values.sum(), h * np.abs(values).sum()
    for level in range(1, _MAX_LEVELS + 1):
        previous_scale = acc.log_scale
        h /= 2
        # only the odd multiples of the halved step are new
        odd = count * 2 ** level
        values = acc.exponentiate(evaluate(h * np.arange(-odd + 1, odd, 2)))
        acc.used += values.size
        previous = acc.value_at(previous_scale, total)
        magnitude = acc.value_at(previous_scale, magnitude).real
        total = 0.5 * previous + h * values.sum()
        magnitude = 0.5 * magnitude + h * np.abs(values).sum()
        delta = abs(total - previous)
        if level >= 3 and delta <= acc.budget(total, magnitude):
            return IntegralResult(total, acc.log_scale, delta, acc.used, 0.0, magnitude)
    raise NoConvergenceError(f"tanh-sinh did not converge in {_MAX_LEVELS} levels")


def jackson_sum(h: Callable[[complex], complex], xi: complex, p: complex, support_window: int) -> complex:
    """p * sum of h(xi + l p) over |l| <= support_window."""
    values = np.array([h(xi + ell * p) for ell in range(-support_window, support_window + 1)], dtype=complex)
    return p * values.sum()

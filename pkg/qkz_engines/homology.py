"""Cycles and their pairings with cohomology classes.

The p-cycles are the functionals f -> int_R G_m Phi_p f dt with the
periodic weights G_m(t) = exp(2 pi i m t / p); the classical cycles are
the intervals [z_m, z_{m+1}]. Both determinant formulas and Barnes'
formula are checked here against their gamma-product closed forms.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union
import logging
import math
import warnings

import numpy as np

from ._exact import RationalFunction
from ._util import log_det, map_tasks
from .complexfn import log_gamma
from .contour import IntegralResult, QuadratureSpec, integrate_interval, integrate_real_line
from .exception import ConditioningWarning, DivergentIntegralError, DomainError
from .master import DecayExponents, ParameterSet, b_ell_rational, decay_exponents, log_phi_p, weight_w
from .reduction import apply_Dp, strip_poles
from .result import CheckReport, LogValue

logger = logging.getLogger(__name__)

Factor = Union[RationalFunction, Callable[[np.ndarray], np.ndarray]]

CONDITION_LIMIT = 1e8


@dataclass(frozen=True)
class PeriodicWeight:
    m: int

    def admissible(self, n: int) -> bool:
        return 1 <= self.m <= n - 1

    def log(self, t, p: complex):
        return 2j * math.pi * self.m * np.asarray(t) / p


@dataclass(frozen=True)
class IntervalCycle:
    m: int

    def bounds(self, params: ParameterSet):
        if not 1 <= self.m <= params.n - 1:
            raise DomainError(f"Interval index {self.m} outside 1..{params.n - 1}")
        params.check_real_increasing()
        return float(params.z[self.m - 1].re), float(params.z[self.m].re)


def check_separated(params: ParameterSet):
    """Raises DomainError unless the real line separates the two pole families of Phi_p."""
    if params.p.re != 0 or params.p.im <= 0:
        raise DomainError("p must be purely imaginary with Im p > 0")
    for ell, (z, a) in enumerate(zip(params.z, params.a), 1):
        if (z - a).im >= 0 or (z + a + params.p).im <= 0:
            raise DomainError(f"Poles generated by point {ell} are not separated by the real line")


def pair(params: ParameterSet, m: int, f: Factor, spec: QuadratureSpec = None) -> IntegralResult:
    """int_R G_m Phi_p f dt."""
    check_separated(params)
    if isinstance(f, RationalFunction) and any(loc.im == 0 for loc in f.poles):
        raise DomainError("Factor has a pole on the real line")
    decay = decay_exponents(params, m)
    if not decay.admissible():
        raise DivergentIntegralError(f"G_{m} is not integrable against Phi_p for n={params.n}")
    weight = PeriodicWeight(m)

    def log_integrand(t):
        return weight.log(t, params.p_c) + log_phi_p(t, params) + np.log(f(t))

    reach = float(np.max(np.abs(params.z_c.real)) + np.max(np.abs(params.a_c)))
    return integrate_real_line(log_integrand, decay, spec, reach=reach, step=abs(params.p_c) / 2)


def weight_factor(params: ParameterSet, j: int):
    return lambda t: weight_w(j, t, params)


@dataclass
class SolutionMatrix:
    """Theta[m][j] = int_R G_m Phi_p w_j dt as mantissas with one log scale per row."""
    values: np.ndarray
    row_log_scales: np.ndarray
    errors: np.ndarray
    params: ParameterSet
    results: List[List[IntegralResult]] = field(default_factory=list)

    def full(self) -> np.ndarray:
        return self.values * np.exp(self.row_log_scales)[:, None]

    def log_det(self, column_factors: Optional[Sequence[complex]] = None):
        values = self.values
        if column_factors is not None:
            values = values * np.asarray(column_factors, dtype=complex)[None, :]
        return log_det(values, self.row_log_scales)

    def relative_error(self) -> float:
        return float(np.sum(self.errors))

    def quadrature(self) -> dict:
        flat = [r for row in self.results for r in row]
        return {
            'panels': int(sum(r.panels_used for r in flat)),
            'truncation_radius': float(max(r.truncation_radius for r in flat)),
            'est_error': self.relative_error(),
        }


def _theta_entry(task) -> IntegralResult:
    params, m, j, spec = task
    return pair(params, m, weight_factor(params, j), spec)


def theta(params: ParameterSet, spec: QuadratureSpec = None, workers: int = 1) -> SolutionMatrix:
    size = params.n - 1
    tasks = [(params, m, j, spec) for m in range(1, size + 1) for j in range(1, size + 1)]
    flat = map_tasks(_theta_entry, tasks, workers)
    results = [flat[i * size:(i + 1) * size] for i in range(size)]
    scales = np.array([max(r.log_scale for r in row) for row in results])
    values = np.array([[r.rescaled(scale).mantissa for r in row] for row, scale in zip(results, scales)])
    errors = np.array([[r.relative_error for r in row] for row in results])
    matrix = SolutionMatrix(values, scales, errors, params, results)
    if size > 1:
        cond = np.linalg.cond(values)
        if cond > CONDITION_LIMIT:
            warnings.warn(f"Solution matrix condition number {cond:.3g} exceeds {CONDITION_LIMIT:g}",
                          ConditioningWarning)
    return matrix


def qdet_closed_form(params: ParameterSet) -> complex:
    """log of the closed form of det((2 a_l / p) Theta_{m l})."""
    n, p = params.n, params.p_c
    z, a = params.z_c, params.a_c
    result = (n - 1) * 1j * math.pi * np.sum(z) / p + n * (n - 1) / 2 * np.log(2j * math.pi)
    result += np.sum(log_gamma(2 * a / p + 1)) - log_gamma(2 * np.sum(a) / p + 1)
    for ell in range(n):
        for m in range(ell + 1, n):
            result += log_gamma(1 + (z[m] + a[m] - z[ell] + a[ell]) / p)
            result += log_gamma((z[ell] + a[ell] - z[m] + a[m]) / p)
    return complex(result)


def qdet_check(params: ParameterSet, spec: QuadratureSpec = None, tol: float = 1e-6,
               workers: int = 1) -> CheckReport:
    params.check_domain()
    matrix = theta(params, spec, workers)
    factors = [2 * params.a_c[ell] / params.p_c for ell in range(params.n - 1)]
    log_abs, arg = matrix.log_det(factors)
    lhs = LogValue(log_abs, arg)
    rhs = LogValue.from_log(qdet_closed_form(params))
    return CheckReport.compare('qdet', params.n, params.to_dict(), lhs, rhs, tol, quadrature=matrix.quadrature())


def barnes_check(a: complex, b: complex, c: complex, d: complex, spec: QuadratureSpec = None,
                 tol: float = 1e-8) -> CheckReport:
    """int over the imaginary axis of G(a+t)G(b+t)G(c-t)G(d-t) dt against its closed form."""
    if min(complex(v).real for v in (a, b, c, d)) <= 0:
        raise DomainError("Barnes integral needs Re a, Re b, Re c, Re d > 0")

    def log_integrand(s):
        t = 1j * np.asarray(s)
        return log_gamma(a + t) + log_gamma(b + t) + log_gamma(c - t) + log_gamma(d - t)

    power = float((complex(a) + b + c + d).real) - 2
    decay = DecayExponents(2 * math.pi, 2 * math.pi, power, power, 2 * math.log(2 * math.pi),
                           2 * math.log(2 * math.pi))
    reach = max(abs(complex(v).imag) for v in (a, b, c, d))
    result = integrate_real_line(log_integrand, decay, spec, reach=reach, step=0.5)
    lhs = LogValue.from_log(result.log_value + 0.5j * math.pi)
    rhs = LogValue.from_log(math.log(2 * math.pi) + 0.5j * math.pi + log_gamma(a + c) + log_gamma(a + d)
                            + log_gamma(b + c) + log_gamma(b + d) - log_gamma(a + b + c + d))
    params = {k: str(complex(v)) for k, v in zip('abcd', (a, b, c, d))}
    quadrature = {'panels': result.panels_used, 'truncation_radius': result.truncation_radius,
                  'est_error': result.relative_error}
    return CheckReport.compare('barnes', 2, params, lhs, rhs, tol, quadrature=quadrature)


# -- classical cycles

def classical_entry(params: ParameterSet, cycle: IntervalCycle, ell: int,
                    spec: QuadratureSpec = None) -> IntegralResult:
    """int over [z_m, z_{m+1}] of Phi dt/(t - z_ell) under the fixed branch convention."""
    lo, hi = cycle.bounds(params)
    m = cycle.m
    alpha = params.alpha
    z = params.z_c.real
    phase = 1j * math.pi * np.sum(alpha[m:])

    def log_integrand(t, dist_left, dist_right):
        result = phase + alpha[m - 1] * np.log(dist_left) + alpha[m] * np.log(dist_right)
        for k in range(params.n):
            if k not in (m - 1, m):
                result = result + alpha[k] * np.log(np.abs(t - z[k]))
        if ell == m:
            return result - np.log(dist_left)
        if ell == m + 1:
            return result - np.log(-dist_right + 0j)
        return result - np.log(t - z[ell - 1] + 0j)

    exponents = (alpha[m - 1] - (ell == m), alpha[m] - (ell == m + 1))
    return integrate_interval(log_integrand, lo, hi, exponents, spec)


def classical_solution(params: ParameterSet, cycle: IntervalCycle, spec: QuadratureSpec = None) -> np.ndarray:
    """(int_gamma Phi dt/(t - z_1), ..., int_gamma Phi dt/(t - z_n))."""
    return np.array([classical_entry(params, cycle, ell, spec).value for ell in range(1, params.n + 1)])


def classical_det_check(params: ParameterSet, spec: QuadratureSpec = None, tol: float = 1e-8) -> CheckReport:
    """det(alpha_l int_{gamma_m} Phi dt/(t - z_l)) against the gamma/power closed form, modulus only."""
    params.check_real_increasing()
    n = params.n
    alpha = params.alpha
    results = [[classical_entry(params, IntervalCycle(m), ell, spec) for m in range(1, n)] for ell in range(1, n)]
    values = np.array([[alpha[ell] * r.value for r in row] for ell, row in enumerate(results)])
    log_abs, arg = log_det(values)
    z = params.z_c.real
    rhs = np.sum(log_gamma(alpha + 1)) - log_gamma(np.sum(alpha) + 1)
    for i in range(n):
        for j in range(n):
            if i != j:
                rhs += alpha[j] * math.log(abs(z[i] - z[j]))
    lhs = LogValue(log_abs, arg)
    rhs = LogValue.from_log(complex(rhs))
    est = float(sum(r.relative_error for row in results for r in row))
    report = CheckReport.compare('classical-det', n, params.to_dict(), lhs, rhs, tol, modulus_only=True,
                                 quadrature={'panels': sum(r.panels_used for row in results for r in row),
                                             'truncation_radius': 0.0, 'est_error': est})
    report.details['phase_difference'] = math.remainder(lhs.arg - rhs.arg, 2 * math.pi)
    return report


# -- properties of the p-cycles as operations

def periodicity_check(params: ParameterSet, f: RationalFunction, ell: int, spec: QuadratureSpec = None,
                      tol: float = 1e-8) -> CheckReport:
    """<[G_m](z + p e_ell), f> against <[G_m](z), b_ell f> for every admissible m."""
    shifted = params.shifted(ell)
    g = b_ell_rational(params, ell) * f
    worst: Optional[CheckReport] = None
    for m in range(1, params.n):
        lhs = pair(shifted, m, f, spec)
        rhs = pair(params, m, g, spec)
        report = CheckReport.compare('periodicity', params.n, params.to_dict(), LogValue.from_log(lhs.log_value),
                                     LogValue.from_log(rhs.log_value), tol,
                                     quadrature={'panels': lhs.panels_used + rhs.panels_used,
                                                 'truncation_radius': max(lhs.truncation_radius,
                                                                          rhs.truncation_radius),
                                                 'est_error': lhs.relative_error + rhs.relative_error})
        report.details = {'m': m, 'ell': ell}
        if worst is None or report.rel_err > worst.rel_err:
            worst = report
    return worst


def boundary_check(params: ParameterSet, g: RationalFunction, spec: QuadratureSpec = None,
                   tol: float = 1e-8) -> CheckReport:
    """|<[G_m], D_p g>| relative to int |G_m Phi_p D_p g|, worst m."""
    offending = strip_poles(g, params)
    if offending:
        raise DomainError(f"g has poles {', '.join(map(str, offending))} between R and R + p")
    image = apply_Dp(g, params)
    ratios, panels = [], 0
    for m in range(1, params.n):
        result = pair(params, m, image, spec)
        ratios.append(abs(result.mantissa) / result.magnitude if result.magnitude else 0.0)
        panels += result.panels_used
    rel_err = max(ratios)
    return CheckReport('boundary', params.n, params.to_dict(), abs_err=rel_err, rel_err=rel_err, tol=tol,
                       passed=rel_err <= tol, quadrature={'panels': panels, 'truncation_radius': 0.0,
                                                          'est_error': 0.0},
                       details={'per_m': ratios})

from qkz_engines.complexfn import log_gamma
from qkz_engines.contour import IntegralResult, QuadratureSpec, integrate_interval, integrate_real_line, jackson_sum
from qkz_engines.exception import ConfigError, DivergentIntegralError, DomainError, NoConvergenceError
from qkz_engines.master import DecayExponents
import cmath
import math

import numpy as np

from unittest import TestCase


def log_gaussian(t):
    return -np.asarray(t) ** 2 + 0j


def log_beta(a, b):
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


class QuadratureSpecTest(TestCase):

    def test_defaults(self):
        spec = QuadratureSpec()
        self.assertEqual(spec.rel_tol, 1e-9)
        self.assertAlmostEqual(spec.tightened(0.1).rel_tol, 1e-10, delta=1e-20)

    def test_invalid(self):
        for kwargs in [{'rel_tol': 0}, {'abs_tol': -1}, {'r_max': math.inf}, {'eps_trunc': 1.0},
                       {'max_panels': 0}]:
            with self.assertRaises(ConfigError):
                QuadratureSpec(**kwargs)


class RealLineTest(TestCase):

    def test_gaussian(self):
        result = integrate_real_line(log_gaussian, DecayExponents(1.0, 1.0))
        self.assertLess(abs(result.value - math.sqrt(math.pi)), 1e-10)
        self.assertLess(result.relative_error, 1e-8)
        self.assertGreater(result.truncation_radius, 6)

    def test_sech_squared(self):
        def log_f(t):
            t = np.asarray(t)
            return -2 * (np.logaddexp(t, -t) - math.log(2)) + 0j

        decay = DecayExponents(2.0, 2.0, 0.0, 0.0, math.log(4), math.log(4))
        result = integrate_real_line(log_f, decay)
        self.assertLess(abs(result.value - 2), 1e-9)

    def test_large_log_scale(self):
        # the integrand itself overflows a double; only its logarithm is representable
        result = integrate_real_line(lambda t: log_gaussian(t) + 1000.0, DecayExponents(1.0, 1.0))
        self.assertAlmostEqual(result.log_scale, 1000.0, delta=1.0)
        self.assertLess(abs(result.log_value - (1000.0 + 0.5 * math.log(math.pi))), 1e-9)

    def test_divergent(self):
        with self.assertRaises(DivergentIntegralError):
            integrate_real_line(log_gaussian, DecayExponents(0.0, 1.0))

    def test_radius_limit(self):
        with self.assertRaises(NoConvergenceError):
            integrate_real_line(log_gaussian, DecayExponents(1.0, 1.0), QuadratureSpec(r_max=10))

    def test_panel_limit(self):
        with self.assertRaises(NoConvergenceError):
            integrate_real_line(log_gaussian, DecayExponents(1.0, 1.0), QuadratureSpec(max_panels=10))


class IntervalTest(TestCase):

    def test_beta(self):
        for a, b in [(0.5, 0.5), (2.5, 0.3), (1.5 + 2j, 0.7)]:
            def log_f(t, dl, dr):
                return (a - 1) * np.log(dl) + (b - 1) * np.log(dr) + 0j

            result = integrate_interval(log_f, 2.0, 5.0, (a - 1, b - 1))
            expected = cmath.exp((a + b - 1) * math.log(3) + log_beta(a, b))
            self.assertLess(abs(result.value / expected - 1), 1e-8)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            integrate_interval(lambda t, dl, dr: 0 * t + 0j, 1.0, 1.0, (0, 0))
        with self.assertRaises(DomainError):
            integrate_interval(lambda t, dl, dr: -np.log(dl) + 0j, 0.0, 1.0, (-1, 0))


class ResultTest(TestCase):

    def test_rescaled(self):
        result = IntegralResult(2.0 + 0j, 3.0, 1e-3)
        copy = result.rescaled(5.0)
        self.assertAlmostEqual(copy.value, result.value, places=9)
        self.assertAlmostEqual(copy.relative_error, result.relative_error)

    def test_zero_mantissa(self):
        self.assertEqual(IntegralResult(0j).relative_error, 0.0)
        self.assertEqual(IntegralResult(0j, error_estimate=1.0).relative_error, math.inf)


class JacksonSumTest(TestCase):

    def test_symmetric_window(self):
        self.assertAlmostEqual(jackson_sum(lambda t: 1.0, 0.3, 2j, 2), 10j)
        self.assertAlmostEqual(jackson_sum(lambda t: t, 0.3, 1j, 3), 7 * 0.3 * 1j)

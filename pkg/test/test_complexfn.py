from qkz_engines.complexfn import (format_complex, log_gamma, log_gamma_high_precision, log_gamma_stirling,
                                   parse_complex)
from qkz_engines.exception import DomainError, PoleError
import math

import numpy as np
from scipy.special import loggamma

from unittest import TestCase


def _strip_points(count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-20, 20, count) + 1j * rng.uniform(-40, 40, count)


class LogGammaTest(TestCase):

    def test_known_values(self):
        self.assertAlmostEqual(abs(log_gamma(1.0)), 0.0, places=14)
        self.assertAlmostEqual(abs(log_gamma(2.0)), 0.0, places=14)
        self.assertAlmostEqual(log_gamma(0.5).real, 0.5 * math.log(math.pi), places=13)
        self.assertAlmostEqual(log_gamma(10.0).real, math.log(362880), places=12)

    def test_against_scipy(self):
        w = _strip_points(500)
        expected = loggamma(w)
        actual = log_gamma(w)
        err = np.abs(actual - expected) / np.maximum(1.0, np.abs(expected))
        self.assertLess(float(np.max(err)), 1e-12)

    def test_against_mpmath(self):
        for w in [0.3 + 0.1j, -4.5 + 2j, 25 - 30j]:
            self.assertLess(abs(log_gamma(w) - log_gamma_high_precision(w)), 1e-12)

    def test_recurrence(self):
        w = _strip_points(1000, seed=1)
        residual = log_gamma(w + 1) - log_gamma(w) - np.log(w)
        self.assertLess(float(np.max(np.abs(residual))), 1e-12)

    def test_reflection(self):
        rng = np.random.default_rng(2)
        w = rng.uniform(-6, 6, 1000) + 1j * rng.uniform(-5, 5, 1000)
        product = np.exp(log_gamma(w) + log_gamma(1 - w)) * np.sin(np.pi * w) / np.pi
        self.assertLess(float(np.max(np.abs(product - 1))), 1e-10)

    def test_scalar_and_array(self):
        self.assertIsInstance(log_gamma(2.5 + 1j), complex)
        self.assertEqual(log_gamma(np.array([1.0, 2.0, 3.0])).shape, (3,))

    def test_poles(self):
        for w in [0.0, -1.0, -7.0, -3 + 0j]:
            with self.assertRaises(PoleError):
                log_gamma(w)
        with self.assertRaises(PoleError):
            log_gamma(np.array([1.5, -2.0]))

    def test_non_finite(self):
        with self.assertRaises(DomainError):
            log_gamma(complex(math.nan, 0))
        with self.assertRaises(DomainError):
            log_gamma(math.inf)

    def test_near_pole_is_finite(self):
        self.assertTrue(np.isfinite(log_gamma(-3 + 1e-6)))


class StirlingTest(TestCase):

    def test_accuracy(self):
        w = 50 + 10j
        self.assertLess(abs(log_gamma_stirling(w) - log_gamma(w)), 1e-6)

    def test_domain(self):
        with self.assertRaises(DomainError):
            log_gamma_stirling(3 + 1j)


class LiteralTest(TestCase):

    def test_parse(self):
        self.assertEqual(parse_complex('1.5-2i'), 1.5 - 2j)
        self.assertEqual(parse_complex('2i'), 2j)
        self.assertEqual(parse_complex('-i'), -1j)
        self.assertEqual(parse_complex('3'), 3 + 0j)
        self.assertEqual(parse_complex(' -0.5+1e-3i '), -0.5 + 1e-3j)

    def test_invalid(self):
        for literal in ['abc', '1+2', 'i1', '']:
            with self.assertRaises(DomainError):
                parse_complex(literal)

    def test_format(self):
        self.assertEqual(parse_complex(format_complex(1.5 - 2j)), 1.5 - 2j)
        self.assertTrue(format_complex(1.0 + 0j).endswith('i'))

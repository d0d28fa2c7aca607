from qkz_engines._exact import GaussianRational, RationalFunction
from qkz_engines.exception import DivergentIntegralError, DomainError
from qkz_engines.homology import (IntervalCycle, PeriodicWeight, barnes_check, boundary_check, check_separated,
                                  classical_det_check, classical_solution, pair, periodicity_check, qdet_check,
                                  theta, weight_factor)
from qkz_engines.master import LatticeKind, ParameterSet, SingularLattice, weight_rational
from qkz_engines._suite.runconf import ParameterBlock

import numpy as np

from unittest import TestCase


def two_points() -> ParameterSet:
    return ParameterSet.from_imaginary(['0', '1'], ['13/10', '6/5'], 1)


def three_points() -> ParameterSet:
    return ParameterSet.from_imaginary(['0', '1', '5/2'], ['13/10', '6/5', '27/20'], 1)


def four_points() -> ParameterSet:
    return ParameterSet.from_imaginary(['0', '1', '5/2', '4'], ['13/10', '6/5', '27/20', '7/5'], 1)


class CycleTest(TestCase):

    def test_periodic_weight(self):
        self.assertTrue(PeriodicWeight(1).admissible(2))
        self.assertFalse(PeriodicWeight(0).admissible(3))
        self.assertFalse(PeriodicWeight(3).admissible(3))

    def test_interval(self):
        self.assertEqual(IntervalCycle(2).bounds(three_points()), (1.0, 2.5))
        with self.assertRaises(DomainError):
            IntervalCycle(3).bounds(three_points())
        with self.assertRaises(DomainError):
            IntervalCycle(1).bounds(ParameterSet.from_imaginary(['1', '0'], ['13/10', '6/5'], 1))

    def test_separated(self):
        check_separated(two_points())
        with self.assertRaises(DomainError):
            check_separated(ParameterSet(['0', '1'], ['13/10i', '6/5i'], '-i'))
        with self.assertRaises(DomainError):
            check_separated(ParameterSet.from_imaginary(['0', '1'], ['-1/2', '6/5'], 1))


class PairingTest(TestCase):

    def test_divergent(self):
        params = two_points()
        with self.assertRaises(DivergentIntegralError):
            pair(params, 2, weight_factor(params, 1))
        with self.assertRaises(DivergentIntegralError):
            pair(params, 0, weight_factor(params, 1))

    def test_real_pole(self):
        with self.assertRaises(DomainError):
            pair(two_points(), 1, RationalFunction.pole(GaussianRational.parse('1/2')))

    def test_rational_factor_matches_callable(self):
        params = two_points()
        exact = pair(params, 1, weight_rational(params, 1))
        numeric = pair(params, 1, weight_factor(params, 1))
        self.assertLess(abs(exact.value / numeric.value - 1), 1e-9)

    def test_theta(self):
        matrix = theta(three_points())
        self.assertEqual(matrix.values.shape, (2, 2))
        self.assertEqual(matrix.full().shape, (2, 2))
        self.assertEqual(set(matrix.quadrature()), {'panels', 'truncation_radius', 'est_error'})
        self.assertLess(matrix.relative_error(), 1e-6)


class DeterminantTest(TestCase):

    def test_qdet_two_points(self):
        report = qdet_check(two_points())
        self.assertTrue(report.passed, report.rel_err)

    def test_qdet_three_points(self):
        report = qdet_check(three_points())
        self.assertTrue(report.passed, report.rel_err)
        self.assertGreater(report.quadrature['panels'], 0)

    def test_qdet_four_points(self):
        report = qdet_check(four_points())
        self.assertTrue(report.passed, report.rel_err)
        self.assertEqual(report.n, 4)

    def test_qdet_sampled_points(self):
        for n in (2, 3):
            for seed in (1, 2, 3):
                with self.subTest(n=n, seed=seed):
                    params = ParameterBlock(n).to_params(np.random.default_rng(seed))
                    report = qdet_check(params)
                    self.assertTrue(report.passed, (params.to_dict(), report.rel_err))

    def test_classical_det(self):
        # alpha_1 B(alpha_1, alpha_2 + 1) on [0, 1]
        report = classical_det_check(two_points())
        self.assertTrue(report.passed, report.rel_err)
        self.assertIn('phase_difference', report.details)

    def test_classical_det_three_points(self):
        self.assertTrue(classical_det_check(three_points()).passed)

    def test_classical_solution_relation(self):
        # integrating dPhi over the interval gives sum_l alpha_l Psi_l = 0
        params = three_points()
        for m in (1, 2):
            psi = classical_solution(params, IntervalCycle(m))
            self.assertEqual(psi.shape, (3,))
            total = sum(alpha * value for alpha, value in zip(params.alpha, psi))
            self.assertLess(abs(total), 1e-8 * max(abs(psi)))

    def test_barnes(self):
        self.assertTrue(barnes_check(0.5, 0.5, 0.5, 0.5).passed)
        self.assertTrue(barnes_check(0.3, 0.7, 1.2, 0.5).passed)
        with self.assertRaises(DomainError):
            barnes_check(0.0, 0.5, 0.5, 0.5)


class ContourPropertyTest(TestCase):

    def test_periodicity(self):
        params = two_points()
        report = periodicity_check(params, weight_rational(params, 1), 1, tol=1e-6)
        self.assertTrue(report.passed, report.rel_err)
        self.assertEqual(report.details['ell'], 1)

    def test_boundary(self):
        params = two_points()
        loc = SingularLattice.generator(params, LatticeKind.DUAL, 1, -1, 0)
        report = boundary_check(params, RationalFunction.pole(loc), tol=1e-6)
        self.assertTrue(report.passed, report.rel_err)

    def test_boundary_strip_pole(self):
        with self.assertRaises(DomainError):
            boundary_check(two_points(), RationalFunction.pole(GaussianRational.parse('1/2i')))

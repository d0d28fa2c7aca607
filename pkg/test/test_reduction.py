from qkz_engines._exact import GaussianRational, RationalFunction, ZERO, ONE
from qkz_engines.exception import ClassViolationError, GenericityError
from qkz_engines.homology import qdet_closed_form
from qkz_engines.master import LatticeKind, ParameterSet, SingularLattice, weight_rational
from qkz_engines.reduction import (apply_Dp, beta_matrix, classical_reduce, gauss_manin, kz_matrices, nabla, reduce,
                                   strip_poles)
import cmath

from unittest import TestCase


def Q(text: str) -> GaussianRational:
    return GaussianRational.parse(text)


def two_points() -> ParameterSet:
    return ParameterSet.from_imaginary(['0', '1'], ['13/10', '6/5'], 1)


def three_points() -> ParameterSet:
    return ParameterSet.from_imaginary(['0', '1', '5/2'], ['13/10', '6/5', '27/20'], 1)


def dual(params: ParameterSet, ell: int, sign: int, depth: int) -> GaussianRational:
    return SingularLattice.generator(params, LatticeKind.DUAL, ell, sign, depth)


class ReduceTest(TestCase):

    def setUp(self) -> None:
        self.params = three_points()

    def test_basis(self):
        for j in (1, 2):
            cls = reduce(weight_rational(self.params, j), self.params)
            self.assertEqual(cls.coords, tuple(ONE if k == j else ZERO for k in (1, 2)))
            self.assertTrue(cls.certificate.is_zero())

    def test_last_basis_element(self):
        params = self.params
        cls = reduce(weight_rational(params, 3), params)
        self.assertEqual(cls.coords, (-params.a[0] / params.a[2], -params.a[1] / params.a[2]))
        self.assertTrue(cls.verify())

    def test_exact_forms(self):
        params = self.params
        for g in [RationalFunction.constant(1), RationalFunction.monomial(2),
                  RationalFunction.pole(dual(params, 1, -1, 0)),
                  RationalFunction.pole(dual(params, 2, 1, 1), Q('3/7')),
                  RationalFunction.pole(dual(params, 3, -1, 2), Q('1-i')) + RationalFunction.monomial(1, Q('2i'))]:
            cls = reduce(apply_Dp(g, params), params)
            self.assertEqual(cls.coords, (ZERO, ZERO))
            self.assertTrue(cls.verify())

    def test_deep_poles(self):
        params = self.params
        f = (RationalFunction.pole(dual(params, 1, 1, 6), Q('2'))
             + RationalFunction.pole(dual(params, 2, -1, 5))
             + RationalFunction.monomial(3, Q('1/2')))
        cls = reduce(f, params)
        self.assertTrue(cls.residual().is_zero())
        self.assertEqual(len(cls.coords), 2)

    def test_linearity(self):
        params = self.params
        f = RationalFunction.pole(dual(params, 1, -1, 3))
        g = RationalFunction.pole(dual(params, 3, 1, 2), Q('5'))
        cf, cg, csum = reduce(f, params), reduce(g, params), reduce(f + g, params)
        self.assertEqual(csum.coords, tuple(x + y for x, y in zip(cf.coords, cg.coords)))

    def test_class_violations(self):
        params = self.params
        with self.assertRaises(ClassViolationError):
            reduce(RationalFunction.pole(dual(params, 1, -1, 0), 1, 2), params)
        with self.assertRaises(ClassViolationError):
            reduce(RationalFunction.pole(Q('7')), params)
        with self.assertRaises(ClassViolationError):
            reduce(RationalFunction.pole(dual(params, 1, 1, 40)), params)
        with self.assertRaises(ClassViolationError):
            apply_Dp(RationalFunction.pole(Q('1/3')), params)

    def test_trivial_cohomology(self):
        with self.assertRaises(GenericityError):
            reduce(RationalFunction.constant(1), ParameterSet(['0'], ['i'], 'i'))

    def test_strip_poles(self):
        g = RationalFunction.pole(Q('1/2i')) + RationalFunction.pole(Q('3+2i')) + RationalFunction.pole(Q('-i'))
        self.assertEqual(strip_poles(g, self.params), [Q('1/2i')])


class BetaTest(TestCase):

    def test_two_points(self):
        params = two_points()
        delta = params.z[1] - params.z[0]
        s = params.a[0] + params.a[1]
        p = params.p
        beta1 = beta_matrix(params, 1)
        self.assertEqual(beta1.entries, [[(delta - s) / (delta + s)]])
        beta2 = beta_matrix(params, 2)
        self.assertEqual(beta2.entries, [[(delta + p + s) / (delta + p - s)]])
        self.assertEqual(len(beta1.certificates), 1)

    def test_determinant_matches_closed_form(self):
        params = three_points()
        for ell in (1, 2, 3):
            beta = beta_matrix(params, ell)
            self.assertEqual(beta.size, 2)
            self.assertEqual(beta.to_complex().shape, (2, 2))
            expected = cmath.exp(qdet_closed_form(params.shifted(ell)) - qdet_closed_form(params))
            self.assertLess(abs(complex(beta.determinant()) / expected - 1), 1e-9)

    def test_parallel(self):
        params = three_points()
        self.assertEqual(beta_matrix(params, 2, workers=2).entries, beta_matrix(params, 2).entries)


class ClassicalTest(TestCase):

    def setUp(self) -> None:
        self.params = three_points()
        self.alpha = [a / self.params.kappa for a in self.params.a]

    def test_basis(self):
        params = self.params
        self.assertEqual(classical_reduce(RationalFunction.pole(params.z[0]), params).coords, (ONE, ZERO))
        cls = classical_reduce(RationalFunction.pole(params.z[2]), params)
        self.assertEqual(cls.coords, (-self.alpha[0] / self.alpha[2], -self.alpha[1] / self.alpha[2]))

    def test_exact_forms(self):
        params = self.params
        for g in [RationalFunction.pole(params.z[1]), RationalFunction.pole(params.z[0], 1, 2),
                  RationalFunction.monomial(2)]:
            cls = classical_reduce(nabla(g, params), params)
            self.assertEqual(cls.coords, (ZERO, ZERO))
            self.assertTrue(cls.verify())

    def test_pole_off_marked_points(self):
        with self.assertRaises(ClassViolationError):
            classical_reduce(RationalFunction.pole(Q('7')), self.params)

    def test_gauss_manin(self):
        params = self.params
        a_1 = gauss_manin(params, 1)
        dz = params.z[0] - params.z[1]
        self.assertEqual(a_1[0][1], -self.alpha[0] / dz)
        self.assertEqual(a_1[1][1], self.alpha[0] / dz)
        self.assertEqual(a_1[2][1], ZERO)
        self.assertEqual(a_1[1][0], -self.alpha[1] / dz)

    def test_kz_matrices(self):
        omegas = kz_matrices(self.params)
        self.assertEqual(set(omegas), {(i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i != j})
        for omega in omegas.values():
            self.assertEqual(len(omega), 3)
        a = self.params.a
        self.assertEqual(omegas[(1, 2)], omegas[(2, 1)])
        self.assertEqual(omegas[(1, 2)][0][:2], [a[1], -a[0]])
        self.assertEqual(omegas[(1, 2)][1][:2], [-a[1], a[0]])
        self.assertEqual(omegas[(1, 2)][2], [ZERO, ZERO, ZERO])

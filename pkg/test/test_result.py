from qkz_engines.result import CheckResult, CheckReport, Level, LogValue, compare_logs
from contextlib import redirect_stdout
import cmath
import io
import math
import re

from unittest import TestCase


class ResultTest(TestCase):

    def setUp(self) -> None:
        self.result = CheckResult('test', '', Level.INFO)
        self.result.append(CheckResult('test1', '', Level.INFO))
        sub_result = CheckResult('test2', '')
        self.result.append(sub_result)
        self.result.append(CheckResult('test3', '', Level.ERROR))
        sub_result.append(CheckResult('sub', '', Level.WARNING))

    def test_ok(self):
        self.assertTrue(CheckResult('', '', Level.INFO).ok())
        self.assertTrue(CheckResult('', '', Level.WARNING).ok())
        self.assertFalse(CheckResult('', '', Level.ERROR).ok())

    def test_append(self):
        result = CheckResult('test', '', Level.INFO)
        self.assertEqual(result.level, Level.INFO)
        result.append(CheckResult('test1', '', Level.INFO))
        self.assertEqual(result.level, Level.INFO)
        result.append(CheckResult('test2', '', Level.WARNING))
        self.assertEqual(result.level, Level.WARNING)
        result.append(CheckResult('test2', '', Level.ERROR))
        self.assertEqual(result.level, Level.ERROR)
        self.assertEqual(len(result.sub_results), 3)

    def test_dump(self):
        out = io.StringIO()
        with redirect_stdout(out):
            self.result.dump()
        lines = [re.sub(r'\033\[\d+m', '', line) for line in out.getvalue().splitlines()]
        self.assertEqual(lines, ['test', '   test1', '   test2', '      sub', '   test3'])

    def test_to_json(self):
        j = self.result.to_dict()
        result = CheckResult.from_json(j)
        self.assertEqual(len(self.result.sub_results), len(result.sub_results))
        self.assertEqual(self.result.level, result.level)
        self.assertEqual(self.result.message, result.message)


class LogValueTest(TestCase):

    def test_from_value(self):
        v = LogValue.from_value(-2.0)
        self.assertAlmostEqual(v.log_abs, math.log(2))
        self.assertAlmostEqual(abs(v.arg), math.pi)

    def test_zero(self):
        v = LogValue.from_value(0)
        self.assertEqual(v.log_abs, -math.inf)
        self.assertIsNone(v.to_dict()['log_abs'])
        self.assertEqual(LogValue.from_dict(v.to_dict()).log_abs, -math.inf)

    def test_from_log_wraps_argument(self):
        v = LogValue.from_log(complex(1.0, 3 * math.pi + 0.25))
        self.assertAlmostEqual(v.arg, -math.pi + 0.25)

    def test_compare(self):
        lhs = LogValue.from_value(2.0 + 1e-9)
        rhs = LogValue.from_value(2.0)
        _, rel_err = compare_logs(lhs, rhs)
        self.assertAlmostEqual(rel_err, 5e-10, delta=1e-12)

    def test_compare_modulus_only(self):
        lhs = LogValue.from_value(cmath.exp(1j))
        rhs = LogValue.from_value(1.0)
        _, rel_err = compare_logs(lhs, rhs, modulus_only=True)
        self.assertAlmostEqual(rel_err, 0.0)
        _, rel_err = compare_logs(lhs, rhs)
        self.assertGreater(rel_err, 0.9)

    def test_compare_infinite(self):
        self.assertEqual(compare_logs(LogValue.from_value(0), LogValue.from_value(1)), (math.inf, math.inf))


class CheckReportTest(TestCase):

    def test_compare(self):
        report = CheckReport.compare('x', 2, {}, LogValue(0.0, 0.0), LogValue(1e-9, 0.0), 1e-8)
        self.assertTrue(report.passed)
        report = CheckReport.compare('x', 2, {}, LogValue(0.0, 0.0), LogValue(1e-3, 0.0), 1e-8)
        self.assertFalse(report.passed)

    def test_failure(self):
        report = CheckReport.failure('qdet', 3, {}, ValueError('boom'))
        self.assertFalse(report.passed)
        data = report.to_dict()
        self.assertIsNone(data['rel_err'])
        self.assertEqual(data['error'], 'ValueError: boom')
        self.assertFalse(data['pass'])

    def test_dict(self):
        report = CheckReport('qkz', 2, {'n': 2}, abs_err=1e-9, rel_err=1e-9, tol=1e-6, passed=True,
                             sweep=[{'S': 10, 'rel_err': 0.1}], details={'ell': 1})
        copy = CheckReport.from_dict(report.to_dict())
        self.assertEqual(copy, report)

    def test_to_result(self):
        ok = CheckReport('a', 2, {}, passed=True).to_result()
        self.assertTrue(ok.ok())
        failed = CheckReport.failure('b', 2, {}, ValueError('x')).to_result()
        self.assertFalse(failed.ok())
        self.assertEqual(len(failed.sub_results), 1)

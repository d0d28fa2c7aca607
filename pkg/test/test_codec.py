from qkz_engines import codec
from qkz_engines._exact import GaussianRational, RationalFunction
from qkz_engines.data_types import is_complex_literal, is_exact_scalar, is_param_hash
from qkz_engines.exception import IoError
from qkz_engines.result import CheckReport, LogValue
import io
import json

from unittest import TestCase


def Q(text: str) -> GaussianRational:
    return GaussianRational.parse(text)


class DataTypesTest(TestCase):

    def test_exact(self):
        for s in ['1', '-3/4', '1/2+3i', '-i', '0.25']:
            self.assertTrue(is_exact_scalar(s), s)
        for s in ['', 'x', '1/0', '1.5-2i']:
            self.assertFalse(is_exact_scalar(s), s)

    def test_complex(self):
        self.assertTrue(is_complex_literal('1.5-2i'))
        self.assertFalse(is_complex_literal('1+2'))

    def test_hash(self):
        self.assertTrue(is_param_hash('0123456789ab'))
        self.assertFalse(is_param_hash('0123456789'))
        self.assertFalse(is_param_hash('0123456789xy'))


class RationalCodecTest(TestCase):

    def test_decode(self):
        f = codec.decode_rational({'poly': ['1', '0', '1/2'], 'poles': [{'loc': '1+2i', 'coeffs': ['3', '-i']}]})
        expected = RationalFunction([1, 0, Q('1/2')], {Q('1+2i'): [Q('3'), Q('-i')]})
        self.assertEqual(f, expected)

    def test_encode(self):
        f = RationalFunction([Q('2i')], {Q('1'): [Q('1/3')], Q('-1'): [Q('0'), Q('5')]})
        data = codec.encode_rational(f)
        self.assertEqual(data['poly'], ['0+2i'])
        self.assertEqual([p['loc'] for p in data['poles']], ['-1', '1'])
        self.assertEqual(data['poles'][0]['coeffs'], ['0', '5'])
        self.assertEqual(codec.decode_rational(json.loads(json.dumps(data))), f)

    def test_invalid(self):
        for data in [{'poly': ['1']},
                     {'poly': ['x'], 'poles': []},
                     {'poly': [], 'poles': [{'loc': '1', 'coeffs': []}]},
                     {'poly': [], 'poles': [{'loc': '1', 'coeffs': ['1']}], 'extra': 1},
                     {'poly': [1], 'poles': []}]:
            with self.assertRaises(IoError):
                codec.decode_rational(data)

    def test_duplicate_pole(self):
        data = {'poly': [], 'poles': [{'loc': '1/2', 'coeffs': ['1']}, {'loc': '2/4', 'coeffs': ['1']}]}
        with self.assertRaises(IoError):
            codec.decode_rational(data)

    def test_load(self):
        f = codec.load_rational(io.StringIO('{"poly": ["1"], "poles": [{"loc": "1+13/10i", "coeffs": ["2"]}]}'))
        self.assertEqual(f.residue(Q('1+13/10i')), Q('2'))
        with self.assertRaises(IoError):
            codec.load_rational(io.StringIO('{"poly": '))


class ReportSchemaTest(TestCase):

    def test_valid(self):
        report = CheckReport.compare('qdet', 3, {'z': ['0', '1', '5/2']}, LogValue(1.0, 0.5), LogValue(1.0, 0.5),
                                     1e-6, quadrature={'panels': 10, 'truncation_radius': 40.0, 'est_error': 1e-12})
        result = codec.validate_report(report.to_dict())
        self.assertTrue(result.ok())

    def test_failure_report(self):
        report = CheckReport.failure('qkz', 2, {}, ValueError('boom'))
        self.assertTrue(codec.validate_report(report.to_dict()).ok())

    def test_sweep(self):
        report = CheckReport('limits-weight', 2, {}, abs_err=0.1, rel_err=0.1, tol=1e-10, passed=True,
                             fit={'slope': 1.0, 'slope_ci': 0.01}, sweep=[{'S': 10, 'rel_err': 0.1}])
        self.assertTrue(codec.validate_report(report.to_dict()).ok())

    def test_invalid(self):
        data = CheckReport('qkz', 2, {}, passed=True).to_dict()
        del data['pass']
        self.assertFalse(codec.validate_report(data).ok())
        data = CheckReport('qkz', 2, {}, passed=True).to_dict()
        data['rel_err'] = -1
        self.assertFalse(codec.validate_report(data).ok())
        data = CheckReport('qkz', 2, {}, passed=True, sweep=[{'rel_err': 0.1}]).to_dict()
        self.assertFalse(codec.validate_report(data).ok())

    def test_unknown_schema(self):
        with self.assertRaises(IoError):
            codec.validate({}, 'nothing')

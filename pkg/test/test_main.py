from qkz_engines import version
from qkz_engines.__main__ import main
from qkz_engines._exact import GaussianRational
from qkz_engines.complexfn import format_complex, parse_complex
from qkz_engines.contour import QuadratureSpec
from qkz_engines.homology import IntervalCycle, classical_entry
from qkz_engines.master import ParameterSet, log_phi_p, weight_w
from qkz_engines.reduction import beta_matrix
import io
import json
import tempfile

from unittest import TestCase, mock

PARAMS = ['--z', '0,1', '--a-imag', '13/10,6/5']


def two_points() -> ParameterSet:
    return ParameterSet.from_imaginary(['0', '1'], ['13/10', '6/5'], 1)


def run(*argv):
    with mock.patch('sys.stdout', new_callable=io.StringIO) as out, \
            mock.patch('sys.stderr', new_callable=io.StringIO) as err:
        status = main(['qkz_engines', *argv])
    return status, out.getvalue(), err.getvalue()


class MainTest(TestCase):

    def test_usage(self):
        status, out, _ = run()
        self.assertEqual(status, 1)
        self.assertIn('Available commands', out)
        status, out, _ = run('nothing')
        self.assertEqual(status, 1)
        self.assertIn("Unknown command 'nothing'", out)

    def test_version(self):
        status, out, _ = run('version')
        self.assertEqual(status, 0)
        self.assertEqual(out.strip(), version())

    def test_gamma(self):
        status, out, _ = run('gamma', '--w', '3', '--output', 'json')
        self.assertEqual(status, 0)
        value = parse_complex(json.loads(out)['log_gamma'])
        self.assertAlmostEqual(value.real, 0.6931471805599453)
        self.assertAlmostEqual(value.imag, 0.0)

    def test_lattice(self):
        status, out, _ = run('lattice', 'list', *PARAMS, '--dual', '--depth', '2', '--output', 'json')
        self.assertEqual(status, 0)
        points = json.loads(out)['points']
        self.assertEqual(len(points), 12)
        self.assertEqual({tuple(p['tag'][:2]) for p in points}, {(1, -1), (1, 1), (2, -1), (2, 1)})


    def test_verbs(self):
        for command in ('phi-p', 'phi', 'weights', 'lattice', 'integrate'):
            status, out, _ = run(command)
            self.assertEqual(status, 1)
            self.assertIn(f'Usage: {command}', out)

    def test_phi_p(self):
        status, out, _ = run('phi-p', 'eval', *PARAMS, '--t', '0.5+0.25i', '--output', 'json')
        self.assertEqual(status, 0)
        expected = log_phi_p(parse_complex('0.5+0.25i'), two_points())
        self.assertEqual(json.loads(out)['log_phi_p'], format_complex(expected))

    def test_weights(self):
        status, out, _ = run('weights', 'eval', *PARAMS, '--t', '1/2+3i')
        self.assertEqual(status, 0)
        data = json.loads(out)
        self.assertEqual(len(data['b']), 2)
        self.assertEqual(data['w'][0], str(weight_w(1, GaussianRational.parse('1/2+3i'), two_points())))

    def test_integrate(self):
        params = two_points()
        status, out, _ = run('integrate', 'classical', *PARAMS, '--m', '1', '--ell', '2')
        self.assertEqual(status, 0)
        expected = classical_entry(params, IntervalCycle(1), 2, QuadratureSpec(rel_tol=1e-9))
        self.assertEqual(json.loads(out)['log_value'], format_complex(expected.log_value))
        status, out, _ = run('integrate', 'theta-entry', *PARAMS, '--m', '1', '--j', '1')
        self.assertEqual(status, 0)
        self.assertIn('panels', json.loads(out))

    def test_theta_json(self):
        status, out, _ = run('theta', *PARAMS, '--json')
        self.assertEqual(status, 0)
        data = json.loads(out)
        self.assertEqual(len(data['values']), 1)
        self.assertIn('est_error', data['quadrature'])

    def test_beta(self):
        status, out, _ = run('beta', *PARAMS, '--ell', '1')
        self.assertEqual(status, 0)
        params = ParameterSet.from_imaginary(['0', '1'], ['13/10', '6/5'], 1)
        expected = beta_matrix(params, 1).entries
        self.assertEqual(json.loads(out)['beta'], [[str(v) for v in row] for row in expected])

    def test_reduce(self):
        with tempfile.NamedTemporaryFile('w', suffix='.json') as f:
            json.dump({'poly': ['1'], 'poles': []}, f)
            f.flush()
            status, out, _ = run('reduce', '--input', f.name, *PARAMS)
        self.assertEqual(status, 0)
        data = json.loads(out)
        self.assertEqual(len(data['coords']), 1)
        self.assertIn('poly', data['certificate'])

    def test_verify(self):
        status, out, _ = run('verify', 'flatness', '--z', '0,1,5/2', '--a-imag', '13/10,6/5,27/20',
                             '--output', 'json')
        self.assertEqual(status, 0)
        self.assertTrue(json.loads(out)['pass'])
        status, out, _ = run('verify')
        self.assertEqual(status, 1)
        self.assertIn('Usage: verify', out)

    def test_errors_exit_with_two(self):
        status, _, err = run('verify', 'qkz', '--z', '0,1', '--a-imag', '13/10,6/5', '--p-imag', '-1')
        self.assertEqual(status, 2)
        self.assertIn('DomainError', err)
        status, _, err = run('beta', '--z', '0,x', '--a-imag', '13/10,6/5', '--ell', '1')
        self.assertEqual(status, 2)
        self.assertIn('ConfigError', err)

import argparse
import json
import logging
import sys
from enum import Enum
from typing import Optional

import numpy as np

from qkz_engines import codec, homology, master, qkz, reduction, suite, version
from qkz_engines._exact import GaussianRational
from qkz_engines._suite.parse_util import parse_list
from qkz_engines._suite.run import base_configurations
from qkz_engines._suite.runconf import load_config
from qkz_engines.complexfn import format_complex, log_gamma, log_gamma_high_precision, log_gamma_stirling, \
    parse_complex
from qkz_engines.contour import QuadratureSpec
from qkz_engines.exception import ConfigError, QkzException
from qkz_engines.result import CheckReport


class OutputFormats(Enum):
    TEXT = 'text'
    JSON = 'json'

    def __str__(self):
        return self.value


def _parser(description: str, params: bool = True) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument('--verbose', '-v',
                        action='count',
                        default=0,
                        help='log progress (twice for debug output)')
    parser.add_argument('--output',
                        type=OutputFormats,
                        default=OutputFormats.TEXT,
                        choices=list(OutputFormats))
    if params:
        parser.add_argument('--z',
                            type=str,
                            required=True,
                            help='comma separated points, e.g. 0,1,5/2')
        parser.add_argument('--a-imag',
                            type=str,
                            required=True,
                            help='imaginary parts of the weights a_l')
        parser.add_argument('--p-imag',
                            type=str,
                            default='1',
                            help='imaginary part of the step p')
        parser.add_argument('--kappa',
                            type=str,
                            default=None,
                            help='classical step, p/2 if omitted')
        parser.add_argument('--rel-tol',
                            type=float,
                            default=1e-9)
        parser.add_argument('--workers',
                            type=int,
                            default=1)
    return parser


def _parse(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    return args


def _params(args) -> master.ParameterSet:
    z = parse_list(args.z, GaussianRational.coerce, '--z')
    a_imag = parse_list(args.a_imag, GaussianRational.coerce, '--a-imag')
    try:
        kappa = None if args.kappa is None else GaussianRational.parse(args.kappa)
        p_imag = GaussianRational.parse(args.p_imag)
    except ValueError as e:
        raise ConfigError(str(e))
    return master.ParameterSet.from_imaginary(z, a_imag, p_imag, kappa)


def _spec(args) -> QuadratureSpec:
    return QuadratureSpec(rel_tol=args.rel_tol)


def _emit(args, data: dict, text: str = None):
    if args.output == OutputFormats.JSON or text is None:
        print(json.dumps(data, indent=2))
    else:
        print(text)


def _emit_report(args, report: CheckReport):
    if args.output == OutputFormats.JSON:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        report.to_result().dump()
    return report.passed


def _matrix(entries) -> list:
    return [[str(v) for v in row] for row in entries]


def _verb(command: str, argv, verbs) -> Optional[str]:
    if not argv or argv[0] not in verbs:
        print(f"Usage: {command} {{{','.join(verbs)}}} OPTIONS...")
        return None
    return argv[0]


def run_gamma(argv):
    parser = _parser('Evaluates log Gamma on the principal branch', params=False)
    parser.add_argument('--w', type=str, required=True, help='complex argument, e.g. 1.5-2i')
    parser.add_argument('--method', choices=['default', 'stirling', 'mpmath'], default='default')
    args = _parse(parser, argv)
    w = parse_complex(args.w)
    if args.method == 'stirling':
        value = complex(log_gamma_stirling(w))
    elif args.method == 'mpmath':
        value = log_gamma_high_precision(w)
    else:
        value = complex(log_gamma(w))
    _emit(args, {'w': format_complex(w), 'log_gamma': format_complex(value)}, format_complex(value))


def run_phi_p(argv):
    if _verb('phi-p', argv, ['eval']) is None:
        return False
    parser = _parser('Evaluates log Phi_p at a point')
    parser.add_argument('--t', type=str, required=True)
    args = _parse(parser, argv[1:])
    value = master.log_phi_p(parse_complex(args.t), _params(args))
    _emit(args, {'t': args.t, 'log_phi_p': format_complex(value)}, format_complex(value))


def run_phi(argv):
    if _verb('phi', argv, ['eval']) is None:
        return False
    parser = _parser('Evaluates log Phi at a real point under the fixed branch convention')
    parser.add_argument('--t', type=float, required=True)
    parser.add_argument('--m', type=int, default=None, help='interval the point is taken from')
    args = _parse(parser, argv[1:])
    value = master.log_phi_classical(args.t, _params(args), args.m)
    _emit(args, {'t': args.t, 'log_phi': format_complex(value)}, format_complex(value))


def run_weights(argv):
    if _verb('weights', argv, ['eval']) is None:
        return False
    parser = _parser('Evaluates b0, b_l and w_j at a point')
    parser.add_argument('--t', type=str, required=True, help='exact scalar such as 1/2+3i')
    args = _parse(parser, argv[1:])
    params = _params(args)
    t = GaussianRational.parse(args.t)
    data = {
        'b0': str(master.b0(t, params)),
        'b': [str(master.b_ell(t, params, ell)) for ell in range(1, params.n + 1)],
        'w': [str(master.weight_w(j, t, params)) for j in range(1, params.n + 1)],
    }
    _emit(args, data)


def run_lattice(argv):
    if _verb('lattice', argv, ['list']) is None:
        return False
    parser = _parser('Lists lattice points with their (l, sign, N) tags')
    parser.add_argument('--dual', action='store_true')
    parser.add_argument('--depth', type=int, default=4)
    args = _parse(parser, argv[1:])
    lattice = master.singular_lattice(_params(args), args.dual, args.depth)
    points = [{'loc': str(pt.loc), 'tag': list(pt.tag)} for pt in lattice.points]
    _emit(args, {'points': points}, "\n".join(f"{p['loc']:>24}  {tuple(p['tag'])}" for p in points))


def run_integrate(argv):
    kind = _verb('integrate', argv, ['theta-entry', 'classical'])
    if kind is None:
        return False
    if kind == 'theta-entry':
        parser = _parser('Pairs [G_m] with w_j by quadrature along the real line')
        parser.add_argument('--j', type=int, required=True)
    else:
        parser = _parser('Integrates Phi dt/(t - z_ell) over [z_m, z_{m+1}]')
        parser.add_argument('--ell', type=int, required=True)
    parser.add_argument('--m', type=int, required=True)
    args = _parse(parser, argv[1:])
    params = _params(args)
    if kind == 'theta-entry':
        result = homology.pair(params, args.m, homology.weight_factor(params, args.j), _spec(args))
    else:
        result = homology.classical_entry(params, homology.IntervalCycle(args.m), args.ell, _spec(args))
    data = {'log_value': format_complex(result.log_value), **result.to_dict()}
    _emit(args, data)


def run_reduce(argv):
    parser = _parser('Reduces a rational function modulo D_p-exact forms')
    parser.add_argument('--input',
                        type=argparse.FileType('r'),
                        required=True,
                        help='JSON rational function')
    args = _parse(parser, argv)
    cls = reduction.reduce(codec.load_rational(args.input), _params(args))
    _emit(args, {'coords': [str(c) for c in cls.coords], 'certificate': codec.encode_rational(cls.certificate)})


def run_beta(argv):
    parser = _parser('Exact connection matrix beta_l')
    parser.add_argument('--ell', type=int, required=True)
    args = _parse(parser, argv)
    beta = reduction.beta_matrix(_params(args), args.ell, args.workers)
    _emit(args, {'ell': args.ell, 'beta': _matrix(beta.entries)})


def run_theta(argv):
    parser = _parser('Solution matrix Theta by quadrature')
    parser.add_argument('--json', action='store_true', help='same as --output json')
    args = _parse(parser, argv)
    if args.json:
        args.output = OutputFormats.JSON
    matrix = homology.theta(_params(args), _spec(args), args.workers)
    values = [[format_complex(v) for v in row] for row in matrix.values]
    data = {
        'values': values,
        'row_log_scales': [float(s) for s in matrix.row_log_scales],
        'quadrature': matrix.quadrature(),
    }
    text = "\n".join(f"exp({s:.6g}) * [{', '.join(row)}]" for s, row in zip(data['row_log_scales'], values))
    _emit(args, data, text)


def run_verify(argv):
    check = _verb('verify', argv, ['qdet', 'classical-det', 'barnes', 'qkz', 'flatness'])
    if check is None:
        return False
    argv = argv[1:]
    if check == 'barnes':
        parser = _parser('Barnes integral against its gamma closed form', params=False)
        parser.add_argument('--abcd', type=str, default='1/2,1/2,1/2,1/2')
        parser.add_argument('--rel-tol', type=float, default=1e-9)
        args = _parse(parser, argv)
        values = [complex(v) for v in parse_list(args.abcd, GaussianRational.coerce, '--abcd')]
        return _emit_report(args, homology.barnes_check(*values, spec=_spec(args)))
    parser = _parser(f'Runs the {check} check')
    if check == 'qkz':
        parser.add_argument('--ell', type=str, default='all')
    args = _parse(parser, argv)
    params = _params(args)
    if check == 'qdet':
        report = homology.qdet_check(params, _spec(args), workers=args.workers)
    elif check == 'classical-det':
        report = homology.classical_det_check(params, _spec(args))
    elif check == 'qkz':
        ells = None if args.ell == 'all' else parse_list(args.ell, int, '--ell')
        report = qkz.verify_qkz(params, _spec(args), ells, workers=args.workers)
    else:
        report = qkz.flatness_check(params, args.workers)
    return _emit_report(args, report)


def run_limits(argv):
    kind = _verb('limits', argv, ['kz', 'gm', 'scalar', 'weight'])
    if kind is None:
        return False
    argv = argv[1:]
    parser = _parser(f'Continuum limit sweep ({kind})')
    parser.add_argument('--s', type=str, default=','.join(map(str, qkz.DEFAULT_SCALES)))
    parser.add_argument('--m', type=int, default=1)
    parser.add_argument('--ell', type=int, default=1)
    parser.add_argument('--ellp', type=int, default=2)
    parser.add_argument('--base', type=str, action='append', default=[],
                        help='additional base configuration Z for the kz fit (repeatable)')
    args = _parse(parser, argv)
    params = _params(args)
    scales = parse_list(args.s, int, '--s')
    if kind == 'kz':
        bases = [params.z] + [tuple(parse_list(b, GaussianRational.coerce, '--base')) for b in args.base]
        if len(bases) < 3:
            bases = bases + base_configurations(params)[len(bases):]
        report = qkz.kz_limit_fit([qkz.LimitSweep(b, scales) for b in bases], params, workers=args.workers)
    elif kind == 'gm':
        report = qkz.gm_limit_check(qkz.LimitSweep(params.z, scales), params, args.m, args.ell, args.ellp,
                                    _spec(args), workers=args.workers)
    elif kind == 'scalar':
        report = qkz.scalar_limit_check(params.a_c[args.ell - 1], params.p_c, scales)
    else:
        z = params.z_c.real
        grid = np.concatenate([[z[0] - 1], (z[1:] + z[:-1]) / 2, [z[-1] + 1]])
        report = qkz.weight_limit_check(qkz.LimitSweep(params.z, scales), params, args.ell, grid)
    return _emit_report(args, report)


def run_version(argv):
    print(version())


def run_suite(argv):
    parser = _parser('Runs the checks selected in a YAML configuration', params=False)
    parser.add_argument('config',
                        type=argparse.FileType('r'),
                        help='YAML run configuration')
    parser.add_argument('--csv',
                        type=str,
                        default=None,
                        help='directory for per-check CSV tables')
    args = _parse(parser, argv)
    bundle = suite.run_suite(load_config(args.config))
    if args.csv:
        suite.emit_csv(bundle, args.csv)
    if args.output == OutputFormats.JSON:
        print(json.dumps([r.to_dict() for r in bundle.reports], indent=2))
    else:
        bundle.to_result().dump()
    return bundle.passed()


commands = {
    'gamma': run_gamma,
    'phi-p': run_phi_p,
    'phi': run_phi,
    'weights': run_weights,
    'lattice': run_lattice,
    'integrate': run_integrate,
    'reduce': run_reduce,
    'beta': run_beta,
    'theta': run_theta,
    'verify': run_verify,
    'limits': run_limits,
    'suite': run_suite,
    'version': run_version,
}


def main(argv=None):
    argv = sys.argv if argv is None else argv
    if len(argv) <= 1:
        print(f"Usage: {argv[0]} COMMAND OPTIONS...")
        print("Available commands:")
        print("  gamma      log Gamma on the principal branch")
        print("  phi-p      eval: log of the p-deformed master function")
        print("  phi        eval: log of the classical master function")
        print("  weights    eval: coefficient and weight functions at an exact point")
        print("  lattice    list: singular and dual lattices")
        print("  integrate  theta-entry, classical: pairings with periodic and interval cycles")
        print("  reduce     reduction of a rational function to the w-basis")
        print("  beta       exact connection matrices")
        print("  theta      solution matrix by quadrature")
        print("  verify     qdet, classical-det, barnes, qkz, flatness")
        print("  limits     kz, gm, scalar, weight")
        print("  suite      run a YAML configured suite")
        print("  version    package version")
        return 1

    command = argv[1]
    if command not in commands:
        print(f"Unknown command '{command}', must be one of {', '.join(commands)}")
        return 1
    try:
        ok = commands[command](argv[2:])
    except QkzException as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2
    return 0 if ok is None or ok else 1


if __name__ == '__main__':
    sys.exit(main())

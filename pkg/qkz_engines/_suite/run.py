from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List
import logging

import numpy as np

from .._exact import GaussianRational, RationalFunction
from ..contour import QuadratureSpec
from ..exception import QkzException
from ..homology import barnes_check, classical_det_check, qdet_check
from ..master import LatticeKind, ParameterSet, SingularLattice, weight_rational
from ..qkz import (LimitSweep, flatness_check, gm_limit_check, kz_limit_fit, scalar_limit_check, verify_qkz,
                   weight_limit_check)
from ..reduction import apply_Dp, reduce
from ..result import CheckReport

logger = logging.getLogger(__name__)

BARNES_CASES = [
    ('1/2', '1/2', '1/2', '1/2'),
    ('1', '1', '1', '1'),
    ('3/10', '7/10', '6/5', '1/2'),
    ('1+1/2i', '4/5', '3/5-1/5i', '11/10'),
    ('2', '1/2', '3/2', '1/4'),
]

ROUNDTRIP_SAMPLES = 100


@dataclass
class ExecConf:
    params: ParameterSet
    spec: QuadratureSpec
    rng: np.random.Generator
    workers: int = 1
    scales: tuple = (10, 20, 40, 80)


def _random_scalar(rng: np.random.Generator) -> GaussianRational:
    re = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
    im = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
    return GaussianRational(re, im)


def random_element(params: ParameterSet, rng: np.random.Generator, depth: int = 3) -> RationalFunction:
    """A random member of F(z): simple poles on the dual lattice plus a polynomial part."""
    poles = {}
    for _ in range(int(rng.integers(1, 5))):
        ell = int(rng.integers(1, params.n + 1))
        sign = int(rng.choice([-1, 1]))
        loc = SingularLattice.generator(params, LatticeKind.DUAL, ell, sign, int(rng.integers(0, depth + 1)))
        poles[loc] = [_random_scalar(rng)]
    poly = [_random_scalar(rng) for _ in range(int(rng.integers(0, 3)))]
    return RationalFunction(poly, poles)


def random_preimage(params: ParameterSet, rng: np.random.Generator, depth: int = 3) -> RationalFunction:
    """A random g whose image under D_p stays in F(z)."""
    poles = {}
    for _ in range(int(rng.integers(1, 4))):
        ell = int(rng.integers(1, params.n + 1))
        if rng.integers(0, 2):
            loc = SingularLattice.generator(params, LatticeKind.DUAL, ell, -1, int(rng.integers(0, depth + 1)))
        else:
            loc = SingularLattice.generator(params, LatticeKind.DUAL, ell, 1, int(rng.integers(1, depth + 1)))
        poles[loc] = [_random_scalar(rng)]
    poly = [_random_scalar(rng) for _ in range(int(rng.integers(0, 3)))]
    return RationalFunction(poly, poles)


def _guarded(check: str, conf: ExecConf, fn: Callable[[], List[CheckReport]]) -> List[CheckReport]:
    try:
        return fn()
    except QkzException as e:
        logger.warning("check %s failed: %s", check, e)
        return [CheckReport.failure(check, conf.params.n, conf.params.to_dict(), e)]
    except Exception as e:
        logger.exception("check %s raised %s", check, type(e).__name__)
        return [CheckReport.failure(check, conf.params.n, conf.params.to_dict(), e)]


def run_qdet(conf: ExecConf) -> List[CheckReport]:
    return _guarded('qdet', conf, lambda: [qdet_check(conf.params, conf.spec, workers=conf.workers)])


def run_classical_det(conf: ExecConf) -> List[CheckReport]:
    return _guarded('classical-det', conf, lambda: [classical_det_check(conf.params, conf.spec)])


def run_barnes(conf: ExecConf) -> List[CheckReport]:
    reports = []
    for case in BARNES_CASES:
        values = [complex(GaussianRational.parse(v)) for v in case]
        reports.extend(_guarded('barnes', conf, lambda: [barnes_check(*values, spec=conf.spec)]))
    return reports


def run_qkz(conf: ExecConf) -> List[CheckReport]:
    return _guarded('qkz', conf, lambda: [verify_qkz(conf.params, conf.spec, workers=conf.workers)])


def run_flatness(conf: ExecConf) -> List[CheckReport]:
    return _guarded('flatness', conf, lambda: [flatness_check(conf.params, conf.workers)])


def base_configurations(params: ParameterSet) -> List[tuple]:
    """The configured points and two deformations of their shape.

    The third one adds k^2/5 to the k-th point, so it is not an affine image
    of evenly spaced points.
    """
    z = list(params.z)
    spread = list(z)
    spread[-1] = spread[-1] + Fraction(1, 2)
    bent = [v + Fraction(k * k, 5) for k, v in enumerate(z)]
    return [tuple(z), tuple(spread), tuple(bent)]


def _limit_reports(conf: ExecConf) -> List[CheckReport]:
    params = conf.params
    reports = []
    configurations = base_configurations(params)
    if params.n >= 2:
        sweeps = [LimitSweep(base, conf.scales) for base in configurations]
        reports.append(kz_limit_fit(sweeps, params, workers=conf.workers))
        gm_sweep = LimitSweep(configurations[0], conf.scales)
        reports.append(gm_limit_check(gm_sweep, params, 1, 1, 2, conf.spec, workers=conf.workers))
    z = [float(v.re) for v in params.z]
    grid = [z[0] - 1] + [(x + y) / 2 for x, y in zip(z, z[1:])] + [z[-1] + 1]
    for j in range(1, params.n + 1):
        reports.append(weight_limit_check(LimitSweep(configurations[0], conf.scales), params, j, grid))
    reports.append(scalar_limit_check(params.a_c[0], params.p_c, conf.scales))
    return reports


def run_limits(conf: ExecConf) -> List[CheckReport]:
    return _guarded('limits', conf, lambda: _limit_reports(conf))


def _roundtrip(conf: ExecConf) -> List[CheckReport]:
    params = conf.params
    failures = []
    for k in range(params.n + 3):
        f = random_element(params, conf.rng)
        if not reduce(f, params).verify():
            failures.append(f"certificate of sample {k} does not verify")
    for k in range(ROUNDTRIP_SAMPLES):
        image = apply_Dp(random_preimage(params, conf.rng), params)
        cls = reduce(image, params)
        if any(cls.coords):
            failures.append(f"exact image {k} reduced to nonzero coordinates")
    for j in range(1, params.n):
        coords = reduce(weight_rational(params, j), params).coords
        if any(c != (1 if i == j - 1 else 0) for i, c in enumerate(coords)):
            failures.append(f"w_{j} is not a basis vector")
    rel_err = float(len(failures))
    report = CheckReport('reduction-roundtrip', params.n, params.to_dict(), abs_err=rel_err, rel_err=rel_err,
                         tol=0.0, passed=not failures,
                         details={'samples': params.n + 3 + ROUNDTRIP_SAMPLES, 'failures': failures})
    return [report]


def run_reduction_roundtrip(conf: ExecConf) -> List[CheckReport]:
    return _guarded('reduction-roundtrip', conf, lambda: _roundtrip(conf))


runners: Dict[str, Callable[[ExecConf], List[CheckReport]]] = {
    'qdet': run_qdet,
    'classical-det': run_classical_det,
    'barnes': run_barnes,
    'qkz': run_qkz,
    'flatness': run_flatness,
    'limits': run_limits,
    'reduction-roundtrip': run_reduction_roundtrip,
}

from dataclasses import dataclass, field
from typing import Any, List, Optional, TextIO
import os

import numpy as np
import yaml

from .._exact import GaussianRational
from ..contour import QuadratureSpec
from ..exception import ConfigError
from ..master import ParameterSet
from ..qkz import DEFAULT_SCALES
from .parse_util import assert_type, list_lookup, safe_dict_lookup

SEED_VARIABLE = 'QKZ_SEED'

CHECKS = ['qdet', 'classical-det', 'barnes', 'qkz', 'flatness', 'limits', 'reduction-roundtrip']


def _exact(value: Any) -> GaussianRational:
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers")
    return GaussianRational.coerce(value)


def _number(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"expected a number, got {type(value).__name__}")
    return value


def _scalar_or_none(data: dict, key: str, json_path: str) -> Optional[GaussianRational]:
    if key not in data or data[key] is None:
        return None
    try:
        return _exact(data[key])
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ConfigError(f"Invalid value at {json_path}.{key}: {e}")


@dataclass
class ParameterBlock:
    """Parameters of the integration domain; missing points and weights are sampled from the seed."""
    n: int
    z: Optional[List[GaussianRational]] = None
    a_imag: Optional[List[GaussianRational]] = None
    p_imag: GaussianRational = GaussianRational(1)
    kappa: Optional[GaussianRational] = None

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("Expected n >= 1 at $.n")
        for key in ('z', 'a_imag'):
            value = getattr(self, key)
            if value is not None and len(value) != self.n:
                raise ConfigError(f"Expected {self.n} entries at $.{key}, got {len(value)}")
        if self.p_imag.im != 0 or self.p_imag.re <= 0:
            raise ConfigError("Expected a positive real number at $.p_imag")

    def to_params(self, rng: np.random.Generator) -> ParameterSet:
        z = self.z if self.z is not None else sample_points(self.n, rng)
        a_imag = self.a_imag if self.a_imag is not None else sample_weights(self.n, self.p_imag, rng)
        return ParameterSet.from_imaginary(z, a_imag, self.p_imag, self.kappa)

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'z': None if self.z is None else [str(v) for v in self.z],
            'a_imag': None if self.a_imag is None else [str(v) for v in self.a_imag],
            'p_imag': str(self.p_imag),
            'kappa': None if self.kappa is None else str(self.kappa),
        }

    @classmethod
    def from_dict(cls, data: dict, json_path: str) -> "ParameterBlock":
        z = list_lookup(data, 'z', _exact, json_path, default=None)
        a_imag = list_lookup(data, 'a_imag', _exact, json_path, default=None)
        n = data.get('n', len(z) if z is not None else 2)
        p_imag = _scalar_or_none(data, 'p_imag', json_path)
        return cls(
            n=assert_type(n, int, json_path + '.n'),
            z=z,
            a_imag=a_imag,
            p_imag=GaussianRational(1) if p_imag is None else p_imag,
            kappa=_scalar_or_none(data, 'kappa', json_path),
        )


def sample_points(n: int, rng: np.random.Generator) -> List[GaussianRational]:
    """Strictly increasing rationals with spacing at least 1/2."""
    steps = rng.integers(2, 7, size=n)
    points, current = [], GaussianRational(0)
    for s in steps:
        current = current + GaussianRational.coerce(f"{int(s)}/4")
        points.append(current)
    return points


def sample_weights(n: int, p_imag: GaussianRational, rng: np.random.Generator) -> List[GaussianRational]:
    """Weights with P < Im a < 2P away from half-integer multiples of P."""
    return [p_imag * GaussianRational.coerce(f"{int(k)}/40") for k in rng.integers(42, 59, size=n)]


@dataclass
class QuadratureBlock:
    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    eps_trunc: float = 1e-14
    r_max: float = 1e5
    max_panels: int = 20000

    def to_spec(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_panels=self.max_panels,
                              eps_trunc=self.eps_trunc, r_max=self.r_max)

    def to_dict(self) -> dict:
        return {
            'rel_tol': self.rel_tol,
            'abs_tol': self.abs_tol,
            'eps_trunc': self.eps_trunc,
            'r_max': self.r_max,
            'max_panels': self.max_panels,
        }

    @classmethod
    def from_dict(cls, data: dict, json_path: str) -> "QuadratureBlock":
        def number(key, default):
            if key not in data:
                return default
            try:
                return _number(data[key])
            except TypeError as e:
                raise ConfigError(f"Invalid value at {json_path}.{key}: {e}")
        block = cls(
            rel_tol=number('rel_tol', 1e-9),
            abs_tol=number('abs_tol', 0.0),
            eps_trunc=number('eps_trunc', 1e-14),
            r_max=number('r_max', 1e5),
            max_panels=safe_dict_lookup(data, 'max_panels', int, json_path, default=20000),
        )
        block.to_spec()
        return block


@dataclass
class RunConfig:
    parameters: ParameterBlock
    quadrature: QuadratureBlock = field(default_factory=QuadratureBlock)
    suite: List[str] = field(default_factory=list)
    output: Optional[str] = None
    seed: int = 0
    workers: int = 1
    scales: List[int] = field(default_factory=lambda: list(DEFAULT_SCALES))

    def __post_init__(self):
        unknown = [c for c in self.suite if c not in CHECKS]
        if unknown:
            raise ConfigError(f"Unknown checks {unknown} at $.suite, must be in {CHECKS}")
        if self.workers < 1:
            raise ConfigError("Expected workers >= 1 at $.workers")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def to_dict(self) -> dict:
        return {
            **self.parameters.to_dict(),
            **self.quadrature.to_dict(),
            'suite': list(self.suite),
            'output': self.output,
            'seed': self.seed,
            'workers': self.workers,
            'scales': list(self.scales),
        }

    @classmethod
    def from_dict(cls, data: Any, json_path: str = '$') -> "RunConfig":
        assert_type(data, dict, json_path)
        seed = safe_dict_lookup(data, 'seed', int, json_path, default=0)
        if SEED_VARIABLE in os.environ:
            try:
                seed = int(os.environ[SEED_VARIABLE])
            except ValueError:
                raise ConfigError(f"{SEED_VARIABLE} must be an integer, got {os.environ[SEED_VARIABLE]!r}")
        return cls(
            parameters=ParameterBlock.from_dict(data, json_path),
            quadrature=QuadratureBlock.from_dict(data, json_path),
            suite=list_lookup(data, 'suite', str, json_path, default=[]),
            output=safe_dict_lookup(data, 'output', str, json_path, default=None),
            seed=seed,
            workers=safe_dict_lookup(data, 'workers', int, json_path, default=1),
            scales=list_lookup(data, 'scales', int, json_path, default=list(DEFAULT_SCALES)),
        )


def load_config(file: TextIO) -> RunConfig:
    try:
        data = yaml.safe_load(file)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML: {e}")
    return RunConfig.from_dict(data if data is not None else {})

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional
import cmath
import math


class Level(Enum):
    INFO = 0
    WARNING = 1
    ERROR = 2

    def __or__(self, other: "Level") -> "Level":
        return Level(max(self.value, other.value))

    def color(self) -> str:
        if self.value == 0:
            return '\033[92m'
        if self.value == 1:
            return '\033[93m'
        if self.value == 2:
            return '\033[91m'
        return '\033[94m'


class CheckResult:
    """Console-facing tree of check outcomes; levels propagate to parents."""

    def __init__(self, message: str, path_fragment: str = '', level=Level.INFO):
        self.message = message
        self.path_fragment = path_fragment
        self.level = level
        self.sub_results: List[CheckResult] = []

    def append(self, result: "CheckResult"):
        self.sub_results.append(result)
        self.level = self.level | result.level

    def ok(self) -> bool:
        return self.level != Level.ERROR

    def dump(self, indent=0):
        """Outputs the result to console"""
        ENDC = '\033[0m'
        print("   " * indent + self.level.color() + self.message + ENDC)
        for sub_result in self.sub_results:
            sub_result.dump(indent + 1)

    def to_dict(self):
        return {
            'm': self.message,
            'f': self.path_fragment,
            'l': self.level.value,
            's': [i.to_dict() for i in self.sub_results]
        }

    @classmethod
    def from_json(cls, data: dict) -> "CheckResult":
        v = cls(data['m'], data['f'], Level(data['l']))
        for i in data['s']:
            v.append(cls.from_json(i))
        return v


@dataclass
class LogValue:
    """A complex number as (log|x|, arg x)."""
    log_abs: float
    arg: float

    @classmethod
    def from_log(cls, value: complex) -> "LogValue":
        value = complex(value)
        return cls(value.real, math.remainder(value.imag, 2 * math.pi))

    @classmethod
    def from_value(cls, value: complex) -> "LogValue":
        if value == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(value)), cmath.phase(value))

    def to_dict(self) -> dict:
        return {'log_abs': self.log_abs if math.isfinite(self.log_abs) else None, 'arg': self.arg}

    @classmethod
    def from_dict(cls, data: dict) -> "LogValue":
        log_abs = data['log_abs']
        return cls(-math.inf if log_abs is None else log_abs, data['arg'])


def compare_logs(lhs: LogValue, rhs: LogValue, modulus_only: bool = False):
    """(abs_err, rel_err) of lhs against rhs, both taken in log form."""
    if not (math.isfinite(lhs.log_abs) and math.isfinite(rhs.log_abs)):
        return math.inf, math.inf
    d_abs = lhs.log_abs - rhs.log_abs
    d_arg = 0.0 if modulus_only else math.remainder(lhs.arg - rhs.arg, 2 * math.pi)
    rel_err = abs(cmath.exp(complex(d_abs, d_arg)) - 1)
    return abs(complex(d_abs, d_arg)), rel_err


@dataclass
class CheckReport:
    check: str
    n: int
    params: Dict[str, Any]
    lhs: Optional[LogValue] = None
    rhs: Optional[LogValue] = None
    abs_err: float = 0.0
    rel_err: float = 0.0
    tol: float = 0.0
    passed: bool = False
    quadrature: Optional[Dict[str, Any]] = None
    fit: Optional[Dict[str, Any]] = None
    sweep: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    @classmethod
    def compare(cls, check: str, n: int, params: dict, lhs: LogValue, rhs: LogValue, tol: float,
                modulus_only: bool = False, **kwargs) -> "CheckReport":
        abs_err, rel_err = compare_logs(lhs, rhs, modulus_only)
        return cls(check, n, params, lhs, rhs, abs_err, rel_err, tol, rel_err <= tol, **kwargs)

    @classmethod
    def failure(cls, check: str, n: int, params: dict, error: Exception, tol: float = 0.0) -> "CheckReport":
        return cls(check, n, params, tol=tol, passed=False, abs_err=math.inf, rel_err=math.inf,
                   error=f"{type(error).__name__}: {error}")

    def to_dict(self) -> dict:
        data = {
            'check': self.check,
            'n': self.n,
            'params': self.params,
            'lhs': self.lhs.to_dict() if self.lhs else None,
            'rhs': self.rhs.to_dict() if self.rhs else None,
            'abs_err': _finite(self.abs_err),
            'rel_err': _finite(self.rel_err),
            'tol': self.tol,
            'pass': self.passed,
            'quadrature': self.quadrature,
        }
        if self.fit is not None:
            data['fit'] = self.fit
        if self.sweep:
            data['sweep'] = self.sweep
        if self.details:
            data['details'] = self.details
        if self.error is not None:
            data['error'] = self.error
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "CheckReport":
        return cls(
            check=data['check'],
            n=data['n'],
            params=data['params'],
            lhs=LogValue.from_dict(data['lhs']) if data.get('lhs') else None,
            rhs=LogValue.from_dict(data['rhs']) if data.get('rhs') else None,
            abs_err=_infinite(data['abs_err']),
            rel_err=_infinite(data['rel_err']),
            tol=data['tol'],
            passed=data['pass'],
            quadrature=data.get('quadrature'),
            fit=data.get('fit'),
            sweep=data.get('sweep', []),
            details=data.get('details', {}),
            error=data.get('error'),
        )

    def to_result(self) -> CheckResult:
        level = Level.INFO if self.passed else Level.ERROR
        result = CheckResult(f"{self.check} (n={self.n}): rel_err={self.rel_err:.3e}, tol={self.tol:.1e}",
                             self.check, level)
        if self.error:
            result.append(CheckResult(self.error, level=Level.ERROR))
        for row in self.sweep:
            ok = row.get('pass', True)
            result.append(CheckResult(", ".join(f"{k}={v}" for k, v in row.items()),
                                      level=Level.INFO if ok else Level.WARNING))
        return result


def _finite(value: float):
    """JSON has no infinity; unbounded errors are written as null."""
    return value if math.isfinite(value) else None


def _infinite(value) -> float:
    return math.inf if value is None else value

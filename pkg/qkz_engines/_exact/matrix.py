from typing import List, Sequence

import numpy as np
from sympy import QQ_I
from sympy.polys.matrices import DomainMatrix

from .gaussian import GaussianRational, ZERO, ONE

Matrix = List[List[GaussianRational]]


def coerce(rows: Sequence[Sequence]) -> Matrix:
    return [[GaussianRational.coerce(v) for v in row] for row in rows]


def to_domain(a: Matrix) -> DomainMatrix:
    columns = len(a[0]) if a else 0
    return DomainMatrix([[x.value for x in row] for row in a], (len(a), columns), QQ_I)


def from_domain(m: DomainMatrix) -> Matrix:
    return [[GaussianRational.from_domain(x) for x in row] for row in m.to_list()]


def identity(size: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(size)] for i in range(size)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a and len(a[0]) != len(b):
        raise ValueError(f"Cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0]) if b else 0}")
    return from_domain(to_domain(a).matmul(to_domain(b)))


def subtract(a: Matrix, b: Matrix) -> Matrix:
    return from_domain(to_domain(a) - to_domain(b))


def scale(a: Matrix, s) -> Matrix:
    s = GaussianRational.coerce(s)
    return [[s * x for x in row] for row in a]


def determinant(a: Matrix) -> GaussianRational:
    """Exact determinant over Q(i)."""
    if not a:
        return ONE
    return GaussianRational.from_domain(to_domain(a).det())


def first_nonzero(a: Matrix):
    """(row, col, value) of the first nonzero entry, or None."""
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            if x:
                return i, j, x
    return None


def to_complex(a: Matrix) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in a], dtype=complex).reshape(len(a), len(a[0]) if a else 0)

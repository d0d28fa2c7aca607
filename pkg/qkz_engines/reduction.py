"""Reduction modulo exact forms.

p-deformed side: every f with simple poles on the dual lattice is written
as f = sum_j c_j w_j + D_p g with D_p g = g(t + p) b0(t) - g(t). Poles are
walked down the lattice toward the fundamental layer by subtracting images
of simple fractions, polynomial parts are removed with images of
monomials, and the remaining residues at z_l + a_l are solved against the
triangular residue pattern of the weight functions.

Classical side: the same for the twisted differential
g -> g' + g sum_l alpha_l/(t - z_l) and the basis 1/(t - z_l).
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from ._exact import GaussianRational, RationalFunction, ZERO, ONE
from ._exact import matrix as exact_matrix
from ._util import map_tasks
from .exception import ClassViolationError, FitError, GenericityError
from .master import (ParameterSet, SingularLattice, LatticeKind, LatticePoint, WORKING_DEPTH,
                     b0, b0_rational, b_ell_rational, weight_rational)

logger = logging.getLogger(__name__)


@dataclass
class CohomologyClass:
    coords: Tuple[GaussianRational, ...]
    certificate: RationalFunction
    source: RationalFunction
    params: ParameterSet

    def residual(self) -> RationalFunction:
        """f - sum c_j w_j - D_p g; zero for a valid certificate."""
        rest = self.source - apply_Dp(self.certificate, self.params, check=False)
        for j, c in enumerate(self.coords, 1):
            if c:
                rest = rest - weight_rational(self.params, j).scale(c)
        return rest

    def verify(self) -> bool:
        return self.residual().is_zero()


@dataclass
class ConnectionMatrix:
    entries: List[List[GaussianRational]]
    ell: int
    params: ParameterSet
    certificates: List[RationalFunction] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_complex(self) -> np.ndarray:
        return exact_matrix.to_complex(self.entries)

    def determinant(self) -> GaussianRational:
        return exact_matrix.determinant(self.entries)

    def __matmul__(self, other: "ConnectionMatrix") -> List[List[GaussianRational]]:
        return exact_matrix.matmul(self.entries, other.entries)


@dataclass
class ClassicalClass:
    coords: Tuple[GaussianRational, ...]
    certificate: RationalFunction
    source: RationalFunction
    params: ParameterSet

    def verify(self) -> bool:
        rest = self.source - nabla(self.certificate, self.params)
        for ell, c in enumerate(self.coords, 1):
            rest = rest - RationalFunction.pole(self.params.z[ell - 1], c)
        return rest.is_zero()


# -- p-deformed side

def apply_Dp(g: RationalFunction, params: ParameterSet, check: bool = True) -> RationalFunction:
    """g(t + p) b0(t) - g(t)."""
    image = g.shift(params.p) * b0_rational(params) - g
    if check:
        for loc, coeffs in image.poles.items():
            if len(coeffs) > 1:
                raise ClassViolationError(f"D_p image has a pole of order {len(coeffs)} at {loc}")
            if not SingularLattice.tags_of(params, loc, LatticeKind.DUAL):
                raise ClassViolationError(f"D_p image has a pole at {loc} outside the dual lattice")
    return image


def strip_poles(g: RationalFunction, params: ParameterSet) -> List[GaussianRational]:
    """Poles of g in the closed strip between the real line and the real line shifted by p."""
    top = params.p.im
    return [loc for loc in g.poles if 0 <= loc.im <= top]


def _tag(params: ParameterSet, loc: GaussianRational, max_depth: int) -> LatticePoint:
    tags = SingularLattice.tags_of(params, loc, LatticeKind.DUAL)
    if not tags:
        raise ClassViolationError(f"Pole {loc} is not on the dual lattice")
    if len(tags) > 1:
        raise GenericityError(f"Pole {loc} has ambiguous lattice tags {[t.tag for t in tags]}")
    if tags[0].depth > max_depth:
        raise ClassViolationError(f"Pole {loc} at depth {tags[0].depth} exceeds working depth {max_depth}")
    return tags[0]


class _Reducer:

    def __init__(self, f: RationalFunction, params: ParameterSet, max_depth: int):
        self.params = params
        self.max_depth = max_depth
        self.current = f
        self.certificate = RationalFunction()
        self.tags: Dict[GaussianRational, LatticePoint] = {}

    def subtract_image(self, coeff: GaussianRational, g: RationalFunction):
        self.current = self.current - apply_Dp(g, self.params, check=False).scale(coeff)
        self.certificate = self.certificate + g.scale(coeff)

    def tag(self, loc: GaussianRational) -> LatticePoint:
        if loc not in self.tags:
            self.tags[loc] = _tag(self.params, loc, self.max_depth)
        return self.tags[loc]

    def _movable(self) -> Optional[LatticePoint]:
        movable = []
        for loc in self.current.poles:
            pt = self.tag(loc)
            if pt.sign < 0 or pt.depth > 0:
                movable.append(pt)
        if not movable:
            return None
        # deepest first, ties by (ell, sign)
        return min(movable, key=lambda pt: (-pt.depth, pt.ell, pt.sign))

    def shift_poles(self):
        params = self.params
        while True:
            pt = self._movable()
            if pt is None:
                return
            r = self.current.residue(pt.loc)
            if pt.sign > 0:
                # z + a - N p: move one step toward z + a
                target = SingularLattice.generator(params, LatticeKind.DUAL, pt.ell, 1, pt.depth - 1)
                factor = b0(pt.loc, params)
                if not factor:
                    raise GenericityError(f"b0 vanishes at lattice point {pt.loc}")
                self.subtract_image(r / factor, RationalFunction.pole(target))
            else:
                # z - a + (N+1) p: the image of 1/(t - loc) moves it down by p; at N = 0 it lands on a zero of b0
                self.subtract_image(-r, RationalFunction.pole(pt.loc))
            logger.debug("cleared pole %s at depth %d", pt.tag, pt.depth)

    def eliminate_polynomial(self):
        total_a = sum(self.params.a, ZERO)
        while self.current.poly:
            d = self.current.degree()
            lead = self.params.p * (d + 1) + total_a * 2
            if not lead:
                raise GenericityError(f"(d+1) p + 2 sum a vanishes for d={d}")
            self.subtract_image(self.current.poly[-1] / lead, RationalFunction.monomial(d + 1))

    def solve_fundamental(self) -> List[GaussianRational]:
        params = self.params
        coords = [ZERO] * params.n
        for k in range(params.n, 0, -1):
            loc = params.z[k - 1] + params.a[k - 1]
            r = self.current.residue(loc)
            if not r:
                continue
            lead = ONE
            for z, a in zip(params.z[:k - 1], params.a[:k - 1]):
                den = loc - z - a
                if not den:
                    raise GenericityError(f"Fundamental poles of w_{k} collide")
                lead = lead * (loc - z + a) / den
            if not lead:
                raise GenericityError(f"w_{k} has no residue at its own pole")
            coords[k - 1] = r / lead
            self.current = self.current - weight_rational(params, k).scale(coords[k - 1])
        if not self.current.is_zero():
            raise ClassViolationError(f"Reduction left a remainder {self.current}")
        return coords


def reduce(f: RationalFunction, params: ParameterSet, max_depth: int = WORKING_DEPTH,
           verify: bool = True) -> CohomologyClass:
    """Coordinates of [f] in the basis w_1..w_{n-1} together with a certificate."""
    if params.n < 2:
        raise GenericityError("The cohomology is trivial for fewer than two points")
    for loc, coeffs in f.poles.items():
        if len(coeffs) > 1:
            raise ClassViolationError(f"Pole of order {len(coeffs)} at {loc}; only simple poles are admitted")
    reducer = _Reducer(f, params, max_depth)
    depth = max([reducer.tag(loc).depth for loc in f.poles] + [1])
    params.check_generic(depth)
    reducer.shift_poles()
    reducer.eliminate_polynomial()
    full = reducer.solve_fundamental()
    last_a = params.a[-1]
    if not last_a:
        raise GenericityError("a_n vanishes")
    c_n = full[-1]
    coords = tuple(c - c_n * a / last_a for c, a in zip(full[:-1], params.a[:-1]))
    # w_n = (D_p(1) - sum_{j<n} 2 a_j w_j) / (2 a_n)
    certificate = reducer.certificate + RationalFunction.constant(c_n / (last_a * 2))
    result = CohomologyClass(coords, certificate, f, params)
    if verify and not result.verify():
        raise ClassViolationError("Certificate identity does not hold")
    return result


def _beta_column(task) -> CohomologyClass:
    params, ell, j = task
    shifted = params.shifted(ell)
    f = b_ell_rational(params, ell) * weight_rational(shifted, j)
    return reduce(f, params)


def beta_matrix(params: ParameterSet, ell: int, workers: int = 1) -> ConnectionMatrix:
    """beta_ell with B_ell [w_j(z + p e_ell)] = sum_i w_i(z) beta[i][j]."""
    params._check_index(ell)
    for k, a in enumerate(params.a, 1):
        if not a:
            raise GenericityError(f"a_{k} vanishes")
    columns = map_tasks(_beta_column, [(params, ell, j) for j in range(1, params.n)], workers)
    entries = [[columns[j].coords[i] for j in range(params.n - 1)] for i in range(params.n - 1)]
    return ConnectionMatrix(entries, ell, params, [c.certificate for c in columns])


# -- classical side

def _log_derivative(params: ParameterSet) -> RationalFunction:
    return RationalFunction((), {z: [a / params.kappa] for z, a in zip(params.z, params.a)})


def nabla(g: RationalFunction, params: ParameterSet) -> RationalFunction:
    """g' + g sum alpha_l/(t - z_l), so that d(g Phi) = nabla(g) Phi dt."""
    return g.derivative() + g * _log_derivative(params)


def classical_reduce(f: RationalFunction, params: ParameterSet, eliminate_last: bool = True) -> ClassicalClass:
    """Coordinates of f dt in the basis 1/(t - z_l) modulo twisted-exact forms."""
    alpha = [a / params.kappa for a in params.a]
    index = {z: ell for ell, z in enumerate(params.z)}
    if len(index) != params.n:
        raise GenericityError("Marked points coincide")
    for loc in f.poles:
        if loc not in index:
            raise ClassViolationError(f"Pole {loc} is not a marked point")
    current = f
    certificate = RationalFunction()

    def subtract(coeff, g):
        nonlocal current, certificate
        current = current - nabla(g, params).scale(coeff)
        certificate = certificate + g.scale(coeff)

    while current.max_order() > 1:
        loc, coeffs = max(current.poles.items(), key=lambda kv: (len(kv[1]), -index[kv[0]]))
        k = len(coeffs) - 1
        lead = alpha[index[loc]] - k
        if not lead:
            raise GenericityError(f"alpha_{index[loc] + 1} = {k} is resonant")
        subtract(coeffs[-1] / lead, RationalFunction.pole(loc, 1, k))
    total = sum(alpha, ZERO)
    while current.poly:
        d = current.degree()
        lead = total + d + 1
        if not lead:
            raise GenericityError(f"sum alpha = {-(d + 1)} is resonant")
        subtract(current.poly[-1] / lead, RationalFunction.monomial(d + 1))
    residues = [current.residue(z) for z in params.z]
    if eliminate_last:
        if not alpha[-1]:
            raise GenericityError("alpha_n vanishes")
        last = residues[-1]
        coords = tuple(r - last * al / alpha[-1] for r, al in zip(residues[:-1], alpha[:-1]))
        subtract(last / alpha[-1], RationalFunction.constant(1))
    else:
        coords = tuple(residues)
    result = ClassicalClass(coords, certificate, f, params)
    if not result.verify():
        raise ClassViolationError("Twisted certificate identity does not hold")
    return result


def gauss_manin(params: ParameterSet, i: int) -> List[List[GaussianRational]]:
    """A_i with d/dz_i [Phi dt/(t - z_l)] = sum_k A_i[k][l] Phi dt/(t - z_k)."""
    params._check_index(i)
    alpha_i = params.a[i - 1] / params.kappa
    z_i = params.z[i - 1]
    columns = []
    for ell in range(1, params.n + 1):
        z_l = params.z[ell - 1]
        f = (RationalFunction.pole(z_i) * RationalFunction.pole(z_l)).scale(-alpha_i)
        if ell == i:
            f = f + RationalFunction.pole(z_i, 1, 2)
        columns.append(classical_reduce(f, params, eliminate_last=False).coords)
    return [[columns[ell][k] for ell in range(params.n)] for k in range(params.n)]


def kz_matrices(params: ParameterSet) -> Dict[Tuple[int, int], List[List[GaussianRational]]]:
    """Omega_ij with A_i = kappa^-1 sum_{j != i} Omega_ij/(z_i - z_j).

    An entry of A_i in row k and column l depends on z_i - z_j only for j in
    {k, l}; the diagonal entry splits as minus the sum of the off-diagonal
    entries of its column. The decomposition is checked exactly.
    """
    n = params.n
    omegas = {}
    for i in range(1, n + 1):
        a_i = gauss_manin(params, i)
        for j in range(1, n + 1):
            if j == i:
                continue
            weight = params.kappa * (params.z[i - 1] - params.z[j - 1])
            omega = [[ZERO] * n for _ in range(n)]
            omega[j - 1][j - 1] = a_i[j - 1][j - 1] * weight
            omega[i - 1][j - 1] = a_i[i - 1][j - 1] * weight
            omega[j - 1][i - 1] = a_i[j - 1][i - 1] * weight
            omega[i - 1][i - 1] = -omega[j - 1][i - 1]
            omegas[(i, j)] = omega
        recombined = [[ZERO] * n for _ in range(n)]
        for j in range(1, n + 1):
            if j != i:
                factor = ONE / (params.kappa * (params.z[i - 1] - params.z[j - 1]))
                part = exact_matrix.scale(omegas[(i, j)], factor)
                recombined = [[x + y for x, y in zip(r, s)] for r, s in zip(recombined, part)]
        if exact_matrix.first_nonzero(exact_matrix.subtract(a_i, recombined)) is not None:
            raise FitError(f"Gauss-Manin matrix A_{i} is not of KZ form")
    return omegas

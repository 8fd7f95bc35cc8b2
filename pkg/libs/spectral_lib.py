"""
Radial linearized form Q[phi] = int_a^b r^(N-1) (phi'^2 - V phi^2) dr, discretized with piecewise
linear elements, and the eigenvalue counts built on it.

Every pencil is symmetric tridiagonal, so eigenvalues below a shift are counted by the signs of the
LDL^T pivots of (K - shift M) (Sylvester inertia) and extremal eigenvalues follow by bisection.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

import config
import libs.quadrature as quadrature
from libs.errors import DegenerateWeightError, DomainError, FactorizationError, NonFinitePotentialError
from libs.grid_lib import Grading, RadialGrid, build_grid
from libs.solution_lib import RadialSolution

logger = logging.getLogger(__name__)

_ELEMENT_ORDER = 4
_MAX_BISECTIONS = 200
# boundary values of a Hardy test function, relative to its maximum
_BOUNDARY_RTOL = 1e-12
_BOUNDARY_SAMPLES = 1001


class Boundary(str, enum.Enum):
    DIRICHLET = 'dirichlet'
    NATURAL = 'natural'


@dataclass(frozen=True)
class TridiagonalForm:
    """diagonal and first off-diagonal of an assembled symmetric matrix, all nodes kept"""
    diag: np.ndarray
    off: np.ndarray

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


@dataclass(frozen=True)
class OperatorPencil:
    stiffness: TridiagonalForm
    mass: TridiagonalForm
    boundary: tuple
    nodes: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.stiffness.diag.size

    @property
    def scale(self) -> float:
        """infinity norm of the stiffness matrix"""
        off = np.abs(self.stiffness.off)
        row = np.abs(self.stiffness.diag).copy()
        row[:-1] += off
        row[1:] += off
        return float(np.max(row)) if row.size else 0.0

    def to_dense(self) -> tuple:
        return self.stiffness.to_dense(), self.mass.to_dense()


@dataclass(frozen=True)
class SpectrumReport:
    negative_count: int
    smallest_eigenvalue: float
    quotient_min: float
    grid_size: int
    refinement_consistent: bool
    refined_count: int = -1
    perturbed: bool = False


def assemble_tridiagonal(nodes: np.ndarray, stiff_weight: Callable, mass_weight: Callable,
                         potential: Optional[Callable] = None) -> tuple:
    """
    P1 element assembly on all nodes of
        K = int p phi_i' phi_j' - int m V phi_i phi_j,   M = int m phi_i phi_j
    with element integrals by a 4-point Gauss rule.
    :return: (K, M) as TridiagonalForm
    :raises NonFinitePotentialError: naming the left node of the first element where V is not finite
    """
    nodes = np.asarray(nodes, dtype=float)
    h = np.diff(nodes)
    x, w = quadrature.panel_points(nodes[:-1], nodes[1:], _ELEMENT_ORDER)
    left = (nodes[1:, None] - x) / h[:, None]
    right = (x - nodes[:-1, None]) / h[:, None]

    p = stiff_weight(x)
    m = mass_weight(x)
    if not np.all(m >= 0.0):
        raise DegenerateWeightError('mass weight must be nonnegative')

    slope = np.sum(w * p, axis=1) / h ** 2
    mass_ll = np.sum(w * m * left * left, axis=1)
    mass_lr = np.sum(w * m * left * right, axis=1)
    mass_rr = np.sum(w * m * right * right, axis=1)

    k_ll, k_lr, k_rr = slope.copy(), -slope, slope.copy()
    if potential is not None:
        V = np.asarray(potential(x), dtype=float)
        bad = ~np.isfinite(V)
        if np.any(bad):
            element, point = np.argwhere(bad)[0]
            raise NonFinitePotentialError(int(element), float(nodes[element]), float(V[element, point]))
        k_ll -= np.sum(w * m * V * left * left, axis=1)
        k_lr -= np.sum(w * m * V * left * right, axis=1)
        k_rr -= np.sum(w * m * V * right * right, axis=1)

    def _gather(ll, lr, rr):
        diag = np.zeros(nodes.size)
        diag[:-1] += ll
        diag[1:] += rr
        return TridiagonalForm(diag, lr)

    return _gather(k_ll, k_lr, k_rr), _gather(mass_ll, mass_lr, mass_rr)


def _restrict(form: TridiagonalForm, lo: int, hi: int) -> TridiagonalForm:
    return TridiagonalForm(form.diag[lo:hi].copy(), form.off[lo:hi - 1].copy())


def _check_mass(mass: TridiagonalForm):
    row = np.abs(mass.diag).copy()
    row[:-1] += np.abs(mass.off)
    row[1:] += np.abs(mass.off)
    negative, zero = _pivot_signs(mass.diag.tolist(), mass.off.tolist(), row.tolist())
    if negative or zero:
        raise DegenerateWeightError('mass matrix is not positive definite')


def make_pencil(nodes: np.ndarray, stiff_weight: Callable, mass_weight: Callable,
                potential: Optional[Callable] = None,
                boundary: tuple = (Boundary.DIRICHLET, Boundary.DIRICHLET)) -> OperatorPencil:
    """assembles and eliminates the Dirichlet rows and columns"""
    nodes = np.asarray(nodes, dtype=float)
    K, M = assemble_tridiagonal(nodes, stiff_weight, mass_weight, potential)
    lo = 1 if Boundary(boundary[0]) is Boundary.DIRICHLET else 0
    hi = nodes.size - 1 if Boundary(boundary[1]) is Boundary.DIRICHLET else nodes.size
    pencil = OperatorPencil(_restrict(K, lo, hi), _restrict(M, lo, hi),
                            (Boundary(boundary[0]), Boundary(boundary[1])), nodes[lo:hi])
    _check_mass(pencil.mass)
    logger.debug('assembled pencil of size %d on [%g, %g]', pencil.size, nodes[0], nodes[-1])
    return pencil


def assemble_form(sol: RadialSolution, grid: RadialGrid, potential: Optional[Callable] = None) -> OperatorPencil:
    """
    Pencil of the radial form of the solution on the grid, natural at r = 0 and Dirichlet elsewhere.
    :param potential: V(r); defaults to f'(u(r)) of the solution
    """
    N = sol.N
    if potential is None:
        potential = sol.fprime
    left = Boundary.NATURAL if grid.a == 0.0 else Boundary.DIRICHLET

    def _weight(r):
        return r ** (N - 1)

    return make_pencil(grid.nodes, _weight, _weight, potential, (left, Boundary.DIRICHLET))


def _pivot_signs(alpha: list, beta: list, shift_scale: list) -> tuple:
    """
    LDL^T recursion d_i = a_i - b_(i-1)^2 / d_(i-1) of a symmetric tridiagonal matrix.
    :return: (negative pivot count, True if some pivot was numerically zero)
    """
    negative = 0
    d = 1.0
    for i, a in enumerate(alpha):
        d = a if i == 0 else a - beta[i - 1] * beta[i - 1] / d
        if abs(d) <= config.ZERO_PIVOT_RTOL * shift_scale[i]:
            return negative, True
        if d < 0.0:
            negative += 1
    return negative, False


def _count_below(pencil: OperatorPencil, shift: float) -> tuple:
    K, M = pencil.stiffness, pencil.mass
    perturbation = config.PIVOT_PERTURBATION * max(pencil.scale, np.finfo(float).tiny)
    for attempt in range(config.MAX_PERTURBATIONS + 1):
        sigma = shift + attempt * perturbation
        alpha = K.diag - sigma * M.diag
        beta = K.off - sigma * M.off
        # row magnitude decides whether a pivot counts as zero
        row = np.abs(K.diag) + abs(sigma) * np.abs(M.diag)
        row[:-1] += np.abs(beta)
        row[1:] += np.abs(beta)
        count, zero = _pivot_signs(alpha.tolist(), beta.tolist(), row.tolist())
        if not zero:
            if attempt:
                logger.warning('zero pivot at shift %.17g, counted at perturbed shift %.17g', shift, sigma)
            return count, attempt > 0
    raise FactorizationError(f'LDL^T breakdown at shift {shift!r} after '
                             f'{config.MAX_PERTURBATIONS} perturbations')


def inertia(pencil: OperatorPencil, shift: float) -> int:
    """number of pencil eigenvalues below the shift"""
    return _count_below(pencil, shift)[0]


def smallest_eigenvalue(pencil: OperatorPencil) -> float:
    """bisection on the inertia function down to relative width BISECTION_RTOL"""
    lo, hi = -1.0, 1.0
    while inertia(pencil, lo) > 0:
        hi = lo
        lo *= 2.0
    while inertia(pencil, hi) == 0:
        lo = hi
        hi *= 2.0
    for step in range(_MAX_BISECTIONS):
        if hi - lo <= config.BISECTION_RTOL * max(abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if inertia(pencil, mid) > 0:
            hi = mid
        else:
            lo = mid
    logger.debug('smallest eigenvalue in [%.17g, %.17g] after %d bisections', lo, hi, step)
    return 0.5 * (lo + hi)


def _check_interval(a: float, b: float, n: int, minimum: int):
    if not 0.0 <= a < b <= 1.0:
        raise DomainError(f'interval must satisfy 0 <= a < b <= 1, got ({a!r}, {b!r})')
    if n < minimum:
        raise DomainError(f'grid needs n >= {minimum} intervals, got {n}')


def radial_morse_index(sol: RadialSolution, a: float, b: float, n: int,
                       potential: Optional[Callable] = None) -> SpectrumReport:
    """
    Negative eigenvalues of -u'' - (N-1)/r u' - V on (a, b) at n and 2n intervals.
    :param potential: V(r); defaults to f'(u(r)) of the solution
    """
    _check_interval(a, b, n, config.MIN_INDEX_GRID_N)
    pencil = assemble_form(sol, build_grid(a, b, n, layer=sol.layer), potential)
    refined = assemble_form(sol, build_grid(a, b, 2 * n, layer=sol.layer), potential)
    count, perturbed = _count_below(pencil, 0.0)
    refined_count, refined_perturbed = _count_below(refined, 0.0)
    consistent = count == refined_count
    if not consistent:
        logger.warning('index on (%g, %g) for N=%d r0=%g changes under refinement: %d at n=%d, %d at n=%d',
                       a, b, sol.N, sol.r0, count, n, refined_count, 2 * n)
    report = SpectrumReport(negative_count=count, smallest_eigenvalue=smallest_eigenvalue(pencil),
                            quotient_min=math.nan, grid_size=n, refinement_consistent=consistent,
                            refined_count=refined_count, perturbed=perturbed or refined_perturbed)
    logger.info('index on (%g, %g) for N=%d r0=%g: %d (smallest eigenvalue %.6g)', a, b, sol.N, sol.r0,
                count, report.smallest_eigenvalue)
    return report


def weighted_quotient_min(nodes: np.ndarray, stiff_weight: Callable, mass_weight: Callable) -> float:
    """min over Dirichlet P1 functions of int p w'^2 / int m w^2"""
    return smallest_eigenvalue(make_pencil(nodes, stiff_weight, mass_weight))


def stability_quotient(sol: RadialSolution, r0: float, n: int) -> float:
    """
    Minimum over omega vanishing at r0 and 1 of
        int r^(N-1) u_r^2 omega'^2 / int r^(N-3) u_r^2 omega^2.
    :raises DegenerateWeightError: when u_r vanishes at a quadrature point
    """
    if not 0.0 < r0 < 1.0:
        raise DomainError(f'annulus radius must satisfy 0 < r0 < 1, got {r0!r}')
    _check_interval(r0, 1.0, n, config.MIN_INDEX_GRID_N)
    N = sol.N
    # u_r^2 scaled by the profile ceiling keeps the entries of order one
    scale = sol.profile.limit ** 2

    def _slope_sq(r):
        ur2 = np.asarray(sol.u_r(r)) ** 2 / scale
        if np.any(~(ur2 > 0.0)):
            raise DegenerateWeightError(f'u_r vanishes on the annulus ({r0!r}, 1) for N={N} r0={sol.r0}')
        return ur2

    grid = build_grid(r0, 1.0, n, layer=sol.layer)
    value = weighted_quotient_min(grid.nodes, lambda r: r ** (N - 1) * _slope_sq(r),
                                  lambda r: r ** (N - 3) * _slope_sq(r))
    logger.info('stability quotient on (%g, 1) for N=%d r0=%g: %.12g', r0, N, sol.r0, value)
    return value


def hardy_quotient(N: int, a: float, b: float, n: int) -> float:
    """weighted quotient with the pure-power weights r^(1-N) and r^(-1-N)"""
    if not 0.0 < a < b:
        raise DomainError(f'interval must satisfy 0 < a < b, got ({a!r}, {b!r})')
    grid = build_grid(a, b, n, grading=Grading.GEOMETRIC)
    return weighted_quotient_min(grid.nodes, lambda r: r ** (1 - N), lambda r: r ** (-1 - N))


def hardy_constant(alpha: float, a: float, b: float) -> float:
    """
    exact infimum over (a, b) of int r^(alpha+1) w'^2 / int r^(alpha-1) w^2, which is
    alpha^2/4 + (pi / log(b/a))^2 and decreases to alpha^2/4 as a -> 0
    """
    if not 0.0 < a < b:
        raise DomainError(f'interval must satisfy 0 < a < b, got ({a!r}, {b!r})')
    return alpha ** 2 / 4.0 + (math.pi / math.log(b / a)) ** 2


def hardy_check(alpha: float, a: float, b: float, omega: Callable, omega_prime: Optional[Callable] = None) -> tuple:
    """
    Both sides of int_a^b r^(alpha+1) w'^2 >= alpha^2/4 int_a^b r^(alpha-1) w^2.
    :param omega: test function, vanishing at a and b
    :param omega_prime: derivative; taken from omega.deriv() when omitted
    :return: (lhs, rhs)
    :raises DomainError: when omega does not vanish at the endpoints
    """
    if not 0.0 < a < b:
        raise DomainError(f'interval must satisfy 0 < a < b, got ({a!r}, {b!r})')
    if omega_prime is None:
        if not hasattr(omega, 'deriv'):
            raise DomainError('omega_prime is required when omega has no deriv()')
        omega_prime = omega.deriv()

    peak = float(np.max(np.abs(omega(np.linspace(a, b, _BOUNDARY_SAMPLES)))))
    ends = max(abs(float(omega(a))), abs(float(omega(b))))
    if ends > _BOUNDARY_RTOL * peak:
        raise DomainError(f'test function must vanish at {a!r} and {b!r}: boundary value {ends!r} '
                          f'against maximum {peak!r}')
    if peak == 0.0:
        return 0.0, 0.0

    lhs = quadrature.adaptive(lambda r: r ** (alpha + 1) * float(omega_prime(r)) ** 2, a, b)
    rhs = alpha ** 2 / 4.0 * quadrature.adaptive(lambda r: r ** (alpha - 1) * float(omega(r)) ** 2, a, b)
    return lhs, rhs


def random_bump(rng: np.random.Generator, a: float, b: float, degree: int = 4) -> np.polynomial.Polynomial:
    """
    (r - a)(b - r) P(x) in the variable x = (r - a)/(b - a), with P = 1 + a random polynomial of the given
    degree bounded by 1/2 on [0, 1]; mapped from the domain [a, b] so the endpoint zeros carry no cancellation
    """
    Polynomial = np.polynomial.Polynomial
    coef = rng.uniform(-1.0, 1.0, degree + 1) / (2.0 * (degree + 1))
    coef[0] += 1.0
    in_x = Polynomial([0.0, 1.0, -1.0]) * Polynomial(coef) * (b - a) ** 2
    return Polynomial(in_x.coef, domain=[a, b], window=[0.0, 1.0])


@dataclass(frozen=True)
class HardyTrial:
    alpha: float
    a: float
    b: float
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs >= self.rhs - 1e-10 * abs(self.lhs)


def hardy_suite(alphas, a_values, b: float, trials: int, seed: int = 0) -> list:
    """seeded random polynomial bumps cycled over every (alpha, a) combination"""
    rng = np.random.default_rng(seed)
    combos = [(float(alpha), float(a)) for alpha in alphas for a in a_values]
    if not combos:
        raise DomainError('hardy suite needs at least one alpha and one left endpoint')
    results = []
    for trial in range(trials):
        alpha, a = combos[trial % len(combos)]
        omega = random_bump(rng, a, b, degree=int(rng.integers(0, 7)))
        lhs, rhs = hardy_check(alpha, a, b, omega)
        results.append(HardyTrial(alpha, a, b, lhs, rhs))
    failed = sum(not t.passed for t in results)
    if failed:
        logger.warning('hardy suite: %d of %d trials failed', failed, trials)
    return results


def splitting_indices(sol: RadialSolution, delta: float, n: int, potential: Optional[Callable] = None) -> tuple:
    """radial indices on (0, delta), (delta, 1) and (0, 1)"""
    if not 0.0 < delta < 1.0:
        raise DomainError(f'split radius must satisfy 0 < delta < 1, got {delta!r}')
    inner = radial_morse_index(sol, 0.0, delta, n, potential).negative_count
    outer = radial_morse_index(sol, delta, 1.0, n, potential).negative_count
    whole = radial_morse_index(sol, 0.0, 1.0, n, potential).negative_count
    return inner, outer, whole


def splitting_check(sol: RadialSolution, delta: float, n: int, potential: Optional[Callable] = None) -> bool:
    """stable on both sides of delta implies index at most one on the ball"""
    inner, outer, whole = splitting_indices(sol, delta, n, potential)
    holds = not (inner == 0 and outer == 0) or whole <= 1
    logger.info('splitting at %g for N=%d r0=%g: inner %d, outer %d, whole %d', delta, sol.N, sol.r0,
                inner, outer, whole)
    return holds

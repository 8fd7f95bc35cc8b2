"""
Radial L^p norms of the constructed solutions, the r0 scan with its exponent fits, and the
critical-exponent family u_lambda = U(lambda, .) - U(1, .).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize, special

import config
import libs.cache as cache
import libs.quadrature as quadrature
from libs.errors import DomainError, LabError
from libs.grid_lib import build_grid
from libs.profile_lib import kappa
from libs.solution_lib import RadialSolution, pde_residual, solution_for, u_values
from libs.spectral_lib import radial_morse_index, stability_quotient

logger = logging.getLogger(__name__)

_NORM_ORDER = 16
# geometric sub-panels toward r = 1 where |u|^p loses smoothness for fractional p
_END_REFINEMENTS = 30
_DECREASE_RTOL = 1e-12
_UPPER_LAW_FACTOR = 1.5


@dataclass(frozen=True)
class ScanRow:
    N: int
    r0: float
    p: float
    q: float
    norm_p: float
    norm_q: float
    ratio_q_over_p: float
    index_inner: int
    index_annulus: int
    index_whole: int
    quotient_annulus: float
    residual: float
    error: Optional[str] = None


@dataclass(frozen=True)
class CriticalFamilyPoint:
    N: int
    lam: float
    sup_norm: float
    l1_norm: float
    ratio: float
    boundary_value: float
    residual: float


def sphere_area(N: int) -> float:
    """area of the unit sphere in R^N, 2 pi^(N/2) / Gamma(N/2)"""
    return 2.0 * math.pi ** (N / 2.0) / float(special.gamma(N / 2.0))


def ball_volume(N: int) -> float:
    return sphere_area(N) / N


def _check_exponent(p: float):
    if not p >= 1.0:
        raise DomainError(f'norm exponent must satisfy p >= 1, got p={p!r}')


def _norm_edges(nodes: np.ndarray) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=float)
    if nodes[-1] != 1.0 or nodes.size < 2:
        return nodes
    last = 1.0 - nodes[-2]
    tail = 1.0 - last * 0.5 ** np.arange(1, _END_REFINEMENTS + 1)
    return np.concatenate([nodes[:-1], tail, [1.0]])


def radial_lp_norm(func: Callable, N: int, p: float, nodes: np.ndarray) -> float:
    """
    (|S^(N-1)| int r^(N-1) |func(r)|^p dr)^(1/p) by composite Gauss-Legendre on the given nodes;
    for p = inf the maximum of |func| over the nodes
    """
    _check_exponent(p)
    if math.isinf(p):
        return float(np.max(np.abs(func(np.asarray(nodes, dtype=float)))))
    pieces = quadrature.composite(lambda r: r ** (N - 1) * np.abs(func(r)) ** p, _norm_edges(nodes),
                                  order=_NORM_ORDER)
    return float((sphere_area(N) * np.sum(pieces)) ** (1.0 / p))


def lp_norm(sol: RadialSolution, p: float, n: int) -> float:
    """||u||_p on the unit ball; ||u||_inf = u(0)"""
    _check_exponent(p)
    if n < config.MIN_NORM_GRID_N:
        raise DomainError(f'norm grid needs n >= {config.MIN_NORM_GRID_N} intervals, got {n}')
    if math.isinf(p):
        return sol.u0
    grid = build_grid(0.0, 1.0, n, layer=sol.layer)
    return radial_lp_norm(lambda r: u_values(sol, r), sol.N, p, grid.nodes)


def norm_bounds(N: int, p: float, q: float, r0: float) -> tuple:
    """
    Explicit estimates of the construction:
        ||u||_p >= (|S| int_0^r0 r^(N-1) ((r0^2 - r^2)/2)^p)^(1/p)
        ||u||_q <= (|S| [int_0^r0 r^(N-1) ((r0^2 - r^2)/2 + k r0^2/(N-2))^q
                         + (k r0^N/(N-2))^q int_r0^1 r^(N-1+(2-N)q)])^(1/q)
        ||u||_inf >= r0^2/2
    :return: (lp_lower, lq_upper, linf_lower)
    """
    _check_exponent(p)
    _check_exponent(q)
    area = sphere_area(N)
    linf_lower = 0.5 * r0 ** 2
    if math.isinf(p):
        lp_lower = linf_lower
    else:
        inner = r0 ** (N + 2 * p) * 2.0 ** (-p - 1) * float(special.beta(N / 2.0, p + 1.0))
        lp_lower = (area * inner) ** (1.0 / p)

    k = kappa(N)
    head = quadrature.adaptive(lambda r: r ** (N - 1) * (0.5 * (r0 ** 2 - r ** 2) + k * r0 ** 2 / (N - 2)) ** q,
                               0.0, r0)
    e = N + (2 - N) * q
    tail_integral = -math.log(r0) if e == 0 else (1.0 - r0 ** e) / e
    tail = (k * r0 ** N / (N - 2)) ** q * tail_integral
    lq_upper = (area * (head + tail)) ** (1.0 / q)
    return lp_lower, lq_upper, linf_lower


def _norm_exponent(N: int, s: float) -> tuple:
    """exponent e with ||u||_s ~ r0^e, and whether s lies above N/(N-2)"""
    if math.isinf(s):
        return 2.0, True
    if s * (N - 2) > N:
        return N / s + 2.0, True
    return float(N), False


def predicted_exponent(N: int, p: float, q: float) -> tuple:
    """
    small-r0 exponent of the ratio ||u||_q / ||u||_p, N (1/q - 1/p) when q > N/(N-2)
    :return: (exponent, in_regime)
    """
    e_q, q_regime = _norm_exponent(N, q)
    e_p, _ = _norm_exponent(N, p)
    return e_q - e_p, q_regime


def check_scan_parameters(N: int, p: float, q: float):
    """
    :raises DomainError: naming the violated inequality
    """
    if not config.N_MIN <= N <= config.N_MAX:
        raise DomainError(f'dimension must satisfy {config.N_MIN} <= N <= {config.N_MAX}, got N={N}')
    if not 1.0 <= q < p:
        raise DomainError(f'exponents must satisfy 1 <= q < p <= inf, got p={p!r} q={q!r}')
    if not p > N / (N - 2):
        raise DomainError(f'exponent must satisfy p > N/(N-2) = {N / (N - 2):.6g}, got p={p!r} for N={N}')


@cache.param_cache(maxsize=256)
def _structure(N: int, r0: float, n: int) -> tuple:
    """indices, annulus quotient and residual; shared by every (p, q) pair"""
    sol = solution_for(N, r0)
    inner = radial_morse_index(sol, 0.0, r0, n).negative_count
    annulus = radial_morse_index(sol, r0, 1.0, n).negative_count
    whole = radial_morse_index(sol, 0.0, 1.0, n).negative_count
    quotient = stability_quotient(sol, r0, n)
    residual = pde_residual(sol, build_grid(0.0, 1.0, n, layer=sol.layer))
    return inner, annulus, whole, quotient, residual


def scan_row(N: int, p: float, q: float, r0: float, n: int) -> ScanRow:
    """one configuration of the scan; library failures poison the row instead of raising"""
    try:
        sol = solution_for(N, r0)
        norm_p = lp_norm(sol, p, n)
        norm_q = lp_norm(sol, q, n)
        inner, annulus, whole, quotient, residual = _structure(N, r0, n)
    except LabError as e:
        logger.warning('scan row N=%d r0=%g p=%s q=%s failed: %s', N, r0, p, q, e)
        nan = math.nan
        return ScanRow(N, r0, p, q, nan, nan, nan, -1, -1, -1, nan, nan, error=str(e))
    row = ScanRow(N, r0, p, q, norm_p, norm_q, norm_q / norm_p, inner, annulus, whole, quotient, residual)
    logger.info('scan row N=%d r0=%g p=%s q=%s: ratio %.12g, indices %d/%d/%d', N, r0, p, q,
                row.ratio_q_over_p, inner, annulus, whole)
    return row


def scan(Ns, pairs, r0_values, n: int, workers: int = 1) -> list:
    """
    Rows for every N, (p, q) pair and r0, in that nesting order whatever the worker count.
    Rows are pure-Python loops that hold the GIL, so workers keep the order but do not speed a scan up.
    :raises DomainError: before any computation when a configuration is invalid
    """
    r0_values = [float(r0) for r0 in r0_values]
    if any(b >= a for a, b in zip(r0_values, r0_values[1:])):
        raise DomainError(f'r0 values must be strictly decreasing, got {r0_values}')
    if n < config.MIN_NORM_GRID_N:
        raise DomainError(f'scan grid needs n >= {config.MIN_NORM_GRID_N} intervals, got {n}')
    jobs = []
    for N in Ns:
        for p, q in pairs:
            check_scan_parameters(int(N), float(p), float(q))
            jobs.extend((int(N), float(p), float(q), r0, n) for r0 in r0_values)

    if workers <= 1:
        return [scan_row(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda job: scan_row(*job), jobs))


def fit_exponent(rows) -> tuple:
    """
    Least-squares line through (log r0, log ratio). The ratio is norm_q / norm_p for finite p
    and norm_inf / norm_q for p = inf.
    :return: (slope, intercept, max_deviation)
    :raises DomainError: with fewer than 4 valid rows or mixed (N, p, q)
    """
    valid = [row for row in rows
             if row.error is None and np.isfinite(row.ratio_q_over_p) and row.ratio_q_over_p > 0.0]
    if len(valid) < 4:
        raise DomainError(f'exponent fit needs at least 4 valid rows, got {len(valid)}')
    if len({(row.N, row.p, row.q) for row in valid}) != 1:
        raise DomainError('exponent fit needs rows with identical (N, p, q)')
    if len({row.r0 for row in valid}) != len(valid):
        raise DomainError('exponent fit needs distinct r0 values')

    x = np.log([row.r0 for row in valid])
    y = np.log([row.ratio_q_over_p for row in valid])
    if math.isinf(valid[0].p):
        y = -y
    slope, intercept = np.polyfit(x, y, 1)
    max_deviation = float(np.max(np.abs(y - (slope * x + intercept))))
    return float(slope), float(intercept), max_deviation


def is_decreasing(values) -> bool:
    """strict decrease up to rounding"""
    return all(b < a * (1.0 - _DECREASE_RTOL) for a, b in zip(values, values[1:]))


def obeys_upper_law(rows, exponent: float, factor: float = _UPPER_LAW_FACTOR) -> bool:
    """
    ratio <= C r0^exponent on every valid row, with C fixed by the largest-r0 row times factor
    :raises DomainError: when no row is valid
    """
    valid = sorted((row for row in rows if row.error is None and np.isfinite(row.ratio_q_over_p)),
                   key=lambda row: row.r0, reverse=True)
    if not valid:
        raise DomainError('upper law needs at least one valid row')
    C = factor * valid[0].ratio_q_over_p / valid[0].r0 ** exponent
    worst = max(row.ratio_q_over_p / (C * row.r0 ** exponent) for row in valid)
    logger.info('upper law r0^%.6g: worst ratio to bound %.6g', exponent, worst)
    return worst <= 1.0


def bubble(N: int, lam: float, r):
    """U(lam, r) = (sqrt(lam N (N-2)) / (lam^2 + r^2))^((N-2)/2)"""
    r = np.asarray(r, dtype=float)
    return (lam * N * (N - 2)) ** ((N - 2) / 4.0) * (lam ** 2 + r ** 2) ** (-(N - 2) / 2.0)


def bubble_laplacian(N: int, lam: float, r):
    """-Delta U(lam, .) = (lam N (N-2))^((N-2)/4) N (N-2) lam^2 (lam^2 + r^2)^(-(N+2)/2)"""
    r = np.asarray(r, dtype=float)
    amplitude = (lam * N * (N - 2)) ** ((N - 2) / 4.0)
    return amplitude * N * (N - 2) * lam ** 2 * (lam ** 2 + r ** 2) ** (-(N + 2) / 2.0)


def critical_nonlinearity(N: int, lam: float, u):
    """(lam + u)^((N+2)/(N-2)) as an odd power"""
    base = lam + np.asarray(u, dtype=float)
    return np.sign(base) * np.abs(base) ** ((N + 2) / (N - 2))


def critical_family(N: int, lam: float, n: int) -> CriticalFamilyPoint:
    """
    Norms, boundary value and equation residual of u_lam = U(lam, .) - U(1, .) on the unit ball,
    evaluated from the closed form as written, boundary value included.
    """
    if not N >= 3:
        raise DomainError(f'critical family needs N >= 3, got N={N}')
    if not 0.0 < lam <= 1.0:
        raise DomainError(f'lambda must satisfy 0 < lambda <= 1, got {lam!r}')
    if n < config.MIN_NORM_GRID_N:
        raise DomainError(f'grid needs n >= {config.MIN_NORM_GRID_N} intervals, got {n}')

    def _u(r):
        return bubble(N, lam, r) - bubble(N, 1.0, r)

    nodes = build_grid(0.0, 1.0, n).nodes
    values = _u(nodes)
    sup_norm = float(np.max(np.abs(values)))
    boundary_value = float(_u(1.0))

    breaks = []
    if _u(0.0) * boundary_value < 0.0:
        breaks.append(optimize.brentq(lambda r: float(_u(r)), 0.0, 1.0, xtol=1e-15))
    edges = [0.0] + breaks + [1.0]
    l1_norm = sphere_area(N) * sum(quadrature.adaptive(lambda r: r ** (N - 1) * abs(float(_u(r))), lo, hi)
                                   for lo, hi in zip(edges[:-1], edges[1:]))

    minus_laplacian = bubble_laplacian(N, lam, nodes) - bubble_laplacian(N, 1.0, nodes)
    residual = float(np.max(np.abs(minus_laplacian - critical_nonlinearity(N, lam, values))))
    ratio = sup_norm / l1_norm if l1_norm > 0.0 else math.nan

    if lam != 1.0:
        logger.warning('critical family N=%d lambda=%g: u(1) = %.6g and residual %.6g as evaluated from '
                       'the closed form', N, lam, boundary_value, residual)
    return CriticalFamilyPoint(N=N, lam=lam, sup_norm=sup_norm, l1_norm=l1_norm, ratio=ratio,
                               boundary_value=boundary_value, residual=residual)

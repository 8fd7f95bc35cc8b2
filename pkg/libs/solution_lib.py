"""
Radial solution u(r) = int_r^1 Psi(s^N) s^(1-N) ds built from a profile, together with the
nonlinearity along the solution, f(u(r)) = N Psi'(r^N), and its derivative
f'(u(r)) = -N^2 r^(2N-2) Psi''(r^N) / Psi(r^N).

f is only ever needed along the solution, so it is represented as a function of r.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

import config
import libs.cache as cache
import libs.quadrature as quadrature
from libs.errors import DomainError, QuadratureError
from libs.grid_lib import RadialGrid, build_grid
from libs.profile_lib import Profile, build_profile, psi_limit, psi_prime, psi_second, psi_values

logger = logging.getLogger(__name__)

_LAYER_PANELS = 1024
# agreement required between the cumulative layer table and adaptive quadrature
_BUILD_CHECK_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class RadialSolution:
    profile: Profile
    u0: float
    r_hi: float
    layer_r: np.ndarray = field(repr=False)
    layer_u: np.ndarray = field(repr=False)
    table: PchipInterpolator = field(repr=False)

    @property
    def N(self) -> int:
        return self.profile.N

    @property
    def r0(self) -> float:
        return self.profile.r0

    @property
    def layer(self) -> tuple:
        """radial window (r0, r_hi) where the nonlinearity is not constant"""
        return self.r0, self.r_hi

    def u(self, r):
        return u_values(self, r)

    def u_r(self, r):
        r_arr = _check_r(r)
        out = np.where(r_arr == 0.0, 0.0, _u_r(self, np.where(r_arr == 0.0, 1.0, r_arr)))
        return float(out) if out.ndim == 0 else out

    def f(self, r):
        return f_at_r(self, r)

    def fprime(self, r):
        return fprime_at_r(self, r)


def _as_output(out: np.ndarray):
    return float(out) if out.ndim == 0 else out


def _check_r(r, allow_origin: bool = True) -> np.ndarray:
    r_arr = np.asarray(r, dtype=float)
    low_ok = r_arr >= 0.0 if allow_origin else r_arr > 0.0
    if r_arr.size and (np.any(~low_ok) or np.any(r_arr > 1.0)):
        interval = '[0, 1]' if allow_origin else '(0, 1]'
        raise DomainError(f'radius must lie in {interval}, got {r!r}')
    return r_arr


def _integrand(profile: Profile):
    N = profile.N
    params = profile.params

    def _minus_u_r(s):
        s = np.asarray(s, dtype=float)
        return s ** (1 - N) * psi_values(params, s ** N)

    return _minus_u_r


def _outer(profile: Profile, r: np.ndarray) -> np.ndarray:
    """u where Psi has reached its ceiling: kappa_N r0^N (r^(2-N) - 1) / (N - 2)"""
    N = profile.N
    return psi_limit(profile.params) * (r ** (2 - N) - 1.0) / (N - 2)


def u_values(sol: RadialSolution, r):
    """exact u at any radii in [0, 1]"""
    r_arr = _check_r(r)
    r0, r_hi = sol.layer
    out = np.empty_like(r_arr)

    inner = r_arr <= r0
    out[inner] = sol.u0 - 0.5 * r_arr[inner] ** 2

    outer = r_arr >= r_hi
    out[outer] = _outer(sol.profile, r_arr[outer])

    middle = ~(inner | outer)
    if np.any(middle):
        rm = r_arr[middle]
        k = np.clip(np.searchsorted(sol.layer_r, rm, side='right'), 1, sol.layer_r.size - 1)
        partial = quadrature.panels(_integrand(sol.profile), rm, sol.layer_r[k], order=8)
        out[middle] = sol.layer_u[k] + partial
    return _as_output(out)


def _u_r(sol: RadialSolution, r_arr: np.ndarray) -> np.ndarray:
    N = sol.N
    inner = r_arr <= sol.r0
    safe = np.where(inner, 1.0, r_arr)
    outer = -safe ** (1 - N) * psi_values(sol.profile.params, safe ** N)
    return np.where(inner, -r_arr, outer)


def u_derivative(sol: RadialSolution, r):
    """-r^(1-N) Psi(r^N) in closed form; the origin is served by RadialSolution.u_r"""
    r_arr = _check_r(r, allow_origin=False)
    return _as_output(_u_r(sol, r_arr))


def u_second(sol: RadialSolution, r):
    """u''(r) = (N - 1) r^(-N) Psi(r^N) - N Psi'(r^N), with u'' = -1 on the inner ball"""
    r_arr = _check_r(r)
    N = sol.N
    inner = r_arr <= sol.r0
    safe = np.where(inner, 1.0, r_arr)
    t = safe ** N
    outer = (N - 1) * safe ** (-N) * psi_values(sol.profile.params, t) - N * psi_prime(sol.profile.params, t)
    return _as_output(np.where(inner, -1.0, outer))


def f_at_r(sol: RadialSolution, r):
    """f(u(r)) = N Psi'(r^N), extended to the origin by N"""
    r_arr = _check_r(r)
    N = sol.N
    inner = r_arr <= sol.r0
    safe = np.where(inner, 1.0, r_arr)
    out = np.where(inner, float(N), N * psi_prime(sol.profile.params, safe ** N))
    return _as_output(out)


def fprime_at_r(sol: RadialSolution, r):
    """f'(u(r)) = -N^2 r^(2N-2) Psi''(r^N) / Psi(r^N), extended to the origin by 0"""
    r_arr = _check_r(r)
    N = sol.N
    params = sol.profile.params
    inner = r_arr <= sol.r0
    safe = np.where(inner, 1.0, r_arr)
    t = safe ** N
    outer = -N ** 2 * safe ** (2 * N - 2) * psi_second(params, t) / psi_values(params, t)
    return _as_output(np.where(inner, 0.0, outer))


def u_direct(sol: RadialSolution, r: float) -> float:
    """u(r) by adaptive quadrature of the defining integral"""
    r = float(_check_r(r))
    return quadrature.adaptive(_integrand(sol.profile), max(r, sol.r0), 1.0, points=[sol.r_hi]) \
        + (0.5 * (sol.r0 ** 2 - r ** 2) if r < sol.r0 else 0.0)


def u_interpolated(sol: RadialSolution, r):
    """monotone cubic evaluation from the cached table"""
    r_arr = _check_r(r)
    return _as_output(np.asarray(sol.table(r_arr)))


def pde_residual(sol: RadialSolution, grid: RadialGrid) -> float:
    """sup over the grid of |-u'' - (N-1)/r u' - f(u)|"""
    r = grid.nodes
    N = sol.N
    nonzero = r > 0.0
    rn = r[nonzero]
    residual = -np.asarray(u_second(sol, rn)) - (N - 1) / rn * np.asarray(u_derivative(sol, rn)) \
        - np.asarray(f_at_r(sol, rn))
    worst = float(np.max(np.abs(residual))) if residual.size else 0.0
    if not np.all(nonzero):
        # limits at the origin: u'' = -1, u'/r = -1, f = N
        worst = max(worst, abs(1.0 + (N - 1) - N))
    return worst


def build_solution(profile: Profile) -> RadialSolution:
    """
    Tabulates u on the transition layer by cumulative Gauss-Legendre integration, checks the
    table against adaptive quadrature and caches a monotone interpolant on CACHE_NODES nodes.
    :raises QuadratureError: when the two integrations disagree
    """
    N = profile.N
    r0 = profile.r0
    _, t_hi = profile.window
    r_hi = 1.0 if t_hi >= 1.0 else t_hi ** (1.0 / N)
    r_hi = max(r_hi, r0)

    layer_r = np.linspace(r0, r_hi, _LAYER_PANELS + 1)
    pieces = quadrature.composite(_integrand(profile), layer_r, order=8)
    tail = 0.0 if r_hi >= 1.0 else float(_outer(profile, np.asarray(r_hi)))
    layer_u = tail + np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    layer_r.setflags(write=False)
    layer_u.setflags(write=False)

    if r_hi > r0:
        check = quadrature.adaptive(_integrand(profile), r0, r_hi) + tail
        if abs(check - layer_u[0]) > _BUILD_CHECK_RTOL * abs(check):
            raise QuadratureError(f'layer integral mismatch for N={N} r0={r0}: '
                                  f'table {layer_u[0]!r} vs adaptive {check!r}')
    u0 = float(layer_u[0]) + 0.5 * r0 ** 2

    provisional = RadialSolution(profile, u0, r_hi, layer_r, layer_u, table=None)
    table_grid = build_grid(0.0, 1.0, config.CACHE_NODES - 1, layer=(r0, r_hi))
    table = PchipInterpolator(table_grid.nodes, u_values(provisional, table_grid.nodes))
    sol = RadialSolution(profile, u0, r_hi, layer_r, layer_u, table)
    logger.info('built solution N=%d r0=%g: u(0)=%.12g, layer (%.6g, %.6g)', N, r0, u0, r0, r_hi)
    return sol


@cache.param_cache(maxsize=64)
def solution_for(N: int, r0: float) -> RadialSolution:
    return build_solution(build_profile(N, r0))

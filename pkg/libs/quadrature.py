import functools
import logging
import warnings

import numpy as np
from scipy import integrate

import config
from libs.errors import QuadratureError

logger = logging.getLogger(__name__)

# tolerance blow-up accepted before an adaptive result counts as failed
_FAILURE_FACTOR = 1e3


def adaptive(func, a: float, b: float, points=None, epsrel: float = None, epsabs: float = None) -> float:
    """
    Adaptive Gauss-Kronrod integral of a scalar function over [a, b] (b may be np.inf).
    :param points: interior breakpoints where the integrand changes character
    :raises QuadratureError: when the error estimate misses the requested tolerance
    """
    epsrel = config.QUAD_EPSREL if epsrel is None else epsrel
    epsabs = config.QUAD_EPSABS if epsabs is None else epsabs
    if a == b:
        return 0.0
    kwargs = {'epsrel': epsrel, 'epsabs': epsabs, 'limit': config.QUAD_LIMIT, 'full_output': 1}
    if points is not None and np.isfinite(b):
        inner = [p for p in points if a < p < b]
        if inner:
            kwargs['points'] = inner
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        result = integrate.quad(func, a, b, **kwargs)
    value, abserr = result[0], result[1]
    allowed = max(epsabs, epsrel * abs(value))
    if not np.isfinite(value) or abserr > _FAILURE_FACTOR * allowed:
        message = result[3] if len(result) > 3 else 'error estimate too large'
        raise QuadratureError(f'quadrature on [{a!r}, {b!r}] failed: value={value!r} '
                              f'abserr={abserr!r} ({message})')
    logger.debug('quad [%g, %g] = %.17g (abserr %.3g, %d evaluations)', a, b, value, abserr,
                 result[2]['neval'])
    return value


@functools.lru_cache(maxsize=16)
def gauss_legendre(order: int):
    """nodes and weights on [-1, 1]"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_points(lo, hi, order: int):
    """
    Gauss points of every panel [lo[i], hi[i]].
    :return: (points, weights) both of shape (len(lo), order)
    """
    nodes, weights = gauss_legendre(order)
    lo = np.asarray(lo, dtype=float)[:, None]
    half = 0.5 * (np.asarray(hi, dtype=float)[:, None] - lo)
    return lo + half * (nodes[None, :] + 1.0), half * weights[None, :]


def panels(func, lo, hi, order: int = 8) -> np.ndarray:
    """integrals of a vectorized function over independent panels [lo[i], hi[i]]"""
    if np.size(lo) == 0:
        return np.zeros(0)
    points, weights = panel_points(lo, hi, order)
    return np.sum(func(points) * weights, axis=1)


def composite(func, edges: np.ndarray, order: int = 8) -> np.ndarray:
    """
    Per-panel integrals of a vectorized function over consecutive edges.
    :return: array of len(edges) - 1 panel integrals
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return np.zeros(0)
    return panels(func, edges[:-1], edges[1:], order)

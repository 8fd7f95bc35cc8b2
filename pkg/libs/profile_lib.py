"""
Cutoff profile Psi_r0 of the radial construction.

Psi(t) = t on (0, r0^N] and, past the join, Psi'(t) = exp(-theta((t - r0^N) / lam)) with the
flat transition kernel theta(s) = s * exp(-1/s). Choosing lam = (kappa_N - 1) r0^N / c0 with
c0 = int_0^inf exp(-theta) makes Psi increase to at most kappa_N r0^N.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

import config
import libs.cache as cache
import libs.quadrature as quadrature
from libs.errors import DomainError

logger = logging.getLogger(__name__)

# geometric panels keep every Gauss panel at least one width away from the essential point s = 0
_FLAT_END = 0.03


def kappa(N: int) -> float:
    """kappa_N = N / (2 sqrt(N - 1)), the ceiling factor of the profile"""
    if N < 3:
        raise DomainError(f'kappa_N needs N >= 3 (kappa_N > 1), got N={N}')
    return N / (2.0 * math.sqrt(N - 1))


def transition_kernel(s):
    """theta(s) = s exp(-1/s) for s > 0, 0 otherwise; accepts scalars or arrays"""
    s_arr = np.asarray(s, dtype=float)
    positive = s_arr > 0
    safe = np.where(positive, s_arr, 1.0)
    out = np.where(positive, safe * np.exp(-1.0 / safe), 0.0)
    return float(out) if out.ndim == 0 else out


def transition_kernel_prime(s):
    """theta'(s) = exp(-1/s) (1 + 1/s) for s > 0, 0 otherwise"""
    s_arr = np.asarray(s, dtype=float)
    positive = s_arr > 0
    safe = np.where(positive, s_arr, 1.0)
    out = np.where(positive, np.exp(-1.0 / safe) * (1.0 + 1.0 / safe), 0.0)
    return float(out) if out.ndim == 0 else out


def _kernel_density(s):
    return np.exp(-transition_kernel(s))


@cache.param_cache(maxsize=1)
def normalization_constant() -> float:
    """c0 = int_0^inf exp(-theta(s)) ds"""
    cutoff = config.KERNEL_CUTOFF
    head = quadrature.adaptive(_kernel_density, 0.0, cutoff, points=[_FLAT_END, 1.0])
    tail = quadrature.adaptive(_kernel_density, cutoff, np.inf)
    c0 = head + tail
    logger.info('transition kernel normalization c0 = %.17g', c0)
    return c0


def _kernel_edges() -> np.ndarray:
    cutoff = config.KERNEL_CUTOFF
    panel = config.KERNEL_PANEL
    edges = [0.0]
    edge = _FLAT_END
    while edge < panel:
        edges.append(edge)
        edge *= 2.0
    edges.extend(np.arange(panel, cutoff, panel))
    edges.append(cutoff)
    return np.unique(np.asarray(edges, dtype=float))


def kernel_integral(s):
    """
    G(s) = int_0^s exp(-theta) for arrays of s by composite 16-point Gauss-Legendre, capped at c0.
    """
    s_arr = np.clip(np.asarray(s, dtype=float), 0.0, None)
    c0 = normalization_constant()
    capped = np.minimum(s_arr, config.KERNEL_CUTOFF)
    edges = np.unique(np.concatenate([_kernel_edges(), capped.ravel()]))
    panels = quadrature.composite(_kernel_density, edges, order=16)
    cumulative = np.concatenate([[0.0], np.cumsum(panels)])
    values = cumulative[np.searchsorted(edges, capped.ravel())].reshape(capped.shape)
    out = np.where(s_arr >= config.KERNEL_CUTOFF, c0, np.minimum(values, c0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ProfileParams:
    N: int
    r0: float
    c0: float
    lam: float

    @property
    def t0(self) -> float:
        """join point r0^N"""
        return self.r0 ** self.N

    @property
    def kappa(self) -> float:
        return kappa(self.N)


def make_params(N: int, r0: float) -> ProfileParams:
    if not config.N_MIN <= N <= config.N_MAX:
        raise DomainError(f'dimension must satisfy {config.N_MIN} <= N <= {config.N_MAX}, got N={N}')
    if not config.R0_MIN <= r0 <= config.R0_MAX:
        raise DomainError(f'r0 must satisfy {config.R0_MIN} <= r0 <= {config.R0_MAX}, got r0={r0!r}')
    c0 = normalization_constant()
    lam = (kappa(N) - 1.0) * r0 ** N / c0
    return ProfileParams(N=int(N), r0=float(r0), c0=c0, lam=lam)


def _check_t(t):
    t_arr = np.asarray(t, dtype=float)
    if t_arr.size and (np.any(~(t_arr > 0.0)) or np.any(t_arr > 1.0)):
        raise DomainError(f'profile argument must lie in (0, 1], got {t!r}')
    return t_arr


def _kernel_argument(params: ProfileParams, t_arr: np.ndarray) -> np.ndarray:
    return (t_arr - params.t0) / params.lam


def log_psi_prime(params: ProfileParams, t):
    """log Psi'(t) = -theta((t - r0^N) / lam); finite where Psi' itself underflows"""
    t_arr = _check_t(t)
    out = -np.asarray(transition_kernel(_kernel_argument(params, t_arr)), dtype=float)
    out = np.where(t_arr <= params.t0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def psi_prime(params: ProfileParams, t):
    t_arr = _check_t(t)
    s = _kernel_argument(params, t_arr)
    out = np.where(t_arr <= params.t0, 1.0, np.exp(-np.asarray(transition_kernel(s))))
    return float(out) if out.ndim == 0 else out


def psi_second(params: ProfileParams, t):
    t_arr = _check_t(t)
    s = _kernel_argument(params, t_arr)
    slope = np.exp(-np.asarray(transition_kernel(s))) * np.asarray(transition_kernel_prime(s))
    out = np.where(t_arr <= params.t0, 0.0, -slope / params.lam)
    return float(out) if out.ndim == 0 else out


def psi(params: ProfileParams, t: float) -> float:
    """
    Psi(t) by adaptive quadrature of Psi' from the join, in the kernel variable.
    :param t: scalar in (0, 1]
    """
    t = float(_check_t(t))
    if t <= params.t0:
        return t
    s_end = (t - params.t0) / params.lam
    grown = quadrature.adaptive(_kernel_density, 0.0, s_end, points=[_FLAT_END, 1.0, config.KERNEL_CUTOFF])
    return params.t0 + params.lam * grown


def psi_values(params: ProfileParams, t):
    """vectorized Psi(t) = r0^N + lam G((t - r0^N) / lam)"""
    t_arr = _check_t(t)
    grown = np.asarray(kernel_integral(np.maximum(_kernel_argument(params, t_arr), 0.0)))
    out = np.where(t_arr <= params.t0, t_arr, params.t0 + params.lam * grown)
    return float(out) if out.ndim == 0 else out


def psi_limit(params: ProfileParams) -> float:
    """sup Psi = r0^N + lam c0 = kappa_N r0^N"""
    return params.t0 + params.lam * params.c0


def transition_window(params: ProfileParams) -> tuple:
    """t-range [r0^N, t_hi] outside of which Psi' is 1 or below double-precision relevance"""
    return params.t0, min(1.0, params.t0 + config.KERNEL_CUTOFF * params.lam)


@dataclass(frozen=True)
class Profile:
    params: ProfileParams

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def r0(self) -> float:
        return self.params.r0

    def psi(self, t):
        if np.ndim(t) == 0:
            return psi(self.params, t)
        return psi_values(self.params, t)

    def psi_prime(self, t):
        return psi_prime(self.params, t)

    def psi_second(self, t):
        return psi_second(self.params, t)

    def log_psi_prime(self, t):
        return log_psi_prime(self.params, t)

    @property
    def limit(self) -> float:
        return psi_limit(self.params)

    @property
    def window(self) -> tuple:
        return transition_window(self.params)


@cache.param_cache(maxsize=256)
def build_profile(N: int, r0: float) -> Profile:
    profile = Profile(make_params(N, r0))
    logger.debug('profile N=%d r0=%g lam=%.6g', N, r0, profile.params.lam)
    return profile

import math

import mpmath
import numpy as np
import pytest

import config
from libs.errors import DomainError
from libs.profile_lib import (kappa, kernel_integral, log_psi_prime, make_params, normalization_constant, psi,
                              psi_limit, psi_prime, psi_second, psi_values, transition_kernel,
                              transition_kernel_prime, transition_window)


def test_kappa():
    assert kappa(3) == pytest.approx(3 / (2 * math.sqrt(2)), rel=1e-15)
    assert kappa(9) == pytest.approx(9 / (2 * math.sqrt(8)), rel=1e-15)
    assert all(kappa(N) > 1.0 for N in range(3, 10))


def test_kappa_rejects_plane():
    with pytest.raises(DomainError):
        kappa(2)


def test_transition_kernel_values():
    assert transition_kernel(0.0) == 0.0
    assert transition_kernel(-1.0) == 0.0
    assert transition_kernel(1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    values = transition_kernel(np.array([-2.0, 0.0, 0.5, 2.0]))
    assert values.shape == (4,)
    assert values[0] == 0.0 and values[1] == 0.0
    assert values[3] == pytest.approx(2.0 * math.exp(-0.5), rel=1e-15)


@pytest.mark.parametrize('s', [0.2, 0.5, 1.0, 3.0])
def test_transition_kernel_prime_matches_difference_quotient(s):
    h = 1e-6
    quotient = (transition_kernel(s + h) - transition_kernel(s - h)) / (2 * h)
    assert transition_kernel_prime(s) == pytest.approx(quotient, rel=1e-7)


def test_normalization_constant_matches_mpmath():
    with mpmath.workdps(30):
        exact = mpmath.quad(lambda s: mpmath.exp(-s * mpmath.exp(-1 / s)), [0, 0.03, 1, 60, mpmath.inf])
    assert normalization_constant() == pytest.approx(float(exact), rel=1e-10)


def test_kernel_integral_is_capped_and_increasing():
    s = np.linspace(0.0, 80.0, 401)
    values = kernel_integral(s)
    assert values[0] == 0.0
    assert np.all(np.diff(values) >= 0.0)
    assert kernel_integral(config.KERNEL_CUTOFF + 1.0) == normalization_constant()
    assert np.max(values) <= normalization_constant()


def test_kernel_integral_near_origin_is_linear():
    # exp(-theta) = 1 up to exp(-1/s) on (0, 0.03)
    assert kernel_integral(0.02) == pytest.approx(0.02, rel=1e-12)


def test_make_params():
    params = make_params(3, 0.2)
    assert params.t0 == pytest.approx(0.008, rel=1e-15)
    assert params.lam == pytest.approx((kappa(3) - 1.0) * 0.008 / normalization_constant(), rel=1e-15)


@pytest.mark.parametrize('N, r0', [(2, 0.1), (10, 0.1), (3, 0.0), (3, 1.0), (3, 1e-4)])
def test_make_params_rejects_out_of_range(N, r0):
    with pytest.raises(DomainError):
        make_params(N, r0)


def test_psi_is_identity_before_join(wide_profile):
    params = wide_profile.params
    for t in (1e-3, 0.05, params.t0):
        assert psi(params, t) == t
    np.testing.assert_array_equal(psi_values(params, np.array([1e-3, 0.05])), [1e-3, 0.05])


def test_psi_values_match_adaptive_psi(wide_profile):
    params = wide_profile.params
    t = np.linspace(params.t0, 1.0, 41)
    vector = psi_values(params, t)
    for ti, vi in zip(t, vector):
        assert vi == pytest.approx(psi(params, ti), rel=1e-12)


@pytest.mark.parametrize('N, r0', [(3, 0.2), (5, 0.1), (9, 0.05)])
def test_psi_bounded_by_ceiling(N, r0):
    params = make_params(N, r0)
    assert psi_limit(params) == pytest.approx(kappa(N) * r0 ** N, rel=1e-13)
    assert psi(params, 1.0) <= kappa(N) * r0 ** N * (1.0 + 1e-12)
    assert psi_values(params, 1.0) <= kappa(N) * r0 ** N * (1.0 + 1e-12)


def test_psi_prime_positive_without_underflow(wide_profile):
    params = wide_profile.params
    t = np.linspace(1e-6, 1.0, 1001)
    slope = psi_prime(params, t)
    assert np.all(slope > 0.0)
    assert np.all(slope <= 1.0)
    assert np.all(np.diff(slope) <= 0.0)


def test_log_psi_prime_stays_finite_where_psi_prime_underflows():
    params = make_params(9, 0.05)
    t = np.linspace(1e-3, 1.0, 101)
    logs = log_psi_prime(params, t)
    assert np.all(np.isfinite(logs))
    assert np.all(logs < 0.0)
    assert psi_prime(params, 1.0) == 0.0


def test_log_psi_prime_matches_log(wide_profile):
    params = wide_profile.params
    t = np.linspace(params.t0, 0.3, 51)
    np.testing.assert_allclose(log_psi_prime(params, t), np.log(psi_prime(params, t)), rtol=1e-12, atol=1e-300)


def test_psi_derivatives_match_difference_quotients(wide_profile):
    params = wide_profile.params
    t = params.t0 + 2.0 * params.lam
    h = 1e-4 * params.lam
    assert psi_prime(params, t) == pytest.approx((psi(params, t + h) - psi(params, t - h)) / (2 * h), rel=1e-5)
    h = 1e-6 * params.lam
    quotient = (psi_prime(params, t + h) - psi_prime(params, t - h)) / (2 * h)
    assert psi_second(params, t) == pytest.approx(quotient, rel=1e-6)


def test_psi_prime_matches_difference_quotients_at_random_points(wide_profile, rng):
    params = wide_profile.params
    h = 1e-6
    for t in rng.uniform(0.5 * params.t0, 1.0 - 2.0 * h, 100):
        quotient = (psi(params, t + h) - psi(params, t - h)) / (2.0 * h)
        assert psi_prime(params, t) == pytest.approx(quotient, rel=1e-6, abs=1e-6)


def _join_mismatches(params, h):
    """centred differences across t0 against the identity branch, orders 1 to 4"""
    t0 = params.t0
    first = (psi(params, t0 + h) - psi(params, t0 - h)) / (2.0 * h) - 1.0
    second = (psi(params, t0 + h) - 2.0 * psi(params, t0) + psi(params, t0 - h)) / h ** 2
    third = (psi_prime(params, t0 + h) - 2.0 * psi_prime(params, t0) + psi_prime(params, t0 - h)) / h ** 2
    fourth = (psi_second(params, t0 + h) - 2.0 * psi_second(params, t0) + psi_second(params, t0 - h)) / h ** 2
    return np.abs([first, second, third, fourth])


def test_profile_join_is_smooth(wide_profile):
    coarse = _join_mismatches(wide_profile.params, 1e-3)
    fine = _join_mismatches(wide_profile.params, 1e-4)
    # rounding floor of each difference order at h = 1e-4
    floor = np.array([1e-9, 1e-6, 1e-6, 1e-6])
    assert np.all(fine <= 1e-2 * coarse + floor)


def test_psi_second_nonpositive(wide_profile):
    t = np.linspace(1e-6, 1.0, 1001)
    assert np.all(psi_second(wide_profile.params, t) <= 0.0)


@pytest.mark.parametrize('t', [0.0, -0.1, 1.5])
def test_profile_rejects_out_of_range(wide_profile, t):
    with pytest.raises(DomainError):
        psi_prime(wide_profile.params, t)


def test_transition_window(wide_profile):
    params = wide_profile.params
    lo, hi = transition_window(params)
    assert lo == params.t0
    assert hi == pytest.approx(params.t0 + config.KERNEL_CUTOFF * params.lam, rel=1e-15)
    assert wide_profile.window == (lo, hi)
    # past the window Psi sits at its ceiling to double precision
    assert psi_values(params, min(1.0, hi * 1.01)) == pytest.approx(psi_limit(params), rel=1e-15)


def test_profile_dispatches_scalar_and_array(wide_profile):
    t = wide_profile.params.t0 * 1.5
    assert wide_profile.psi(t) == pytest.approx(float(wide_profile.psi(np.array([t]))[0]), rel=1e-12)

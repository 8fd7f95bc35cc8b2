import math

import numpy as np
import pytest
from scipy import linalg

import libs.spectral_lib as spectral_lib
from libs.errors import DegenerateWeightError, DomainError, FactorizationError, NonFinitePotentialError
from libs.grid_lib import build_grid
from libs.solution_lib import solution_for
from libs.spectral_lib import (Boundary, assemble_form, assemble_tridiagonal, hardy_check, hardy_constant,
                               hardy_quotient, hardy_suite, inertia, make_pencil, radial_morse_index,
                               random_bump, smallest_eigenvalue, splitting_check, splitting_indices,
                               stability_quotient)

Polynomial = np.polynomial.Polynomial


def _ones(r):
    return np.ones_like(r)


def _zero(r):
    return np.zeros_like(r)


@pytest.fixture(scope='module')
def laplacian():
    return make_pencil(np.linspace(0.0, 1.0, 65), _ones, _ones)


def _dense_eigenvalues(pencil):
    K, M = pencil.to_dense()
    return linalg.eigh(K, M, eigvals_only=True)


def test_laplacian_counts(laplacian):
    assert laplacian.size == 63
    assert inertia(laplacian, -1e6) == 0
    assert inertia(laplacian, 2.0 * math.pi ** 2) == 1
    assert inertia(laplacian, 5.0 * math.pi ** 2) == 2
    assert inertia(laplacian, 1e12) == laplacian.size


def test_laplacian_smallest_eigenvalue(laplacian):
    value = smallest_eigenvalue(laplacian)
    assert value == pytest.approx(_dense_eigenvalues(laplacian)[0], rel=1e-8)
    assert value == pytest.approx(math.pi ** 2, rel=1e-3)
    assert value > math.pi ** 2


def test_inertia_is_monotone(laplacian):
    counts = [inertia(laplacian, shift) for shift in np.linspace(-10.0, 2000.0, 60)]
    assert counts == sorted(counts)


def test_inertia_matches_dense_eigenvalues(rng):
    nodes = np.linspace(0.1, 1.0, 41)
    checked = 0
    for _ in range(50):
        V = Polynomial(rng.uniform(-1.0, 1.0, 4)) * rng.uniform(0.0, 400.0)
        pencil = make_pencil(nodes, lambda r: r ** 2, lambda r: r ** 2, V)
        eigenvalues = _dense_eigenvalues(pencil)
        shift = rng.uniform(-50.0, 50.0)
        if np.min(np.abs(eigenvalues - shift)) < 1e-8 * np.max(np.abs(eigenvalues)):
            continue
        assert inertia(pencil, shift) == np.count_nonzero(eigenvalues < shift)
        checked += 1
    assert checked >= 45


def test_natural_boundary_keeps_the_end_node():
    nodes = np.linspace(0.0, 1.0, 17)
    pencil = make_pencil(nodes, _ones, _ones, boundary=(Boundary.NATURAL, Boundary.DIRICHLET))
    assert pencil.size == 16
    assert pencil.nodes[0] == 0.0
    # Neumann at 0 and Dirichlet at 1: first eigenvalue (pi/2)^2
    assert smallest_eigenvalue(pencil) == pytest.approx((math.pi / 2.0) ** 2, rel=1e-2)


@pytest.mark.parametrize('N', [3, 5, 6])
def test_mass_matrix_integrates_the_weight(N):
    a, b = 0.2, 0.9
    K, M = assemble_tridiagonal(np.linspace(a, b, 33), lambda r: r ** (N - 1), lambda r: r ** (N - 1))
    assert M.diag.sum() + 2.0 * M.off.sum() == pytest.approx((b ** N - a ** N) / N, rel=1e-13)
    assert K.diag.sum() + 2.0 * K.off.sum() == pytest.approx(0.0, abs=1e-9 * K.diag.max())


def test_potential_vanishes_inside_the_inner_ball(sol_3_01):
    grid = build_grid(0.0, 0.09, 64)
    default = assemble_form(sol_3_01, grid)
    free = assemble_form(sol_3_01, grid, potential=_zero)
    assert default.boundary == (Boundary.NATURAL, Boundary.DIRICHLET)
    np.testing.assert_array_equal(default.stiffness.diag, free.stiffness.diag)
    np.testing.assert_array_equal(default.stiffness.off, free.stiffness.off)


def test_non_finite_potential_is_located():
    with pytest.raises(NonFinitePotentialError) as info:
        assemble_tridiagonal(np.linspace(0.0, 1.0, 17), _ones, _ones,
                             potential=lambda r: np.where(r > 0.5, np.inf, 0.0))
    assert info.value.index == 8
    assert info.value.radius == 0.5
    assert math.isinf(info.value.value)


def test_negative_mass_weight_is_rejected():
    with pytest.raises(DegenerateWeightError):
        make_pencil(np.linspace(0.0, 1.0, 17), _ones, lambda r: r - 0.5)


def test_zero_pivot_is_perturbed(laplacian, monkeypatch):
    original = spectral_lib._pivot_signs
    calls = []

    def _first_call_breaks(*args):
        calls.append(args)
        return (0, True) if len(calls) == 1 else original(*args)

    monkeypatch.setattr(spectral_lib, '_pivot_signs', _first_call_breaks)
    count, perturbed = spectral_lib._count_below(laplacian, 2.0 * math.pi ** 2)
    assert (count, perturbed) == (1, True)
    assert len(calls) == 2


def test_persistent_zero_pivot_raises(laplacian, monkeypatch):
    monkeypatch.setattr(spectral_lib, '_pivot_signs', lambda *args: (0, True))
    with pytest.raises(FactorizationError):
        inertia(laplacian, 0.0)


def test_radial_index_of_a_small_core(sol_3_005):
    r0 = sol_3_005.r0
    inner = radial_morse_index(sol_3_005, 0.0, r0, 256)
    annulus = radial_morse_index(sol_3_005, r0, 1.0, 256)
    whole = radial_morse_index(sol_3_005, 0.0, 1.0, 256)
    assert inner.negative_count == 0 and inner.refinement_consistent
    assert annulus.negative_count == 0 and annulus.refinement_consistent
    assert whole.negative_count == 1 and whole.refinement_consistent
    assert whole.smallest_eigenvalue < 0.0 < annulus.smallest_eigenvalue
    assert whole.grid_size == 256 and whole.refined_count == 1


def test_radial_index_without_potential_is_zero(sol_3_01):
    report = radial_morse_index(sol_3_01, 0.0, 1.0, 64, potential=_zero)
    assert report.negative_count == 0
    assert report.smallest_eigenvalue == pytest.approx(math.pi ** 2, rel=1e-2)


@pytest.mark.parametrize('a, b, n', [(0.5, 0.5, 64), (0.0, 1.2, 64), (0.0, 1.0, 32)])
def test_radial_index_rejects(sol_3_01, a, b, n):
    with pytest.raises(DomainError):
        radial_morse_index(sol_3_01, a, b, n)


@pytest.mark.parametrize('N', [3, 9])
def test_stability_quotient_exceeds_hardy_bound(N):
    sol = solution_for(N, 0.1)
    assert stability_quotient(sol, 0.1, 256) >= N - 1


def test_stability_quotient_rejects_radius(sol_3_01):
    with pytest.raises(DomainError):
        stability_quotient(sol_3_01, 1.0, 256)


@pytest.mark.parametrize('N', [3, 5, 9])
@pytest.mark.parametrize('a', [1e-2, 1e-4])
def test_hardy_quotient_approaches_exact_infimum(N, a):
    exact = hardy_constant(-N, a, 1.0)
    value = hardy_quotient(N, a, 1.0, 1024)
    assert value >= exact * (1.0 - 1e-10)
    assert value == pytest.approx(exact, rel=1e-3)
    assert value >= N ** 2 / 4.0


def test_hardy_constant_decreases_to_quarter_alpha_squared():
    values = [hardy_constant(-4.0, a, 1.0) for a in (0.5, 1e-2, 1e-8, 1e-100)]
    assert values == sorted(values, reverse=True)
    assert values[-1] == pytest.approx(4.0, rel=1e-3)


def test_hardy_check_on_a_parabola():
    omega = Polynomial.fromroots([0.1, 1.0]) * -1.0
    lhs, rhs = hardy_check(-3.0, 0.1, 1.0, omega)
    assert lhs > rhs > 0.0
    assert hardy_check(-3.0, 0.1, 1.0, omega, omega.deriv()) == (lhs, rhs)


def test_hardy_check_accepts_plain_callables():
    lhs, rhs = hardy_check(-5.0, 0.2, 1.0, lambda r: np.sin(math.pi * (r - 0.2) / 0.8),
                           lambda r: math.pi / 0.8 * np.cos(math.pi * (r - 0.2) / 0.8))
    assert lhs >= rhs


def test_hardy_check_rejects():
    with pytest.raises(DomainError):
        hardy_check(-3.0, 0.1, 1.0, Polynomial([1.0, 1.0]))
    with pytest.raises(DomainError):
        hardy_check(-3.0, 0.1, 1.0, lambda r: (r - 0.1) * (1.0 - r))
    with pytest.raises(DomainError):
        hardy_check(-3.0, 0.0, 1.0, Polynomial.fromroots([0.0, 1.0]))


def test_hardy_check_of_zero_function():
    assert hardy_check(-3.0, 0.1, 1.0, Polynomial([0.0])) == (0.0, 0.0)


def test_random_bump_vanishes_at_both_ends(rng):
    for degree in range(7):
        omega = random_bump(rng, 0.3, 1.0, degree)
        assert abs(omega(0.3)) <= 1e-14 and abs(omega(1.0)) <= 1e-14
        assert np.all(omega(np.linspace(0.31, 0.99, 50)) > 0.0)


def test_hardy_suite_passes_every_trial():
    trials = hardy_suite(range(-9, -2), (0.05, 0.1, 0.3), 1.0, trials=100, seed=0)
    assert len(trials) == 100
    assert all(t.passed for t in trials)
    assert {t.alpha for t in trials} == {float(alpha) for alpha in range(-9, -2)}
    again = hardy_suite(range(-9, -2), (0.05, 0.1, 0.3), 1.0, trials=100, seed=0)
    assert [(t.lhs, t.rhs) for t in again] == [(t.lhs, t.rhs) for t in trials]


def test_hardy_suite_needs_combinations():
    with pytest.raises(DomainError):
        hardy_suite([], (0.1,), 1.0, trials=1)


def test_splitting_at_the_core_radius(sol_3_005):
    assert splitting_indices(sol_3_005, sol_3_005.r0, 256) == (0, 0, 1)
    assert splitting_check(sol_3_005, sol_3_005.r0, 256)


def test_splitting_without_potential(sol_3_01):
    assert splitting_indices(sol_3_01, 0.5, 64, potential=_zero) == (0, 0, 0)
    assert splitting_check(sol_3_01, 0.5, 64, potential=_zero)


def test_splitting_rejects_radius(sol_3_01):
    with pytest.raises(DomainError):
        splitting_check(sol_3_01, 1.0, 64)


@pytest.mark.slow
@pytest.mark.parametrize('r0', [0.1, 0.05])
@pytest.mark.parametrize('N', range(3, 10))
def test_index_and_quotient_at_acceptance_size(N, r0):
    sol = solution_for(N, r0)
    counts = [radial_morse_index(sol, a, b, 2048) for a, b in ((0.0, r0), (r0, 1.0), (0.0, 1.0))]
    assert [report.negative_count for report in counts] == [0, 0, 1]
    assert all(report.refinement_consistent for report in counts)

    for n in (2048, 4096):
        assert stability_quotient(sol, r0, n) >= N - 1 - 1e-9

    coarse = smallest_eigenvalue(assemble_form(sol, build_grid(0.0, 1.0, 2048, layer=sol.layer)))
    fine = smallest_eigenvalue(assemble_form(sol, build_grid(0.0, 1.0, 4096, layer=sol.layer)))
    assert coarse < 0.0 and fine < 0.0
    assert abs(fine - coarse) < 1e-2 * abs(fine)

import math

import numpy as np
import pytest

import libs.quadrature as quadrature
from libs.errors import QuadratureError


def test_adaptive_finite_interval():
    assert quadrature.adaptive(math.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-13)


def test_adaptive_infinite_interval():
    assert quadrature.adaptive(lambda x: math.exp(-x), 0.0, np.inf) == pytest.approx(1.0, rel=1e-12)


def test_adaptive_breakpoints_outside_interval_are_dropped():
    value = quadrature.adaptive(lambda x: abs(x - 0.3), 0.0, 1.0, points=[-1.0, 0.3, 2.0])
    assert value == pytest.approx(0.045 + 0.245, rel=1e-13)


def test_adaptive_empty_interval():
    assert quadrature.adaptive(math.exp, 0.5, 0.5) == 0.0


def test_adaptive_reports_divergence():
    with pytest.raises(QuadratureError):
        quadrature.adaptive(lambda x: 1.0 / x, 0.0, 1.0)


def test_gauss_legendre_rule():
    nodes, weights = quadrature.gauss_legendre(4)
    assert weights.sum() == pytest.approx(2.0, rel=1e-15)
    assert not weights.flags.writeable
    assert np.sum(weights * nodes ** 6) == pytest.approx(2.0 / 7.0, rel=1e-14)


def test_composite_is_exact_for_polynomials():
    pieces = quadrature.composite(lambda x: x ** 15, np.array([0.0, 0.5, 1.0]), order=8)
    assert pieces.shape == (2,)
    assert pieces.sum() == pytest.approx(1.0 / 16.0, rel=1e-14)


def test_panels_are_independent():
    values = quadrature.panels(lambda x: x ** 2, np.array([0.0, 1.0]), np.array([1.0, 3.0]), order=4)
    np.testing.assert_allclose(values, [1.0 / 3.0, 26.0 / 3.0], rtol=1e-14)


def test_composite_of_single_edge_is_empty():
    assert quadrature.composite(np.exp, np.array([0.0])).size == 0

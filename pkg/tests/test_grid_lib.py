import numpy as np
import pytest

import config
from libs.errors import DomainError
from libs.grid_lib import Grading, RadialGrid, build_grid


def test_geometric_toward_origin():
    grid = build_grid(0.0, 1.0, 64)
    assert grid.grading is Grading.GEOMETRIC
    assert grid.nodes.size == 65
    assert grid.nodes[0] == 0.0 and grid.nodes[-1] == 1.0
    assert grid.nodes[1] <= config.FIRST_INTERVAL_MAX
    assert np.all(np.diff(grid.nodes) > 0.0)


def test_uniform_away_from_origin():
    grid = build_grid(0.25, 0.75, 32)
    assert grid.grading is Grading.UNIFORM
    np.testing.assert_allclose(np.diff(grid.nodes), 0.5 / 32, rtol=1e-12)


def test_layer_receives_its_share():
    grid = build_grid(0.0, 1.0, 64, layer=(0.2, 0.3))
    assert grid.intervals == 64
    inside = np.count_nonzero((grid.nodes >= 0.2) & (grid.nodes <= 0.3))
    assert inside >= int(config.LAYER_FRACTION * 64) + 1
    assert 0.2 in grid.nodes and 0.3 in grid.nodes


def test_layer_clipped_to_interval():
    grid = build_grid(0.2, 1.0, 64, layer=(0.2, 0.3))
    assert grid.nodes[0] == 0.2 and grid.nodes[-1] == 1.0
    assert grid.intervals == 64
    assert np.all(np.diff(grid.nodes) > 0.0)


def test_layer_outside_interval_is_ignored():
    np.testing.assert_array_equal(build_grid(0.0, 0.1, 32, layer=(0.2, 0.3)).nodes, build_grid(0.0, 0.1, 32).nodes)


def test_layer_reaching_right_end():
    grid = build_grid(0.0, 1.0, 64, layer=(0.5, 1.0))
    assert grid.intervals == 64
    assert grid.nodes[-1] == 1.0
    assert np.all(np.diff(grid.nodes) > 0.0)


def test_weight():
    grid = build_grid(0.0, 1.0, 16, grading='uniform')
    np.testing.assert_allclose(grid.weight(3), grid.nodes ** 2)


@pytest.mark.parametrize('a, b, n', [(0.5, 0.5, 32), (0.6, 0.2, 32), (-0.1, 1.0, 32), (0.0, 1.5, 32), (0.0, 1.0, 8)])
def test_rejects_invalid(a, b, n):
    with pytest.raises(DomainError):
        build_grid(a, b, n)


def test_grid_invariants():
    nodes = np.linspace(0.0, 1.0, 17)
    RadialGrid(0.0, 1.0, nodes, Grading.UNIFORM)
    with pytest.raises(DomainError):
        RadialGrid(0.0, 1.0, nodes[::-1], Grading.UNIFORM)
    with pytest.raises(DomainError):
        RadialGrid(0.0, 1.0, np.linspace(0.0, 1.0, 9), Grading.UNIFORM)
    with pytest.raises(DomainError):
        RadialGrid(0.1, 1.0, nodes, Grading.UNIFORM)

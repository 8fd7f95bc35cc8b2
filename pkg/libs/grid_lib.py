import enum
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

import config
from libs.errors import DomainError

logger = logging.getLogger(__name__)


class Grading(str, enum.Enum):
    UNIFORM = 'uniform'
    GEOMETRIC = 'geometric'


@dataclass(frozen=True)
class RadialGrid:
    a: float
    b: float
    nodes: np.ndarray
    grading: Grading

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, 'nodes', nodes)
        if nodes.ndim != 1 or nodes.size < config.MIN_GRID_INTERVALS + 1:
            raise DomainError(f'a radial grid needs at least {config.MIN_GRID_INTERVALS} intervals')
        if nodes[0] != self.a or nodes[-1] != self.b:
            raise DomainError('grid nodes must start at a and end at b')
        if np.any(np.diff(nodes) <= 0.0):
            raise DomainError('grid nodes must be strictly increasing')
        nodes.setflags(write=False)

    @property
    def intervals(self) -> int:
        return self.nodes.size - 1

    def weight(self, N: int) -> np.ndarray:
        return self.nodes ** (N - 1)


def _graded_nodes(a: float, b: float, n: int, grading: Grading) -> np.ndarray:
    if n == 1:
        return np.array([a, b])
    if grading is Grading.UNIFORM:
        return np.linspace(a, b, n + 1)
    if a > 0.0:
        return np.geomspace(a, b, n + 1)
    # first interval below FIRST_INTERVAL_MAX, geometric from there on
    first = min(config.FIRST_INTERVAL_MAX, (b - a) / n)
    return np.concatenate([[0.0], np.geomspace(first, b, n)])


def build_grid(a: float, b: float, n: int, grading: Optional[Grading] = None,
               layer: Optional[tuple] = None) -> RadialGrid:
    """
    Graded mesh of n intervals on [a, b].
    :param grading: defaults to geometric toward a when a = 0, uniform otherwise
    :param layer: optional window (lo, hi) that receives LAYER_FRACTION of the intervals uniformly
    """
    if not 0.0 <= a < b <= 1.0:
        raise DomainError(f'grid interval must satisfy 0 <= a < b <= 1, got [{a!r}, {b!r}]')
    if n < config.MIN_GRID_INTERVALS:
        raise DomainError(f'grid needs n >= {config.MIN_GRID_INTERVALS} intervals, got {n}')
    if grading is None:
        grading = Grading.GEOMETRIC if a == 0.0 else Grading.UNIFORM
    grading = Grading(grading)

    lo, hi = (max(a, layer[0]), min(b, layer[1])) if layer else (b, b)
    if hi - lo <= 0.0:
        return RadialGrid(a, b, _graded_nodes(a, b, n, grading), grading)

    n_layer = max(1, int(round(config.LAYER_FRACTION * n)))
    rest = n - n_layer
    left_len, right_len = lo - a, b - hi
    total = left_len + right_len
    n_left = int(round(rest * left_len / total)) if total > 0 else 0
    if left_len > 0:
        n_left = max(n_left, 1)
    n_right = rest - n_left
    if right_len > 0 and n_right < 1:
        n_right, n_left = 1, n_left - 1
    if right_len <= 0:
        n_layer += n_right
        n_right = 0

    pieces = []
    if n_left > 0:
        pieces.append(_graded_nodes(a, lo, n_left, grading)[:-1])
    pieces.append(np.linspace(lo, hi, n_layer + 1))
    if n_right > 0:
        right_grading = Grading.GEOMETRIC if grading is Grading.GEOMETRIC else Grading.UNIFORM
        pieces.append(_graded_nodes(hi, b, n_right, right_grading)[1:])
    nodes = np.concatenate(pieces)
    nodes[0], nodes[-1] = a, b
    logger.debug('grid [%g, %g]: %d left, %d layer, %d right intervals', a, b, n_left, n_layer, n_right)
    return RadialGrid(a, b, nodes, grading)

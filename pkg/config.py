import os


def _env(name: str, default):
    value = os.getenv(f'RADIAL_LAB_{name}')
    if value is None:
        return default
    if isinstance(default, tuple):
        return tuple(float(v) for v in value.split(','))
    return type(default)(value)


# quadrature
QUAD_EPSREL = _env('QUAD_EPSREL', 1e-12)
QUAD_EPSABS = _env('QUAD_EPSABS', 1e-14)
QUAD_LIMIT = _env('QUAD_LIMIT', 200)
KERNEL_CUTOFF = _env('KERNEL_CUTOFF', 60.0)
KERNEL_PANEL = _env('KERNEL_PANEL', 0.25)

# admissible parameters
N_MIN = _env('N_MIN', 3)
N_MAX = _env('N_MAX', 9)
R0_MIN = _env('R0_MIN', 1e-3)
R0_MAX = _env('R0_MAX', 0.99)

# grids
DEFAULT_GRID_N = _env('DEFAULT_GRID_N', 2048)
CACHE_NODES = _env('CACHE_NODES', 4096)
MIN_INDEX_GRID_N = _env('MIN_INDEX_GRID_N', 64)
MIN_NORM_GRID_N = _env('MIN_NORM_GRID_N', 256)
MIN_GRID_INTERVALS = _env('MIN_GRID_INTERVALS', 16)
FIRST_INTERVAL_MAX = _env('FIRST_INTERVAL_MAX', 1e-6)
LAYER_FRACTION = _env('LAYER_FRACTION', 0.25)

# inertia / bisection
ZERO_PIVOT_RTOL = _env('ZERO_PIVOT_RTOL', 1e-13)
PIVOT_PERTURBATION = _env('PIVOT_PERTURBATION', 1e-12)
MAX_PERTURBATIONS = _env('MAX_PERTURBATIONS', 3)
BISECTION_RTOL = _env('BISECTION_RTOL', 1e-10)

# verification
RESIDUAL_TOL = _env('RESIDUAL_TOL', 1e-8)
CERTIFIED_R0_MAX = _env('CERTIFIED_R0_MAX', 0.1)
DEFAULT_R0_SCAN = _env('DEFAULT_R0_SCAN', (0.2, 0.1, 0.05, 0.025, 0.0125))
DEFAULT_WORKERS = _env('DEFAULT_WORKERS', 1)

LOG_LEVEL = _env('LOG_LEVEL', 'WARNING')

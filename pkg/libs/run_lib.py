"""
Command execution behind the CLI: validated run configurations, one record per computed row,
per-row verification and atomic output.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import click
import numpy as np
from scipy import linalg

import config
import libs.norms_lib as norms_lib
import libs.output_lib as output_lib
import libs.spectral_lib as spectral_lib
from libs.errors import LabError
from libs.grid_lib import build_grid
from libs.helpers import format_exponent
from libs.profile_lib import kappa, psi_values
from libs.solution_lib import f_at_r, fprime_at_r, pde_residual, solution_for, u_interpolated, u_values

logger = logging.getLogger(__name__)

QUOTIENT_RTOL = 1e-9
BOUNDARY_TOL = 1e-10
CHECK_NODES = 10001
ACCEPTANCE_NS = (3, 4, 5, 6, 7, 8, 9)
ACCEPTANCE_R0 = (0.2, 0.1, 0.05)
HARDY_ALPHAS = (-9.0, -8.0, -7.0, -6.0, -5.0, -4.0, -3.0)
HARDY_A = (0.05, 0.1, 0.3)
CRITICAL_NS = (3, 4, 5)
CRITICAL_LAMBDAS = (0.5, 0.25, 0.125, 0.0625)
SCALING_TRIPLES = ((3, 4.0, 2.0), (5, 3.0, 2.0), (9, 2.0, 1.5))
SCALING_RTOL = 0.10
LINF_SLACK = 0.1


class Command(str, enum.Enum):
    CONSTRUCT = 'construct'
    INDEX = 'index'
    QUOTIENT = 'quotient'
    HARDY = 'hardy'
    SCAN = 'scan'
    CRITICAL = 'critical'
    VERIFY_ALL = 'verify-all'


@dataclass
class RunConfig:
    command: Command
    N: list = field(default_factory=list)
    r0: list = field(default_factory=list)
    p: Optional[float] = None
    q: Optional[float] = None
    pairs: list = field(default_factory=list)
    grid_n: int = config.DEFAULT_GRID_N
    output_path: Optional[str] = None
    format: str = 'csv'
    seed: int = 0
    interval: tuple = (0.0, 1.0)
    alpha: list = field(default_factory=list)
    a: list = field(default_factory=list)
    b: float = 1.0
    trials: int = 100
    lambdas: list = field(default_factory=list)
    workers: int = config.DEFAULT_WORKERS
    table_path: Optional[str] = None

    @property
    def exponent_pairs(self) -> list:
        if self.pairs:
            return list(self.pairs)
        return [(self.p, self.q)] if self.p is not None and self.q is not None else []


@dataclass(frozen=True)
class ConstructRecord:
    N: int
    r0: float
    u0: float
    u_at_one: float
    psi_at_one: float
    psi_ceiling: float
    residual: float
    passed: bool
    error: Optional[str] = None

    def summary(self) -> str:
        return (f'construct N={self.N} r0={self.r0:g}: u(0)={self.u0:.12g} residual={self.residual:.3g} '
                f'Psi(1)={self.psi_at_one:.6g} <= {self.psi_ceiling:.6g}')


@dataclass(frozen=True)
class IndexRecord:
    N: int
    r0: float
    a: float
    b: float
    negative_count: int
    refined_count: int
    smallest_eigenvalue: float
    refinement_consistent: bool
    expected: Optional[int]
    passed: bool
    error: Optional[str] = None

    def summary(self) -> str:
        return (f'index N={self.N} r0={self.r0:g} on ({self.a:g}, {self.b:g}): negative_count = '
                f'{self.negative_count} (refined {self.refined_count}, smallest eigenvalue '
                f'{self.smallest_eigenvalue:.6g})')


@dataclass(frozen=True)
class QuotientRecord:
    N: int
    r0: float
    quotient: float
    bound: float
    passed: bool
    error: Optional[str] = None

    def summary(self) -> str:
        return f'quotient N={self.N} r0={self.r0:g}: {self.quotient:.12g} >= {self.bound:g}'


@dataclass(frozen=True)
class HardyRecord:
    trial: int
    alpha: float
    a: float
    b: float
    lhs: float
    rhs: float
    passed: bool
    error: Optional[str] = None

    def summary(self) -> str:
        return f'hardy trial {self.trial} alpha={self.alpha:g} a={self.a:g}: {self.lhs:.12g} >= {self.rhs:.12g}'


@dataclass(frozen=True)
class CriticalRecord:
    N: int
    lam: float
    sup_norm: float
    l1_norm: float
    ratio: float
    boundary_value: float
    residual: float
    passed: bool
    error: Optional[str] = None

    def summary(self) -> str:
        return (f'critical N={self.N} lambda={self.lam:g}: sup={self.sup_norm:.12g} l1={self.l1_norm:.12g} '
                f'u(1)={self.boundary_value:.6g} residual={self.residual:.6g}')


@dataclass(frozen=True)
class CheckRecord:
    name: str
    passed: bool
    detail: str
    error: Optional[str] = None

    def summary(self) -> str:
        return f'{self.name}: {self.detail}'


def _fail(message: str):
    raise click.UsageError(message)


def validate(cfg: RunConfig):
    """
    command specific checks run before any computation
    :raises click.UsageError: naming the violated condition
    """
    command = Command(cfg.command)
    if cfg.format not in ('csv', 'json'):
        _fail(f'--format must be csv or json, got {cfg.format!r}')
    if cfg.grid_n < config.MIN_INDEX_GRID_N:
        _fail(f'--grid-n must be >= {config.MIN_INDEX_GRID_N}, got {cfg.grid_n}')
    if cfg.workers < 1:
        _fail(f'--workers must be >= 1, got {cfg.workers}')
    for N in cfg.N:
        if not config.N_MIN <= N <= config.N_MAX:
            _fail(f'N must satisfy {config.N_MIN} <= N <= {config.N_MAX}, got N={N}')
    for r0 in cfg.r0:
        if not config.R0_MIN <= r0 <= config.R0_MAX:
            _fail(f'r0 must satisfy {config.R0_MIN} <= r0 <= {config.R0_MAX}, got r0={r0!r}')

    if command in (Command.CONSTRUCT, Command.INDEX, Command.QUOTIENT, Command.SCAN):
        if not cfg.N or not cfg.r0:
            _fail(f'{command.value} needs --N and --r0')
    if command is Command.INDEX:
        a, b = cfg.interval
        if not 0.0 <= a < b <= 1.0:
            _fail(f'--interval must satisfy 0 <= a < b <= 1, got {a!r},{b!r}')
    if command is Command.SCAN:
        if cfg.grid_n < config.MIN_NORM_GRID_N:
            _fail(f'--grid-n must be >= {config.MIN_NORM_GRID_N} for norms, got {cfg.grid_n}')
        pairs = cfg.exponent_pairs
        if not pairs:
            _fail('scan needs --p and --q or --pairs')
        for N in cfg.N:
            for p, q in pairs:
                if not 1.0 <= q < p:
                    _fail(f'exponents must satisfy 1 <= q < p <= inf, got p={p!r} q={q!r}')
                if not p > N / (N - 2):
                    _fail(f'p must satisfy p > N/(N-2) = {N / (N - 2):.6g} for N={N}, got p={p!r}')
        if any(b >= a for a, b in zip(cfg.r0, cfg.r0[1:])):
            _fail(f'--r0 values must be strictly decreasing, got {cfg.r0}')
    if command is Command.HARDY:
        if cfg.trials < 1:
            _fail(f'--trials must be >= 1, got {cfg.trials}')
        for a in cfg.a:
            if not 0.0 < a < cfg.b:
                _fail(f'--a must satisfy 0 < a < b = {cfg.b!r}, got {a!r}')
    if command is Command.CRITICAL:
        if cfg.grid_n < config.MIN_NORM_GRID_N:
            _fail(f'--grid-n must be >= {config.MIN_NORM_GRID_N} for norms, got {cfg.grid_n}')
        for lam in cfg.lambdas:
            if not 0.0 < lam <= 1.0:
                _fail(f'lambda must satisfy 0 < lambda <= 1, got {lam!r}')


def _is_certified(r0: float) -> bool:
    return r0 <= config.CERTIFIED_R0_MAX


def construct_record(N: int, r0: float, n: int) -> ConstructRecord:
    sol = solution_for(N, r0)
    residual = pde_residual(sol, build_grid(0.0, 1.0, n, layer=sol.layer))
    u_at_one = float(u_values(sol, 1.0))
    psi_at_one = float(psi_values(sol.profile.params, 1.0))
    ceiling = kappa(N) * r0 ** N
    r = np.linspace(0.0, 1.0, CHECK_NODES)
    signs_ok = bool(np.all(f_at_r(sol, r) >= 0.0) and np.all(fprime_at_r(sol, r) >= 0.0))
    passed = (residual <= config.RESIDUAL_TOL and abs(u_at_one) <= BOUNDARY_TOL
              and psi_at_one <= ceiling * (1.0 + 1e-12) and signs_ok)
    return ConstructRecord(N, r0, sol.u0, u_at_one, psi_at_one, ceiling, residual, passed)


def expected_index(a: float, b: float, r0: float) -> Optional[int]:
    """index established by the construction on (a, b), None where nothing is claimed"""
    if b <= r0 or (a == r0 and b == 1.0):
        return 0
    if a == 0.0 and b == 1.0 and _is_certified(r0):
        return 1
    return None


def index_record(N: int, r0: float, a: float, b: float, n: int) -> IndexRecord:
    report = spectral_lib.radial_morse_index(solution_for(N, r0), a, b, n)
    expected = expected_index(a, b, r0)
    passed = report.refinement_consistent and (expected is None or report.negative_count == expected)
    return IndexRecord(N, r0, a, b, report.negative_count, report.refined_count, report.smallest_eigenvalue,
                       report.refinement_consistent, expected, passed)


def quotient_record(N: int, r0: float, n: int) -> QuotientRecord:
    value = spectral_lib.stability_quotient(solution_for(N, r0), r0, n)
    bound = N - 1.0
    return QuotientRecord(N, r0, value, bound, value >= bound - QUOTIENT_RTOL)


def scan_row_passed(row: norms_lib.ScanRow) -> bool:
    if row.error is not None:
        return False
    lp_lower, lq_upper, linf_lower = norms_lib.norm_bounds(row.N, row.p, row.q, row.r0)
    slack = 1e-9
    return (row.index_inner == 0 and row.index_annulus == 0
            and (not _is_certified(row.r0) or row.index_whole == 1)
            and row.quotient_annulus >= row.N - 1 - QUOTIENT_RTOL
            and row.residual <= config.RESIDUAL_TOL
            and row.norm_p >= lp_lower * (1.0 - slack) and row.norm_q <= lq_upper * (1.0 + slack)
            and (not math.isinf(row.p) or row.norm_p >= linf_lower))


def scan_summary(row: norms_lib.ScanRow) -> str:
    head = f'scan N={row.N} r0={row.r0:g} p={format_exponent(row.p)} q={format_exponent(row.q)}'
    if row.error is not None:
        return f'{head}: error {row.error}'
    return (f'{head}: ratio={row.ratio_q_over_p:.12g} indices {row.index_inner}/{row.index_annulus}/'
            f'{row.index_whole} quotient={row.quotient_annulus:.6g}')


def _guarded(build, failed):
    try:
        return build()
    except LabError as e:
        logger.warning('%s', e)
        return failed(str(e))


def _run_construct(cfg: RunConfig) -> list:
    nan = math.nan
    records = [_guarded(lambda: construct_record(N, r0, cfg.grid_n),
                        lambda e: ConstructRecord(N, r0, nan, nan, nan, nan, nan, False, e))
               for N in cfg.N for r0 in cfg.r0]
    if cfg.table_path:
        write_table(cfg)
    return records


def write_table(cfg: RunConfig):
    """plot-ready samples r, u, u_r, f, f' of every configured solution"""
    rows = []
    for N in cfg.N:
        for r0 in cfg.r0:
            sol = solution_for(N, r0)
            r = build_grid(0.0, 1.0, cfg.grid_n, layer=sol.layer).nodes
            u = u_interpolated(sol, r)
            u_r, f, fprime = sol.u_r(r), f_at_r(sol, r), fprime_at_r(sol, r)
            rows.extend({'N': N, 'r0': r0, 'r': float(r[i]), 'u': float(u[i]), 'u_r': float(u_r[i]),
                         'f': float(f[i]), 'fprime': float(fprime[i])} for i in range(r.size))
    output_lib.write_atomic(cfg.table_path, output_lib.render(rows, cfg.format))


def _run_index(cfg: RunConfig) -> list:
    a, b = cfg.interval
    nan = math.nan
    return [_guarded(lambda: index_record(N, r0, a, b, cfg.grid_n),
                     lambda e: IndexRecord(N, r0, a, b, -1, -1, nan, False, None, False, e))
            for N in cfg.N for r0 in cfg.r0]


def _run_quotient(cfg: RunConfig) -> list:
    return [_guarded(lambda: quotient_record(N, r0, cfg.grid_n),
                     lambda e: QuotientRecord(N, r0, math.nan, N - 1.0, False, e))
            for N in cfg.N for r0 in cfg.r0]


def _run_hardy(cfg: RunConfig) -> list:
    alphas = cfg.alpha or list(HARDY_ALPHAS)
    a_values = cfg.a or list(HARDY_A)
    trials = spectral_lib.hardy_suite(alphas, a_values, cfg.b, cfg.trials, cfg.seed)
    return [HardyRecord(i, t.alpha, t.a, t.b, t.lhs, t.rhs, t.passed) for i, t in enumerate(trials)]


def _run_critical(cfg: RunConfig) -> list:
    records = []
    for N in cfg.N or list(CRITICAL_NS):
        previous = None
        for lam in sorted(cfg.lambdas or list(CRITICAL_LAMBDAS), reverse=True):
            try:
                point = norms_lib.critical_family(N, lam, cfg.grid_n)
            except LabError as e:
                nan = math.nan
                records.append(CriticalRecord(N, lam, nan, nan, nan, nan, nan, False, str(e)))
                continue
            increasing = previous is None or math.isnan(previous) or point.ratio > previous
            records.append(CriticalRecord(N, lam, point.sup_norm, point.l1_norm, point.ratio,
                                          point.boundary_value, point.residual, increasing))
            previous = point.ratio
    return records


def _check(name: str, passed: bool, detail: str) -> CheckRecord:
    return CheckRecord(name, bool(passed), detail)


def verify_all(cfg: RunConfig) -> list:
    """every acceptance check at the configured grid size, one record per check"""
    n = cfg.grid_n
    Ns = cfg.N or list(ACCEPTANCE_NS)
    r0_values = cfg.r0 or list(ACCEPTANCE_R0)
    checks = []

    def _guard(name, run):
        try:
            checks.extend(run())
        except LabError as e:
            logger.warning('%s failed: %s', name, e)
            checks.append(CheckRecord(name, False, 'error', str(e)))

    def _construction():
        return [_check(f'construction N={r.N} r0={r.r0:g}', r.passed, r.summary())
                for r in (construct_record(N, r0, n) for N in Ns for r0 in r0_values)]

    def _quotients():
        return [_check(f'stability quotient N={r.N} r0={r.r0:g}', r.passed, r.summary())
                for r in (quotient_record(N, r0, n) for N in Ns for r0 in r0_values)]

    def _indices():
        out = []
        for N in Ns:
            for r0 in (r0 for r0 in r0_values if _is_certified(r0)):
                for a, b in ((0.0, r0), (r0, 1.0), (0.0, 1.0)):
                    r = index_record(N, r0, a, b, n)
                    out.append(_check(f'index N={N} r0={r0:g} ({a:g}, {b:g})', r.passed, r.summary()))
        return out

    def _scaling():
        out = []
        for N, p, q in SCALING_TRIPLES:
            rows = norms_lib.scan([N], [(p, q)], config.DEFAULT_R0_SCAN, max(n, config.MIN_NORM_GRID_N),
                                  cfg.workers)
            slope, _, _ = norms_lib.fit_exponent(rows)
            target, in_regime = norms_lib.predicted_exponent(N, p, q)
            if in_regime:
                passed = abs(slope - target) <= SCALING_RTOL * target and norms_lib.obeys_upper_law(rows, target)
            else:
                passed = 0.0 < slope < N * (1.0 / q - 1.0 / p)
            passed = passed and norms_lib.is_decreasing([row.ratio_q_over_p for row in rows])
            out.append(_check(f'scaling N={N} p={p:g} q={q:g}', passed,
                              f'slope {slope:.6g}, predicted {target:.6g} (in regime: {in_regime})'))
        return out

    def _linf():
        out = []
        for N, q in ((3, 4.0), (3, 2.0)):
            rows = norms_lib.scan([N], [(math.inf, q)], config.DEFAULT_R0_SCAN, max(n, config.MIN_NORM_GRID_N),
                                  cfg.workers)
            slope, _, _ = norms_lib.fit_exponent(rows)
            target, in_regime = norms_lib.predicted_exponent(N, math.inf, q)
            passed = slope <= -target + LINF_SLACK if in_regime else slope < 0.0
            out.append(_check(f'sup-norm divergence N={N} q={q:g}', passed,
                              f'slope {slope:.6g}, bound {-target:.6g} (in regime: {in_regime})'))
        return out

    def _hardy():
        trials = spectral_lib.hardy_suite(HARDY_ALPHAS, HARDY_A, 1.0, 100, cfg.seed)
        passed = sum(t.passed for t in trials)
        return [_check('hardy suite', passed == len(trials), f'{passed}/{len(trials)} pass')]

    def _oracle():
        rng = np.random.default_rng(cfg.seed)
        mismatches = 0
        for _ in range(50):
            m = int(rng.integers(16, 129))
            coefficients = rng.normal(0.0, 30.0, 4)
            dimension = int(rng.integers(3, 10))
            nodes = build_grid(0.0, 1.0, m, grading='uniform').nodes
            pencil = spectral_lib.make_pencil(nodes, lambda r: r ** (dimension - 1), lambda r: r ** (dimension - 1),
                                              np.polynomial.Polynomial(coefficients),
                                              (spectral_lib.Boundary.NATURAL, spectral_lib.Boundary.DIRICHLET))
            K, M = pencil.to_dense()
            dense = int(np.sum(linalg.eigh(K, M, eigvals_only=True) < 0.0))
            mismatches += dense != spectral_lib.inertia(pencil, 0.0)
        return [_check('inertia oracle', mismatches == 0, f'{50 - mismatches}/50 match')]

    def _splitting():
        out = []
        for N in Ns:
            for r0 in (r0 for r0 in r0_values if _is_certified(r0)):
                holds = spectral_lib.splitting_check(solution_for(N, r0), r0, n)
                out.append(_check(f'splitting N={N} r0={r0:g}', holds, f'split at r0 holds: {holds}'))
        return out

    def _critical():
        records = _run_critical(RunConfig(Command.CRITICAL, grid_n=max(n, config.MIN_NORM_GRID_N)))
        return [_check(f'critical family N={r.N} lambda={r.lam:g}', r.passed, r.summary()) for r in records]

    for name, run in (('construction', _construction), ('stability quotient', _quotients), ('index', _indices),
                      ('scaling', _scaling), ('sup-norm divergence', _linf), ('hardy suite', _hardy),
                      ('inertia oracle', _oracle), ('splitting', _splitting), ('critical family', _critical)):
        _guard(name, run)
    return checks


def _run_scan(cfg: RunConfig) -> list:
    return norms_lib.scan(cfg.N, cfg.exponent_pairs, cfg.r0, cfg.grid_n, cfg.workers)


_RUNNERS = {
    Command.CONSTRUCT: _run_construct,
    Command.INDEX: _run_index,
    Command.QUOTIENT: _run_quotient,
    Command.HARDY: _run_hardy,
    Command.SCAN: _run_scan,
    Command.CRITICAL: _run_critical,
    Command.VERIFY_ALL: verify_all,
}


def _write_error(cfg: RunConfig, command: Command, message: str):
    """machine-readable error record, JSON mode only"""
    if cfg.output_path and cfg.format == 'json':
        output_lib.write_atomic(cfg.output_path, output_lib.to_json([{'command': command.value, 'error': message}]))


def run(cfg: RunConfig) -> int:
    """
    Executes a validated configuration, echoes one summary line per row and writes the output file.
    :return: exit status, 0 iff every row passed its verification
    """
    command = Command(cfg.command)
    try:
        validate(cfg)
    except click.UsageError as e:
        _write_error(cfg, command, e.message)
        raise
    try:
        records = _RUNNERS[command](cfg)
    except LabError as e:
        logger.error('%s failed: %s', command.value, e)
        click.echo(f'{command.value}: error {e}')
        _write_error(cfg, command, str(e))
        return 1

    if command is Command.SCAN:
        passed = [scan_row_passed(row) for row in records]
        lines = [scan_summary(row) for row in records]
        fieldnames = output_lib.SCAN_FIELDS
    else:
        passed = [record.passed for record in records]
        lines = [record.summary() for record in records]
        fieldnames = None
    for line, ok in zip(lines, passed):
        click.echo(f'{line} [{"PASS" if ok else "FAIL"}]')
    click.echo(f'{command.value}: {sum(passed)}/{len(passed)} passed')

    if cfg.output_path:
        output_lib.write_atomic(cfg.output_path, output_lib.render(records, cfg.format, fieldnames))
    return 0 if all(passed) else 1

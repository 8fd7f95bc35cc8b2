import click

import commands.options as options
import config
from libs.run_lib import Command, RunConfig, run


@click.command('scan')
@options.dimensions
@options.radii
@options.exponent_p
@options.exponent_q
@options.pairs
@options.workers
@options.common
@click.pass_context
def scan_command(ctx, N, r0, p, q, pairs, workers, fmt, output_path, grid_n):
    """Norm ratios, indices and stability quotient along decreasing r0."""
    ctx.exit(run(RunConfig(Command.SCAN, N=N or [], r0=r0 or list(config.DEFAULT_R0_SCAN), p=p, q=q,
                           pairs=pairs or [], workers=workers, grid_n=grid_n, output_path=output_path,
                           format=fmt)))

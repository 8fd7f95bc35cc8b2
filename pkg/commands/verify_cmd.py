import click

import commands.options as options
from libs.run_lib import Command, RunConfig, run


@click.command('verify-all')
@options.dimensions
@options.radii
@options.seed
@options.workers
@options.common
@click.pass_context
def verify_command(ctx, N, r0, seed, workers, fmt, output_path, grid_n):
    """Every acceptance check, one record per check."""
    ctx.exit(run(RunConfig(Command.VERIFY_ALL, N=N or [], r0=r0 or [], seed=seed, workers=workers,
                           grid_n=grid_n, output_path=output_path, format=fmt)))

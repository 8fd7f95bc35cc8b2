import click

import commands.options as options
from libs.run_lib import Command, RunConfig, run


@click.command('quotient')
@options.dimensions
@options.radii
@options.common
@click.pass_context
def quotient_command(ctx, N, r0, fmt, output_path, grid_n):
    """Minimum of the weighted stability quotient on the annulus (r0, 1)."""
    ctx.exit(run(RunConfig(Command.QUOTIENT, N=N or [], r0=r0 or [], grid_n=grid_n, output_path=output_path,
                           format=fmt)))

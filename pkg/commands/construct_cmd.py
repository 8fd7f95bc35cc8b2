import click

import commands.options as options
from libs.run_lib import Command, RunConfig, run


@click.command('construct')
@options.dimensions
@options.radii
@click.option('--table', 'table_path', type=click.Path(dir_okay=False), default=None,
              help='also write r, u, u_r, f, fprime samples')
@options.common
@click.pass_context
def construct_command(ctx, N, r0, table_path, fmt, output_path, grid_n):
    """Build solutions and check the equation, boundary value and profile ceiling."""
    ctx.exit(run(RunConfig(Command.CONSTRUCT, N=N or [], r0=r0 or [], grid_n=grid_n, output_path=output_path,
                           format=fmt, table_path=table_path)))

import click

import commands.options as options
from libs.run_lib import Command, RunConfig, run


@click.command('index')
@options.dimensions
@options.radii
@options.interval
@options.common
@click.pass_context
def index_command(ctx, N, r0, interval, fmt, output_path, grid_n):
    """Radial Morse index on an interval, at n and 2n grid intervals."""
    ctx.exit(run(RunConfig(Command.INDEX, N=N or [], r0=r0 or [], interval=interval, grid_n=grid_n,
                           output_path=output_path, format=fmt)))

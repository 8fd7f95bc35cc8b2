import click

import commands.options as options
from libs.run_lib import Command, RunConfig, run


@click.command('critical')
@options.dimensions
@click.option('--lambdas', callback=options.numbers, default=None, help='comma separated lambda values')
@options.common
@click.pass_context
def critical_command(ctx, N, lambdas, fmt, output_path, grid_n):
    """Norms, boundary value and residual of the critical-exponent family."""
    ctx.exit(run(RunConfig(Command.CRITICAL, N=N or [], lambdas=lambdas or [], grid_n=grid_n,
                           output_path=output_path, format=fmt)))

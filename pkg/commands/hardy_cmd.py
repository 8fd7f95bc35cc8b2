import click

import commands.options as options
from libs.run_lib import Command, RunConfig, run


@click.command('hardy')
@click.option('--alpha', callback=options.numbers, default=None, help='exponent or comma separated exponents')
@click.option('--a', 'a', callback=options.numbers, default=None, help='left endpoint or endpoints')
@click.option('--b', 'b', type=float, default=1.0, show_default=True)
@click.option('--trials', type=int, default=100, show_default=True)
@options.seed
@options.common
@click.pass_context
def hardy_command(ctx, alpha, a, b, trials, seed, fmt, output_path, grid_n):
    """Hardy inequality on seeded random polynomial bumps."""
    ctx.exit(run(RunConfig(Command.HARDY, alpha=alpha or [], a=a or [], b=b, trials=trials, seed=seed,
                           grid_n=grid_n, output_path=output_path, format=fmt)))

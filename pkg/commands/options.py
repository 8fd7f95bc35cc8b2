"""click options shared by the commands, parsed with the value-format helpers"""
import click

import config
import libs.helpers as helpers


def _parser(parse):
    def _callback(ctx, param, value):
        if value is None:
            return value
        try:
            return parse(value)
        except ValueError as e:
            raise click.BadParameter(str(e), ctx=ctx, param=param)

    return _callback


dimensions = click.option('--N', 'N', callback=_parser(helpers.parse_int_list), default=None,
                          help='dimension or comma separated dimensions')
radii = click.option('--r0', callback=_parser(helpers.parse_number_list), default=None,
                     help='construction radius or comma separated radii')
grid_n = click.option('--grid-n', type=int, default=config.DEFAULT_GRID_N, show_default=True,
                      help='grid intervals')
output_path = click.option('--out', 'output_path', type=click.Path(dir_okay=False), default=None,
                           help='output file')
output_format = click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv',
                             show_default=True)
seed = click.option('--seed', type=int, default=0, show_default=True)
workers = click.option('--workers', type=int, default=config.DEFAULT_WORKERS, show_default=True)
exponent_p = click.option('--p', callback=_parser(helpers.parse_exponent), default=None,
                          help='larger exponent, a number or inf')
exponent_q = click.option('--q', callback=_parser(helpers.parse_exponent), default=None)
pairs = click.option('--pairs', callback=_parser(helpers.parse_pair_list), default=None,
                     help="exponent pairs such as '4:2,inf:2'")
interval = click.option('--interval', callback=_parser(helpers.parse_interval), default='0,1',
                        show_default=True, help='radial interval a,b')
numbers = _parser(helpers.parse_number_list)


def common(fn):
    for option in (output_format, output_path, grid_n):
        fn = option(fn)
    return fn

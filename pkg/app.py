import logging

import click

import config
from commands.construct_cmd import construct_command
from commands.critical_cmd import critical_command
from commands.hardy_cmd import hardy_command
from commands.index_cmd import index_command
from commands.quotient_cmd import quotient_command
from commands.scan_cmd import scan_command
from commands.verify_cmd import verify_command

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def create_cli():
    @click.group()
    @click.option('--log-level', default=config.LOG_LEVEL, show_default=True,
                  type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
    def cli(log_level):
        """Radial Morse-index laboratory on the unit ball."""
        logging.basicConfig(level=log_level.upper(), format=LOG_FORMAT, force=True)

    register_commands(cli)
    return cli


def register_commands(cli):
    cli.add_command(construct_command)
    cli.add_command(index_command)
    cli.add_command(quotient_command)
    cli.add_command(hardy_command)
    cli.add_command(scan_command)
    cli.add_command(critical_command)
    cli.add_command(verify_command)


if __name__ == '__main__':
    create_cli()()

"""Main CLI entry point for pdrsmith"""
import random
import sys
from dataclasses import dataclass

import click
from rich.console import Console

from pdrsmith.commands import bench, certify, check, corpus, evolve, help_cmd, replay, version
from pdrsmith.config import get_settings
from pdrsmith.errors import PdrsmithError
from pdrsmith.utils import setup_logging

console = Console(stderr=True)

ERROR_EXIT = 3


@dataclass
class GlobalOptions:
    verbosity: int = 0
    seed: int = 0
    artifact_dir: str = None


def parse_seed(value):
    """``n`` or ``random``"""
    if value is None:
        return get_settings().seed
    if str(value).lower() == 'random':
        seed = random.SystemRandom().randrange(1 << 31)
        console.print(f"[dim]seed: {seed}[/dim]")
        return seed
    try:
        return int(value)
    except ValueError:
        raise click.BadParameter(f"'{value}' is neither an integer nor 'random'", param_hint='--seed') from None


class PdrsmithGroup(click.Group):
    """Click group with the pdrsmith exit-code contract: usage and library errors exit 3"""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                              standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else 0
        except click.UsageError as exc:
            if exc.ctx is not None:
                click.echo(exc.ctx.get_help(), err=True)
            click.echo(f"Error: {exc.format_message()}", err=True)
            code = ERROR_EXIT
        except click.ClickException as exc:
            exc.show()
            code = ERROR_EXIT
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = ERROR_EXIT
        except PdrsmithError as exc:
            console.print(f"[red]error:[/red] {exc}", markup=True, highlight=False)
            code = ERROR_EXIT
        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=PdrsmithGroup)
@click.option('-v', '--verbose', 'verbosity', count=True, help='-v for INFO, -vv for DEBUG logging on stderr')
@click.option('--seed', default=None, help="RNG seed: an integer or 'random' (default 0)")
@click.option('--artifact-dir', type=click.Path(file_okay=False), default=None,
              help='Directory for .cert/.cex files (default: beside the input)')
@click.pass_context
def cli(ctx, verbosity, seed, artifact_dir):
    """
    pdrsmith: IC3/PDR model checking with proof-gated heuristic evolution

    Exit codes: 0 SAFE/valid, 1 UNSAFE/invalid, 2 timeout, 3 error.
    """
    setup_logging(verbosity, get_settings().log_level)
    ctx.obj = GlobalOptions(verbosity=verbosity, seed=parse_seed(seed), artifact_dir=artifact_dir)


# Register commands
cli.add_command(check)
cli.add_command(certify)
cli.add_command(replay)
cli.add_command(bench)
cli.add_command(evolve)
cli.add_command(corpus)
cli.add_command(version)
cli.add_command(help_cmd)

if __name__ == '__main__':
    cli()

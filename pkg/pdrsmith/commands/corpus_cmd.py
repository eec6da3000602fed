"""Generate a labelled benchmark suite"""
import click
from rich.console import Console

from pdrsmith.corpus import standard_suite, write_suite

console = Console(stderr=True)


@click.command()
@click.argument('directory', type=click.Path(file_okay=False))
@click.option('--random-count', type=click.IntRange(min=0), default=20, show_default=True,
              help='Number of random AIGs added to the structured families')
@click.option('--binary', is_flag=True, help='Write binary .aig instead of ASCII .aag')
@click.pass_context
def corpus(ctx, directory, random_count, binary):
    """Write a mixed SAFE/UNSAFE suite with a suite.txt listing"""
    seed = ctx.obj.seed if ctx.obj else 0
    items = standard_suite(seed=seed, random_count=random_count)
    listing = write_suite(directory, items, binary=binary)
    console.print(f"[green]✓[/green] {len(items)} instances written, listing at {listing}")
    return 0

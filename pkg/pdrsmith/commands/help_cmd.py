"""
Cheat sheet for the pdrsmith CLI.

Lists commands grouped by workflow; --all adds the slot variant registry and
examples.
"""

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from pdrsmith.ic3.policies import DEFAULT_VARIANTS, REGISTRY

console = Console()

SECTIONS = [
    ("MODEL CHECKING", [
        ("check FILE.aag [--timeout S] [--emit-artifacts]", "Run IC3; prints RESULT and HYP lines"),
        ("check FILE.aag --policy SLOT=VARIANT[,K=V]", "Select a heuristic variant (repeatable)"),
        ("certify FILE.aag FILE.cert", "Validate an inductive invariant"),
        ("replay FILE.aag FILE.cex", "Replay a counterexample trace"),
    ]),
    ("BENCHMARKING", [
        ("corpus DIR [--random-count N] [--binary]", "Generate a labelled suite"),
        ("bench --suite DIR --timeout S --jobs N --out M.json", "Gated suite run with PAR2"),
        ("bench ... --clock effort --plot cactus.png", "Deterministic clock, cactus plot"),
    ]),
    ("EVOLUTION", [
        ("evolve --config run.toml [--rounds N] [--resume]", "Run the champion/challenger loop"),
        ("evolve replay RUN_DIR", "Rebuild the champion from recorded diffs"),
    ]),
]

EXAMPLES = [
    ("Check with artifacts in a separate directory", "pdrsmith --artifact-dir out check c.aag --emit-artifacts"),
    ("Compare push policies on a suite", "pdrsmith bench --suite corpus/ --policy push_prop=stall_skip,limit=4"),
    ("Exit codes", "0 SAFE/valid, 1 UNSAFE/invalid, 2 TIMEOUT, 3 error"),
]


def _section(title, rows):
    grid = Table.grid(padding=(0, 2))
    grid.add_column(style="cyan", no_wrap=True)
    grid.add_column()
    for command, description in rows:
        grid.add_row(f"pdrsmith {command}", description)
    console.print(f"[bold yellow]{title}[/bold yellow]")
    console.print(grid)
    console.print()


def _variant_table():
    table = Table(title="SLOT VARIANTS", show_header=True, header_style="bold magenta")
    table.add_column("Slot", style="cyan")
    table.add_column("Variant")
    table.add_column("Parameters", style="dim")
    for slot, variants in REGISTRY.items():
        for name, params in variants.items():
            label = f"[green]{name}[/green] (default)" if DEFAULT_VARIANTS[slot] == name else name
            table.add_row(slot, label, ", ".join(f"{k}={v}" for k, v in params.items()) or "-")
    return table


@click.command('help')
@click.option('--all', 'show_all', is_flag=True, help='Also list slot variants and examples')
def help_cmd(show_all):
    """Show available commands"""
    console.print(Panel(Text("PDRSMITH HELP", style="bold cyan", justify="center"), border_style="cyan"))
    for title, rows in SECTIONS:
        _section(title, rows)

    if not show_all:
        console.print("[dim]Use 'pdrsmith help --all' for slot variants and examples.[/dim]")
        return None

    console.print(_variant_table())
    console.print()
    console.print("[bold yellow]EXAMPLES[/bold yellow]")
    for description, command in EXAMPLES:
        console.print(f"  [dim]# {description}[/dim]\n  {command}\n")
    return None

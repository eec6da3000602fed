"""Version command"""
import click
from rich.console import Console

import pdrsmith
from pdrsmith.ic3.policies import REGISTRY

console = Console()


@click.command()
def version():
    """Show pdrsmith version information"""
    console.print(f"\n[bold cyan]pdrsmith[/bold cyan] [green]v{pdrsmith.__version__}[/green]")
    console.print("[dim]Engine:[/dim] IC3/PDR with built-in CDCL backend")
    for slot, variants in REGISTRY.items():
        console.print(f"[dim]{slot}:[/dim] {', '.join(variants)}")
    console.print()

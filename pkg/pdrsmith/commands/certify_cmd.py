"""Independent artifact checks: certify (.cert) and replay (.cex)"""
import click
from rich.console import Console

from pdrsmith.aiger import load
from pdrsmith.certify import check_certificate, load_certificate, load_witness, replay_witness
from pdrsmith.encode import TransitionSystem

console = Console(stderr=True)


def _report(outcome):
    if outcome.ok:
        click.echo("VALID")
        return 0
    click.echo(f"INVALID: {outcome.describe()}")
    if outcome.assignment:
        bits = "".join(str(outcome.assignment[k]) for k in sorted(outcome.assignment))
        console.print(f"[dim]latch assignment: {bits}[/dim]")
    return 1


@click.command()
@click.argument('instance', type=click.Path(exists=True, dir_okay=False))
@click.argument('certificate', type=click.Path(exists=True, dir_okay=False))
@click.option('--property', 'property_index', type=click.IntRange(min=0), default=0)
def certify(instance, certificate, property_index):
    """Check that CERTIFICATE is an inductive invariant proving INSTANCE safe"""
    ts = TransitionSystem.from_circuit(load(instance, property_index))
    return _report(check_certificate(ts, load_certificate(certificate)))


@click.command()
@click.argument('instance', type=click.Path(exists=True, dir_okay=False))
@click.argument('witness', type=click.Path(exists=True, dir_okay=False))
def replay(instance, witness):
    """Simulate WITNESS on INSTANCE and confirm it reaches a bad state"""
    w = load_witness(witness)
    ts = TransitionSystem.from_circuit(load(instance, w.property_index))
    return _report(replay_witness(ts, w))

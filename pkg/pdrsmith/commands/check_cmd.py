"""
Model-check one AIGER instance

Standard output carries exactly one ``RESULT:`` line followed by the
``. HYP <counter>: <value>`` instrumentation lines; everything else goes to
standard error. The exit code encodes the verdict (0 SAFE, 1 UNSAFE,
2 TIMEOUT).
"""
import logging
from pathlib import Path

import click
from rich.console import Console

from pdrsmith.aiger import load
from pdrsmith.certify import write_certificate, write_witness
from pdrsmith.config import get_settings
from pdrsmith.encode import TransitionSystem
from pdrsmith.errors import PolicyError
from pdrsmith.ic3 import SAFE, UNSAFE, CheckOptions, Ic3, parse_policy
from pdrsmith.ic3.engine import COUNTERS
from pdrsmith.utils import artifact_paths

console = Console(stderr=True)
logger = logging.getLogger(__name__)


def format_counter(value):
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def result_lines(verdict):
    """RESULT line plus HYP lines in counter order"""
    lines = [f"RESULT: {verdict.status}"]
    for name in COUNTERS:
        if name in verdict.stats:
            lines.append(f". HYP {name}: {format_counter(verdict.stats[name])}")
    return lines


def _policies(specs):
    try:
        return [parse_policy(spec) for spec in specs]
    except PolicyError as exc:
        raise click.BadParameter(str(exc), param_hint='--policy') from None


def write_artifacts(instance, verdict, artifact_dir=None):
    """Write .cert (SAFE) or .cex (UNSAFE); returns the path or None"""
    cert_path, cex_path = artifact_paths(instance, artifact_dir)
    if verdict.status == SAFE:
        target, text = cert_path, write_certificate(verdict.certificate)
    elif verdict.status == UNSAFE:
        target, text = cex_path, write_witness(verdict.witness)
    else:
        return None
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    return target


@click.command()
@click.argument('instance', type=click.Path(exists=True, dir_okay=False))
@click.option('--timeout', type=float, default=None, help='Wall-clock limit in seconds (default PDRSMITH_TIMEOUT)')
@click.option('--policy', 'policies', multiple=True, metavar='SLOT=VARIANT[,K=V...]',
              help='Heuristic slot policy, repeatable')
@click.option('--property', 'property_index', type=click.IntRange(min=0), default=0,
              help='Index of the property to check')
@click.option('--emit-artifacts', is_flag=True, help='Write .cert/.cex next to the instance')
@click.option('--artifact-dir', type=click.Path(file_okay=False), default=None,
              help='Write artifacts here instead')
@click.option('--seed', default=None, help="RNG seed for this run: an integer or 'random'")
@click.option('--debug', is_flag=True, help='Re-verify lemmas and frame invariants as the run goes')
@click.option('--dimacs', type=click.Path(dir_okay=False), default=None,
              help='Dump the frame solver CNF after the run')
@click.pass_context
def check(ctx, instance, timeout, policies, property_index, emit_artifacts, artifact_dir, seed,
          debug, dimacs):
    """Check the safety property of an AIGER circuit"""
    from pdrsmith.cli import parse_seed

    globals_ = ctx.obj
    settings = get_settings()
    options = CheckOptions(
        timeout=timeout if timeout is not None else settings.timeout,
        policies=_policies(policies),
        emit_artifacts=emit_artifacts,
        seed=parse_seed(seed) if seed is not None else (globals_.seed if globals_ else settings.seed),
        debug=debug,
    )
    if options.timeout is not None and options.timeout <= 0:
        options.timeout = None

    ts = TransitionSystem.from_circuit(load(instance, property_index))
    logger.info("%s: %d inputs, %d latches, %d ands", instance, ts.num_inputs, ts.num_latches,
                len(ts.circuit.ands))
    engine = Ic3(ts, options)
    verdict = engine.run()

    if dimacs:
        Path(dimacs).write_text(engine.solver.to_dimacs())
    if emit_artifacts:
        target = write_artifacts(instance, verdict, artifact_dir or (globals_.artifact_dir if globals_ else None))
        if target:
            console.print(f"[dim]wrote {target}[/dim]")

    for line in result_lines(verdict):
        click.echo(line)
    return verdict.exit_code

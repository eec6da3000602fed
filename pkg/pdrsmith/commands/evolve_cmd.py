"""
Evolution commands

    pdrsmith evolve --config run.toml [--rounds N] [--resume]
    pdrsmith evolve replay RUN_DIR [--config run.toml]
"""
from pathlib import Path

import click
from rich.console import Console
from rich.table import Table

from pdrsmith.evolve.loop import Evolution, replay_run
from pdrsmith.evolve.schemas import RunConfig, load_run_config

console = Console(stderr=True)

STATUS_STYLES = {
    'promoted': 'green', 'reverted': 'yellow', 'rejected': 'red', 'apply_failed': 'red',
    'build_failed': 'red', 'gate_failed': 'bold red', 'aborted': 'dim',
}


def _round_table():
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Round", justify="right")
    table.add_column("Mode")
    table.add_column("Scope", style="cyan")
    table.add_column("Status")
    table.add_column("Decision")
    table.add_column("PAR2", justify="right")
    table.add_column("Solved", justify="right")
    return table


def _print_round(record, state):
    style = STATUS_STYLES.get(record.status, 'white')
    par2 = f"{record.par2:.4f}" if record.par2 is not None else '-'
    solved = str(record.solved) if record.solved is not None else '-'
    table = _round_table()
    table.add_row(str(record.round), record.mode, ",".join(record.allowed),
                  f"[{style}]{record.status}[/{style}]", record.decision or '-', par2, solved)
    console.print(table)
    console.print(f"[dim]champion par2 {state.champion_report.par2.avg_sec:.4f} "
                  f"solved {state.champion_report.solved} hash {state.champion_hash[:12]}[/dim]")


@click.group(invoke_without_command=True)
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
              help='Run configuration (TOML or JSON, version = 1)')
@click.option('--rounds', type=click.IntRange(min=0), default=None, help='Stop after N rounds in this invocation')
@click.option('--resume', is_flag=True, help='Continue the run recorded in run_dir')
@click.pass_context
def evolve(ctx, config_path, rounds, resume):
    """Evolve the heuristic slots under proof/witness gates"""
    if ctx.invoked_subcommand is not None:
        return None
    if not config_path:
        raise click.UsageError("--config is required", ctx=ctx)

    config = load_run_config(config_path)
    evolution = Evolution(config)
    with console.status("[bold cyan]Preparing baseline...[/bold cyan]"):
        state = evolution.start(resume=resume)
    console.print(f"[bold]baseline[/bold] par2 {state.champion_report.par2.avg_sec:.4f} "
                  f"solved {state.champion_report.solved}, round {state.round}/{config.total_rounds}")

    records = evolution.run(rounds=rounds, on_round=_print_round)
    promoted = [r.round for r in records if r.promotion == 'PROMOTE']
    console.print(f"[green]✓[/green] {len(records)} round(s), promoted: {promoted or 'none'}")
    click.echo(f"rounds {evolution.state.round}/{config.total_rounds} "
               f"par2 {evolution.state.champion_report.par2.avg_sec:.4f} "
               f"champion {evolution.state.champion_hash}")
    return 0


@evolve.command('replay')
@click.argument('run_dir', type=click.Path(exists=True, file_okay=False))
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Run configuration (default: RUN_DIR/config.json)')
def evolve_replay(run_dir, config_path):
    """Rebuild the champion from recorded diffs and re-run the gate suite"""
    if config_path:
        config = load_run_config(config_path)
    else:
        config = RunConfig.model_validate_json((Path(run_dir) / 'config.json').read_text())
    matches, gate = replay_run(config, run_dir)
    if not matches:
        console.print("[red]rebuilt tree hash differs from the recorded champion[/red]")
    for reason in gate.reasons:
        console.print(f"[red]gate:[/red] {reason}")
    ok = matches and gate.passed
    click.echo(f"REPLAY: {'VALID' if ok else 'INVALID'} hash={'match' if matches else 'mismatch'} "
               f"gate={'passed' if gate.passed else 'failed'}")
    return 0 if ok else 1

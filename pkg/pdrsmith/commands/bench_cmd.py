"""
Benchmark a suite and write a metrics_v1 document

Example:
    pdrsmith bench --suite corpus/ --timeout 5 --jobs 4 --out metrics.json
"""
import click
from rich.console import Console
from rich.table import Table

from pdrsmith.bench import DEFAULT_COMMAND, load_metrics, plot_cactus, run_suite, write_metrics
from pdrsmith.config import get_settings

console = Console(stderr=True)

VERDICT_STYLES = {'SAFE': 'green', 'UNSAFE': 'yellow', 'TIMEOUT': 'red', 'ERROR': 'bold red'}


def _print_report(report):
    table = Table(title=f"Bench ({report.clock} clock, timeout {report.timeout:g}s)",
                  show_header=True, header_style="bold magenta")
    table.add_column("Instance", style="cyan")
    table.add_column("Verdict")
    table.add_column("Seconds", justify="right")
    table.add_column("Gate")
    for r in report.runs:
        style = VERDICT_STYLES.get(r.verdict, 'white')
        table.add_row(r.instance, f"[{style}]{r.verdict}[/{style}]", f"{r.seconds:.2f}",
                      r.gate or (r.error or ''))
    console.print(table)

    buckets = Table(title="Buckets", show_header=True, header_style="bold magenta")
    buckets.add_column("Family", style="cyan")
    buckets.add_column("Runs", justify="right")
    buckets.add_column("Solved", justify="right")
    buckets.add_column("Timeouts", justify="right")
    buckets.add_column("PAR2", justify="right")
    for key, b in report.buckets.items():
        buckets.add_row(key, str(b.runs), str(b.solved), str(b.timeouts), f"{b.par2:.2f}")
    console.print(buckets)


@click.command()
@click.option('--suite', 'suites', multiple=True, required=True,
              help='Directory, listing file or instance path (repeatable)')
@click.option('--timeout', type=click.FloatRange(min=0, min_open=True), default=None,
              help='Per-instance limit in seconds (default PDRSMITH_TIMEOUT)')
@click.option('--jobs', type=click.IntRange(min=1), default=None, help='Concurrent instances (default PDRSMITH_JOBS)')
@click.option('--out', type=click.Path(dir_okay=False), default='metrics.json', show_default=True)
@click.option('--clock', type=click.Choice(['wall', 'effort']), default='wall', show_default=True)
@click.option('--policy', 'policies', multiple=True, metavar='SLOT=VARIANT[,K=V...]',
              help='Slot policy passed to every check run')
@click.option('--plot', type=click.Path(dir_okay=False), default=None, help='Write a cactus plot (png)')
@click.option('--compare', 'compare', multiple=True, type=click.Path(exists=True, dir_okay=False),
              help='Earlier metrics.json to include in the plot (repeatable)')
@click.option('--quiet', '-q', is_flag=True, help='No per-instance table')
@click.pass_context
def bench(ctx, suites, timeout, jobs, out, clock, policies, plot, compare, quiet):
    """Run a suite under a fixed timeout and compute PAR2"""
    settings = get_settings()
    timeout = timeout or settings.timeout
    jobs = jobs or settings.jobs
    command = list(DEFAULT_COMMAND)
    for spec in policies:
        command += ['--policy', spec]
    artifact_dir = ctx.obj.artifact_dir if ctx.obj else None

    def progress(record):
        style = VERDICT_STYLES.get(record.verdict, 'white')
        console.print(f"  {record.instance:<28} [{style}]{record.verdict:<8}[/{style}] {record.seconds:8.2f}s")

    report = run_suite(list(suites), timeout, parallelism=jobs, artifact_dir=artifact_dir,
                       command=command, clock=clock, progress=None if quiet else progress)
    path = write_metrics(report, out)
    if not quiet:
        _print_report(report)
    console.print(f"[dim]metrics written to {path}[/dim]")

    if plot:
        reports = {'current': report}
        for other in compare:
            reports[other] = load_metrics(other)
        plot_cactus(reports, plot)
        console.print(f"[dim]plot written to {plot}[/dim]")

    click.echo(f"solved {report.solved}/{len(report.runs)} safe {report.safe_count} unsafe {report.unsafe_count} "
               f"timeouts {report.timeouts} failed {report.failed} par2 {report.par2.avg_sec:.2f}")
    return 0

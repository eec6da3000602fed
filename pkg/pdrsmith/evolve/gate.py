"""
Hard gates and the promotion rule

A challenger's numbers are only looked at once its artifacts check out.
promote() accepts GatePassedReport objects, which only admit_report() builds.
"""
import logging
from dataclasses import dataclass, field

from pdrsmith.bench import run_suite
from pdrsmith.errors import InternalError, SuiteMismatchError

logger = logging.getLogger(__name__)

PROMOTE = 'PROMOTE'
REVERT = 'REVERT'


@dataclass(frozen=True)
class BenchSettings:
    """How a checkout is benchmarked"""
    timeout: float
    parallelism: int = 1
    command: tuple = ()
    pythonpath: tuple = ()
    clock: str = 'wall'
    effort_rate: float = 10000.0


def bench_checkout(checkout, suite, settings, artifact_dir=None):
    kwargs = {}
    if settings.command:
        kwargs['command'] = list(settings.command)
    return run_suite(
        suite, settings.timeout, parallelism=settings.parallelism, artifact_dir=artifact_dir,
        cwd=str(checkout), pythonpath=[str(checkout)] + [str(p) for p in settings.pythonpath],
        clock=settings.clock, effort_rate=settings.effort_rate, **kwargs,
    )


def gate_failures(report):
    """Reasons a report cannot be trusted; empty when every answer validated"""
    reasons = []
    for r in report.runs:
        if r.verdict == 'ERROR':
            reasons.append(f"{r.instance}: {r.error or 'run failed'}")
        elif r.verdict in ('SAFE', 'UNSAFE') and not r.ok:
            reasons.append(f"{r.instance}: {r.verdict} {r.gate}")
    return reasons


@dataclass(frozen=True)
class GatePassedReport:
    report: object
    _token: object = field(default=None, repr=False, compare=False)


_ADMITTED = object()


def admit_report(report):
    """
    Wrap a report for promotion.

    Returns:
        (GatePassedReport, []) or (None, reasons)
    """
    reasons = gate_failures(report)
    if reasons:
        return None, reasons
    return GatePassedReport(report, _ADMITTED), []


@dataclass
class GateResult:
    passed: bool
    reasons: list
    report: object


def hard_gate(checkout, gate_suite, settings, artifact_dir=None):
    """
    Run the gate suite on a built checkout.

    Passes iff every SAFE/UNSAFE answer's artifact validates, every exit code
    matches its RESULT line, nothing crashed and every labelled instance got
    its expected verdict (timeouts are tolerated).
    """
    report = bench_checkout(checkout, gate_suite, settings, artifact_dir)
    reasons = gate_failures(report)
    if reasons:
        logger.warning("gate failed: %s", "; ".join(reasons))
    return GateResult(not reasons, reasons, report)


def promote(champion, challenger, budget=1):
    """
    PROMOTE iff the challenger's PAR2 is strictly lower, it solves at least as
    many instances and loses at most `budget` of the champion's solved ones.
    """
    for side in (champion, challenger):
        if not isinstance(side, GatePassedReport) or side._token is not _ADMITTED:
            raise InternalError("promotion requires gate-passed reports")
    old, new = champion.report, challenger.report
    if sorted(old.instances()) != sorted(new.instances()):
        raise SuiteMismatchError("champion and challenger were benchmarked on different suites")
    lost = old.solved_set() - new.solved_set()
    if new.par2.avg_sec < old.par2.avg_sec and new.solved >= old.solved and len(lost) <= budget:
        return PROMOTE
    return REVERT

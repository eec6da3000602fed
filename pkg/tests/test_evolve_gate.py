import pytest

from pdrsmith.bench import RunRecord, aggregate
from pdrsmith.errors import InternalError, SuiteMismatchError
from pdrsmith.evolve.gate import (
    PROMOTE, REVERT, BenchSettings, GatePassedReport, admit_report, hard_gate, promote,
)


def report(timeout, **runs):
    """runs: instance -> seconds, or None for a timeout"""
    records = []
    for name, seconds in runs.items():
        solved = seconds is not None
        records.append(RunRecord(instance=name, path=f"{name}.aag", verdict='SAFE' if solved else 'TIMEOUT',
                                 wall_time=seconds or timeout, seconds=seconds or timeout, ok=solved,
                                 gate='passed' if solved else None))
    return aggregate(records, timeout)


def admitted(r):
    wrapped, reasons = admit_report(r)
    assert reasons == []
    return wrapped


def test_identical_reports_revert():
    champion = report(1000, a=100.0, b=200.0, c=None)
    assert promote(admitted(champion), admitted(champion)) == REVERT


def test_faster_with_same_solved_set_promotes():
    champion = report(1000, a=100.0, b=200.0, c=None)
    challenger = report(1000, a=50.0, b=100.0, c=None)
    assert challenger.par2.avg_sec == pytest.approx(champion.par2.avg_sec - 50)
    assert promote(admitted(champion), admitted(challenger)) == PROMOTE


def test_losing_two_instances_reverts_under_budget_one():
    champion = report(100, a=10.0, b=10.0, c=None, d=None)
    challenger = report(100, a=None, b=None, c=1.0, d=1.0)
    assert challenger.par2.avg_sec < champion.par2.avg_sec
    assert challenger.solved == champion.solved
    assert promote(admitted(champion), admitted(challenger)) == REVERT
    assert promote(admitted(champion), admitted(challenger), budget=2) == PROMOTE


def test_fewer_solved_reverts():
    champion = report(100, a=90.0, b=90.0)
    challenger = report(100, a=1.0, b=None)
    assert promote(admitted(champion), admitted(challenger)) == REVERT


def test_promotion_requires_admitted_reports():
    r = report(10, a=1.0)
    with pytest.raises(InternalError):
        promote(r, r)
    with pytest.raises(InternalError):
        promote(GatePassedReport(r), admitted(r))


def test_suite_mismatch():
    with pytest.raises(SuiteMismatchError):
        promote(admitted(report(10, a=1.0)), admitted(report(10, b=1.0)))


def test_failed_runs_are_not_admitted():
    bad = RunRecord(instance='x1', path='x1.aag', verdict='SAFE', wall_time=1.0, seconds=1.0, ok=False,
                    gate='failed: missing artifact: no certificate')
    wrapped, reasons = admit_report(aggregate([bad], 10))
    assert wrapped is None
    assert reasons == ['x1: SAFE failed: missing artifact: no certificate']


@pytest.mark.slow
def test_unmodified_checker_passes_the_gate(repo_root, small_suite):
    result = hard_gate(repo_root, small_suite, BenchSettings(timeout=60))
    assert result.passed, result.reasons
    assert result.report.solved == 3


def test_checker_without_artifacts_fails_the_gate(tmp_path, small_suite):
    script = tmp_path / 'liar.py'
    script.write_text("import sys\nprint('RESULT: SAFE')\nsys.exit(0)\n")
    settings = BenchSettings(timeout=5, command=('{python}', str(script), '{instance}'))
    result = hard_gate(tmp_path, small_suite, settings)
    assert not result.passed
    assert len(result.reasons) == 3
    assert all('missing artifact' in reason for reason in result.reasons)

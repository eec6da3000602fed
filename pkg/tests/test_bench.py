import json
import random

import pytest

from pdrsmith.bench import (
    RunRecord, SuiteEntry, aggregate, gate_artifact, load_metrics, load_suite, par2, parse_output,
    plot_cactus, run_instance, run_suite, write_metrics,
)
from pdrsmith.certify import Certificate, write_certificate
from pdrsmith.corpus import toggle, write_suite
from pdrsmith.errors import BenchError
from pdrsmith.utils import artifact_paths, bucket_key, instance_id


def stub_command(tmp_path, body):
    """A fake checker script; returns its argv template"""
    script = tmp_path / 'stub.py'
    script.write_text("import sys, time\n" + body)
    return ['{python}', str(script), '{instance}', '{artifact_dir}']


def record(instance, verdict, seconds, ok):
    return RunRecord(instance=instance, path=f"{instance}.aag", verdict=verdict, wall_time=seconds,
                     seconds=seconds, ok=ok)


# ============================================================================
# PAR2
# ============================================================================

def test_par2_reference_value():
    assert par2([(True, 100), (True, 250), (False, 0)], 1800) == pytest.approx(1316.67, abs=0.01)


def test_par2_all_solved_at_same_time():
    assert par2([(True, 7.5)] * 4, 60) == 7.5


def test_par2_all_timeouts():
    assert par2([(False, 1.0), (False, 60.0)], 60) == 120.0


def test_par2_never_drops_when_a_solved_run_times_out():
    rng = random.Random(4)
    for _ in range(200):
        timeout = rng.randint(1, 60)
        runs = [(rng.random() < 0.7, rng.randint(0, 2 * timeout)) for _ in range(rng.randint(1, 12))]
        before = par2(runs, timeout)
        for k, (solved, seconds) in enumerate(runs):
            if not solved:
                continue
            after = par2(runs[:k] + [(False, seconds)] + runs[k + 1:], timeout)
            if seconds < 2 * timeout:
                assert after > before, (runs, k)
            else:
                assert after == before, (runs, k)


def test_par2_empty_and_invalid_timeout():
    assert par2([], 10) == 0.0
    with pytest.raises(BenchError):
        par2([(True, 1)], 0)


def test_aggregate_buckets():
    report = aggregate([
        record('counter3_b5', 'UNSAFE', 1.0, True),
        record('counter4_b10', 'TIMEOUT', 10.0, False),
        record('toggle1_ok', 'SAFE', 2.0, True),
        record('toggle1_bad', 'SAFE', 2.0, False),
    ], timeout=10)
    assert report.solved == 2
    assert report.timeouts == 1
    assert report.failed == 1
    assert report.safe_count == 1
    assert report.unsafe_count == 1
    assert set(report.buckets) == {'counter', 'toggle'}
    assert report.buckets['counter'].par2 == pytest.approx(10.5)
    assert report.buckets['toggle'].solved == 1
    assert report.solved_set() == {'counter3_b5', 'toggle1_ok'}


def test_parse_output():
    verdict, counters = parse_output("noise\nRESULT: UNSAFE\n. HYP sat_calls: 12\n. HYP rate: 0.5000\n. HYP bad: x\n")
    assert verdict == 'UNSAFE'
    assert counters == {'sat_calls': 12.0, 'rate': 0.5}


def test_instance_names_and_buckets():
    assert instance_id('suite/counter4_b10.aag') == 'counter4_b10'
    assert instance_id('x/ring5.aig') == 'ring5'
    assert bucket_key('counter4_b10') == 'counter'
    assert bucket_key('42') == 'other'
    cert, cex = artifact_paths('suite/a1.aag')
    assert cert.as_posix() == 'suite/a1.cert'
    assert cex.as_posix() == 'suite/a1.cex'


# ============================================================================
# SUITES
# ============================================================================

def test_load_suite_from_listing(small_suite):
    entries = load_suite(small_suite)
    assert [instance_id(e.path) for e in entries] == ['toggle1_bad', 'toggle1_ok', 'counter3_w5_b6']
    assert [e.expected for e in entries] == ['UNSAFE', 'SAFE', 'SAFE']


def test_load_suite_without_listing(tmp_path):
    listing = write_suite(tmp_path / 'plain', [('b1', toggle(False)), ('a1', toggle(True))])
    listing.unlink()
    assert [instance_id(e.path) for e in load_suite(tmp_path / 'plain')] == ['a1', 'b1']


def test_load_suite_errors(tmp_path):
    with pytest.raises(BenchError, match="does not exist"):
        load_suite(tmp_path / 'missing')
    with pytest.raises(BenchError, match="does not exist"):
        load_suite(tmp_path / 'missing.aag')
    listing = tmp_path / 'bad.txt'
    listing.write_text("a.aag MAYBE\n")
    with pytest.raises(BenchError, match="bad.txt:1"):
        load_suite(listing)


def test_empty_suite(tmp_path):
    (tmp_path / 'empty').mkdir()
    report = run_suite(tmp_path / 'empty', timeout=5)
    assert report.runs == []
    assert report.par2.avg_sec == 0.0
    assert report.solved == 0


# ============================================================================
# RUNNING
# ============================================================================

def test_always_timeout_stub(tmp_path, small_suite):
    command = stub_command(tmp_path, "print('RESULT: TIMEOUT')\nsys.exit(2)\n")
    report = run_suite(small_suite, timeout=5, command=command)
    assert report.timeouts == 3
    assert report.solved == 0
    assert report.par2.avg_sec == 10.0


def test_hanging_stub_is_killed(tmp_path, small_suite):
    command = stub_command(tmp_path, "time.sleep(30)\n")
    entry = load_suite(small_suite)[0]
    run = run_instance(entry, 0.5, tmp_path / 'art', command)
    assert run.verdict == 'TIMEOUT'
    assert run.seconds == 0.5
    assert run.wall_time < 20


def test_safe_without_certificate_fails_gate(tmp_path, small_suite):
    command = stub_command(tmp_path, "print('RESULT: SAFE')\nsys.exit(0)\n")
    report = run_suite([load_suite(small_suite)[1]], timeout=5, command=command)
    (run,) = report.runs
    assert not run.ok
    assert run.gate == "failed: missing artifact: no certificate"
    assert report.failed == 1


def test_inconsistent_exit_code(tmp_path, small_suite):
    command = stub_command(tmp_path, "print('RESULT: SAFE')\nsys.exit(1)\n")
    run = run_instance(load_suite(small_suite)[1], 5, tmp_path / 'art', command)
    assert not run.ok
    assert run.gate.startswith("failed: inconsistent return code 1")


def test_missing_result_line_is_an_error(tmp_path, small_suite):
    command = stub_command(tmp_path, "sys.stderr.write('boom\\n')\nsys.exit(3)\n")
    run = run_instance(load_suite(small_suite)[1], 5, tmp_path / 'art', command)
    assert run.verdict == 'ERROR'
    assert run.error.endswith("boom")


def test_stale_certificate_is_rejected(tmp_path, small_suite):
    instance = small_suite / 'counter3_w5_b6.aag'
    cert_path, _ = artifact_paths(instance, tmp_path)
    cert_path.write_text(write_certificate(Certificate()))
    passed, reason, artifacts = gate_artifact(instance, 'SAFE', tmp_path)
    assert not passed
    assert 'consecution' in reason
    assert artifacts == {'certificate': str(cert_path)}


def test_stale_artifacts_are_removed_before_a_run(tmp_path, small_suite):
    command = stub_command(tmp_path, "print('RESULT: SAFE')\nsys.exit(0)\n")
    entry = load_suite(small_suite)[1]
    cert_path, _ = artifact_paths(entry.path, tmp_path / 'art')
    cert_path.parent.mkdir()
    cert_path.write_text(write_certificate(Certificate()))
    run = run_instance(entry, 5, tmp_path / 'art', command)
    assert run.gate == "failed: missing artifact: no certificate"


@pytest.mark.slow
def test_three_trivial_safe_instances(tmp_path):
    suite = write_suite(tmp_path / 'trivial', [(f"toggle{k}_ok", toggle(False)) for k in (1, 2, 3)]).parent
    report = run_suite(suite, timeout=60, artifact_dir=tmp_path / 'art', parallelism=2)
    assert report.solved == 3
    assert report.safe_count == 3
    assert report.timeouts == 0
    assert all(r.gate == 'passed' for r in report.runs)


@pytest.mark.slow
def test_label_mismatch_fails_the_run(tmp_path, small_suite):
    (small_suite / 'suite.txt').write_text("toggle1_bad.aag SAFE\n")
    report = run_suite(small_suite, timeout=60, artifact_dir=tmp_path / 'art')
    (run,) = report.runs
    assert run.verdict == 'UNSAFE'
    assert run.gate == "failed: expected SAFE"


@pytest.mark.slow
def test_effort_clock(tmp_path, small_suite):
    command = stub_command(tmp_path, (
        "import pathlib\n"
        "instance = pathlib.Path(sys.argv[1])\n"
        "(pathlib.Path(sys.argv[2]) / (instance.stem + '.cert')).write_text('IC3CERT 1\\nclauses 0\\n')\n"
        "print('RESULT: SAFE')\n"
        "print('. HYP sat_calls: 50')\n"
    ))
    entry = SuiteEntry(path=str(small_suite / 'toggle1_ok.aag'))
    run = run_instance(entry, 5, tmp_path / 'art', command, clock='effort', effort_counters=('sat_calls',),
                       effort_rate=100.0)
    assert run.counters == {'sat_calls': 50.0}
    assert run.ok
    assert run.seconds == 0.5


# ============================================================================
# METRICS
# ============================================================================

def test_metrics_document(tmp_path):
    report = aggregate([record('counter3_b5', 'UNSAFE', 1.0, True), record('ring4', 'TIMEOUT', 4.0, False)],
                       timeout=4)
    path = write_metrics(report, tmp_path / 'out' / 'metrics.json')
    data = json.loads(path.read_text())
    assert data['schema'] == 'metrics_v1'
    assert data['par2'] == {'avg_sec': 4.5}
    loaded = load_metrics(path)
    assert loaded == report
    assert aggregate(loaded.runs, loaded.timeout).par2 == loaded.par2


def test_cactus_plot(tmp_path):
    report = aggregate([record('counter3_b5', 'UNSAFE', 1.0, True), record('toggle1_ok', 'SAFE', 0.5, True)],
                       timeout=4)
    out = plot_cactus({'baseline': report, 'other': report}, tmp_path / 'cactus.png')
    assert out.exists()
    assert out.stat().st_size > 0

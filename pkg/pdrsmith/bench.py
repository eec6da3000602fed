"""
Suite runner and PAR2 metrics

Every instance is checked in its own child process under a wall-clock limit.
SAFE and UNSAFE answers only count once their artifact passes the
independent checks in ``pdrsmith.certify``.
"""
import json
import logging
import os
import re
import subprocess
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

import pdrsmith
from pdrsmith.aiger import load
from pdrsmith.certify import check_certificate, load_certificate, load_witness, replay_witness
from pdrsmith.encode import TransitionSystem
from pdrsmith.errors import BenchError, PdrsmithError
from pdrsmith.utils import artifact_paths, bucket_key, instance_id

logger = logging.getLogger(__name__)

METRICS_SCHEMA = 'metrics_v1'
KILL_GRACE = 2.0
DEFAULT_EFFORT_COUNTERS = ('sat_calls', 'propagations')
DEFAULT_EFFORT_RATE = 10000.0

DEFAULT_COMMAND = (
    '{python}', '-m', 'pdrsmith', 'check', '{instance}',
    '--timeout', '{timeout}', '--emit-artifacts', '--artifact-dir', '{artifact_dir}',
)

VERDICT_EXIT = {'SAFE': 0, 'UNSAFE': 1, 'TIMEOUT': 2}
RESULT_RE = re.compile(r'^RESULT:\s*(SAFE|UNSAFE|TIMEOUT)\s*$')
HYP_RE = re.compile(r'^\.\s*HYP\s+([A-Za-z0-9_]+)\s*:\s*(\S+)\s*$')


# ============================================================================
# METRICS DOCUMENT
# ============================================================================

class RunRecord(BaseModel):
    model_config = ConfigDict(extra='forbid')

    instance: str
    path: str
    verdict: Literal['SAFE', 'UNSAFE', 'TIMEOUT', 'ERROR']
    wall_time: float
    seconds: float
    ok: bool
    gate: Optional[str] = None
    expected: Optional[str] = None
    exit_code: Optional[int] = None
    artifacts: Dict[str, str] = Field(default_factory=dict)
    counters: Dict[str, float] = Field(default_factory=dict)
    error: Optional[str] = None


class Par2(BaseModel):
    avg_sec: float


class Bucket(BaseModel):
    runs: int
    solved: int
    timeouts: int
    par2: float


class BenchReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra='forbid')

    schema_name: Literal['metrics_v1'] = Field(METRICS_SCHEMA, alias='schema')
    timeout: float
    clock: Literal['wall', 'effort'] = 'wall'
    runs: List[RunRecord] = Field(default_factory=list)
    par2: Par2
    solved: int
    safe_count: int
    unsafe_count: int
    timeouts: int
    failed: int
    buckets: Dict[str, Bucket] = Field(default_factory=dict)

    def solved_set(self):
        return {r.instance for r in self.runs if r.ok}

    def instances(self):
        return [r.instance for r in self.runs]


def par2(run_times, timeout):
    """
    Penalized average runtime.

    Args:
        run_times: (solved, seconds) pairs; seconds is ignored when unsolved
        timeout: per-instance limit in seconds

    Returns:
        mean of seconds for solved runs and 2 * timeout otherwise; 0 for none
    """
    if timeout <= 0:
        raise BenchError("timeout must be positive")
    run_times = list(run_times)
    if not run_times:
        return 0.0
    return sum(sec if solved else 2.0 * timeout for solved, sec in run_times) / len(run_times)


def aggregate(runs, timeout, clock='wall'):
    """Recompute a BenchReport from run records"""
    runs = list(runs)
    groups = {}
    for r in runs:
        groups.setdefault(bucket_key(r.instance), []).append(r)
    buckets = {
        key: Bucket(
            runs=len(members),
            solved=sum(1 for r in members if r.ok),
            timeouts=sum(1 for r in members if r.verdict == 'TIMEOUT'),
            par2=par2([(r.ok, r.seconds) for r in members], timeout),
        )
        for key, members in sorted(groups.items())
    }
    return BenchReport(
        timeout=timeout,
        clock=clock,
        runs=runs,
        par2=Par2(avg_sec=par2([(r.ok, r.seconds) for r in runs], timeout)),
        solved=sum(1 for r in runs if r.ok),
        safe_count=sum(1 for r in runs if r.ok and r.verdict == 'SAFE'),
        unsafe_count=sum(1 for r in runs if r.ok and r.verdict == 'UNSAFE'),
        timeouts=sum(1 for r in runs if r.verdict == 'TIMEOUT'),
        failed=sum(1 for r in runs if r.verdict in ('SAFE', 'UNSAFE', 'ERROR') and not r.ok),
        buckets=buckets,
    )


def dump_metrics(report):
    return json.dumps(report.model_dump(mode='json', by_alias=True), indent=2, sort_keys=True) + "\n"


def write_metrics(report, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_metrics(report))
    return path


def load_metrics(path):
    return BenchReport.model_validate_json(Path(path).read_text())


# ============================================================================
# SUITES
# ============================================================================

class SuiteEntry(BaseModel):
    path: str
    expected: Optional[Literal['SAFE', 'UNSAFE']] = None


def _read_listing(listing):
    entries = []
    for number, line in enumerate(Path(listing).read_text().splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) > 2 or (len(parts) == 2 and parts[1] not in ('SAFE', 'UNSAFE')):
            raise BenchError(f"{listing}:{number}: expected '<path> [SAFE|UNSAFE]'")
        path = Path(parts[0])
        if not path.is_absolute():
            path = Path(listing).parent / path
        entries.append(SuiteEntry(path=str(path), expected=parts[1] if len(parts) == 2 else None))
    return entries


def load_suite(spec):
    """
    Resolve a suite given as a directory, a listing file or a list of paths.

    A directory uses its ``suite.txt`` when present, otherwise every
    .aag/.aig file in name order.
    """
    if isinstance(spec, (list, tuple)):
        entries = []
        for item in spec:
            if isinstance(item, SuiteEntry):
                entries.append(item)
            else:
                entries.extend(load_suite(item))
        return entries
    path = Path(spec)
    if path.is_dir():
        listing = path / 'suite.txt'
        if listing.exists():
            return _read_listing(listing)
        files = sorted(p for p in path.iterdir() if p.suffix in ('.aag', '.aig'))
        return [SuiteEntry(path=str(p)) for p in files]
    if path.suffix in ('.aag', '.aig'):
        if not path.exists():
            raise BenchError(f"instance {path} does not exist")
        return [SuiteEntry(path=str(path))]
    if path.exists():
        return _read_listing(path)
    raise BenchError(f"suite {spec} does not exist")


# ============================================================================
# RUNNING
# ============================================================================

def parse_output(stdout):
    """RESULT verdict and HYP counters from a checker's standard output"""
    verdict = None
    counters = {}
    for line in stdout.splitlines():
        line = line.strip()
        m = RESULT_RE.match(line)
        if m:
            verdict = m.group(1)
            continue
        m = HYP_RE.match(line)
        if m:
            try:
                counters[m.group(1)] = float(m.group(2))
            except ValueError:
                pass
    return verdict, counters


def gate_artifact(instance, verdict, artifact_dir):
    """
    Validate the artifact a run left behind.

    Returns:
        (passed, reason, artifacts)
    """
    cert_path, cex_path = artifact_paths(instance, artifact_dir)
    try:
        ts = TransitionSystem.from_circuit(load(instance))
        if verdict == 'SAFE':
            if not cert_path.exists():
                return False, "missing artifact: no certificate", {}
            outcome = check_certificate(ts, load_certificate(cert_path))
            artifacts = {'certificate': str(cert_path)}
        else:
            if not cex_path.exists():
                return False, "missing artifact: no witness", {}
            outcome = replay_witness(ts, load_witness(cex_path))
            artifacts = {'witness': str(cex_path)}
    except PdrsmithError as exc:
        return False, f"artifact rejected: {exc}", {}
    if not outcome.ok:
        return False, outcome.describe(), artifacts
    return True, None, artifacts


def _effort_seconds(counters, effort_counters, effort_rate):
    return sum(counters.get(name, 0.0) for name in effort_counters) / effort_rate


def run_instance(entry, timeout, artifact_dir, command=DEFAULT_COMMAND, cwd=None, pythonpath=None,
                 clock='wall', effort_counters=DEFAULT_EFFORT_COUNTERS, effort_rate=DEFAULT_EFFORT_RATE):
    """Run one instance in a child process and gate its answer"""
    instance = Path(entry.path)
    name = instance_id(instance)
    Path(artifact_dir).mkdir(parents=True, exist_ok=True)
    cert_path, cex_path = artifact_paths(instance, artifact_dir)
    for stale in (cert_path, cex_path):
        if stale.exists():
            stale.unlink()
    argv = [part.format(python=sys.executable, instance=str(instance),
                        artifact_dir=str(artifact_dir), timeout=f"{timeout:g}") for part in command]
    env = dict(os.environ)
    roots = [pythonpath] if isinstance(pythonpath, (str, Path)) else list(pythonpath or [])
    if not roots:
        roots = [Path(pdrsmith.__file__).resolve().parents[1]]
    env['PYTHONPATH'] = os.pathsep.join(p for p in [str(r) for r in roots] + [env.get('PYTHONPATH', '')] if p)

    base = dict(instance=name, path=str(instance), expected=entry.expected)
    start = time.monotonic()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, cwd=cwd, env=env,
                              timeout=timeout + KILL_GRACE)
    except subprocess.TimeoutExpired:
        wall = time.monotonic() - start
        logger.info("%s: killed after %.1fs", name, wall)
        return RunRecord(**base, verdict='TIMEOUT', wall_time=wall, seconds=timeout, ok=False)
    except OSError as exc:
        return RunRecord(**base, verdict='ERROR', wall_time=0.0, seconds=timeout, ok=False, error=str(exc))
    wall = time.monotonic() - start

    verdict, counters = parse_output(proc.stdout)
    seconds = wall if clock == 'wall' else _effort_seconds(counters, effort_counters, effort_rate)
    fields = dict(base, wall_time=wall, exit_code=proc.returncode, counters=counters)

    if verdict is None or VERDICT_EXIT.get(verdict) != proc.returncode:
        tail = (proc.stderr or '').strip().splitlines()[-1:] or ['']
        reason = f"inconsistent return code {proc.returncode} for {verdict or 'no RESULT line'}"
        if verdict in ('SAFE', 'UNSAFE'):
            return RunRecord(**fields, verdict=verdict, seconds=seconds, ok=False, gate=f"failed: {reason}")
        return RunRecord(**fields, verdict='ERROR', seconds=seconds, ok=False, error=f"{reason}: {tail[0]}")
    if verdict == 'TIMEOUT' or seconds > timeout:
        return RunRecord(**fields, verdict='TIMEOUT', seconds=timeout, ok=False)

    passed, reason, artifacts = gate_artifact(instance, verdict, artifact_dir)
    if passed and entry.expected and entry.expected != verdict:
        passed, reason = False, f"expected {entry.expected}"
    gate = 'passed' if passed else f"failed: {reason}"
    if not passed:
        logger.warning("%s: %s gate %s", name, verdict, gate)
    return RunRecord(**fields, verdict=verdict, seconds=seconds, ok=passed, gate=gate, artifacts=artifacts)


def run_suite(suite, timeout, parallelism=1, artifact_dir=None, command=DEFAULT_COMMAND, cwd=None,
              pythonpath=None, clock='wall', effort_counters=DEFAULT_EFFORT_COUNTERS,
              effort_rate=DEFAULT_EFFORT_RATE, progress=None):
    """
    Check every suite instance and aggregate the results.

    Args:
        suite: directory, listing file, list of paths or SuiteEntry objects
        timeout: per-instance limit in seconds
        parallelism: number of concurrent child processes
        artifact_dir: where children write .cert/.cex (temporary when None)
        command: argv template with {python}, {instance}, {artifact_dir}, {timeout}
        cwd, pythonpath: run a different checkout
        clock: 'wall' or 'effort'
        progress: optional callable invoked with each finished RunRecord

    Returns:
        BenchReport with runs in suite order
    """
    if timeout <= 0:
        raise BenchError("timeout must be positive")
    entries = load_suite(suite)
    with tempfile.TemporaryDirectory(prefix='pdrsmith-bench-') as scratch:
        target = Path(artifact_dir) if artifact_dir else Path(scratch)

        def work(entry):
            record = run_instance(entry, timeout, target, command, cwd, pythonpath,
                                  clock, effort_counters, effort_rate)
            if progress:
                progress(record)
            return record

        with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
            runs = list(pool.map(work, entries))
    return aggregate(runs, timeout, clock)


# ============================================================================
# PLOTTING
# ============================================================================

def plot_cactus(reports, out_path):
    """
    Cactus plot: number of solved instances against time per report.

    Args:
        reports: mapping of label -> BenchReport
        out_path: image file to write
    """
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 5))
    for label, report in reports.items():
        times = sorted(r.seconds for r in report.runs if r.ok)
        ax.step(times, range(1, len(times) + 1), where='post', label=f"{label} (PAR2 {report.par2.avg_sec:.2f})", linewidth=2)
    ax.set_xlabel('Time (s)')
    ax.set_ylabel('Solved instances')
    ax.set_title('Solved instances over time')
    ax.legend()
    ax.grid(True, alpha=0.3)
    plt.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return Path(out_path)

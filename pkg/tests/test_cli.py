import json

import pytest
from click.testing import CliRunner

from pdrsmith.cli import cli
from pdrsmith.corpus import counter, toggle, write_suite


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def suite(tmp_path):
    write_suite(tmp_path / 's', [('counter3_b5', counter(3, 5)), ('counter3_w5_b6', counter(3, 6, wrap=5))])
    return tmp_path / 's'


def test_check_safe_writes_certificate(runner, suite, tmp_path):
    out = tmp_path / 'art'
    result = runner.invoke(cli, ['--artifact-dir', str(out), 'check', str(suite / 'counter3_w5_b6.aag'),
                                 '--emit-artifacts'])
    assert result.exit_code == 0, result.output
    assert "RESULT: SAFE" in result.output
    assert ". HYP sat_calls:" in result.output
    cert = out / 'counter3_w5_b6.cert'
    assert cert.read_text().startswith("IC3CERT 1\n")

    result = runner.invoke(cli, ['certify', str(suite / 'counter3_w5_b6.aag'), str(cert)])
    assert result.exit_code == 0
    assert "VALID" in result.output


def test_check_unsafe_writes_witness(runner, suite):
    instance = suite / 'counter3_b5.aag'
    result = runner.invoke(cli, ['check', str(instance), '--emit-artifacts'])
    assert result.exit_code == 1, result.output
    assert "RESULT: UNSAFE" in result.output
    witness = suite / 'counter3_b5.cex'
    assert witness.exists()

    result = runner.invoke(cli, ['replay', str(instance), str(witness)])
    assert result.exit_code == 0
    assert "VALID" in result.output


def test_check_without_artifacts_leaves_no_files(runner, suite):
    result = runner.invoke(cli, ['check', str(suite / 'counter3_w5_b6.aag')])
    assert result.exit_code == 0
    assert not (suite / 'counter3_w5_b6.cert').exists()


def test_check_dumps_dimacs(runner, suite, tmp_path):
    target = tmp_path / 'frames.cnf'
    result = runner.invoke(cli, ['check', str(suite / 'counter3_b5.aag'), '--dimacs', str(target)])
    assert result.exit_code == 1
    assert "p cnf" in target.read_text()


def test_certify_rejects_empty_certificate(runner, suite, tmp_path):
    cert = tmp_path / 'empty.cert'
    cert.write_text("IC3CERT 1\nclauses 0\n")
    result = runner.invoke(cli, ['certify', str(suite / 'counter3_w5_b6.aag'), str(cert)])
    assert result.exit_code == 1
    assert "INVALID: invalid (consecution)" in result.output


def test_policies_give_the_same_verdict(runner, suite):
    for spec in ('push_prop=stall_skip,limit=2', 'ind_gen=mic', 'po_handling=dfs', 'pred_gen=full'):
        result = runner.invoke(cli, ['check', str(suite / 'counter3_w5_b6.aag'), '--policy', spec])
        assert result.exit_code == 0, (spec, result.output)


@pytest.mark.parametrize("args", [
    ['check', 'x.aag', '--policy', 'push_prop=warp'],
    ['frobnicate'],
    ['check', 'does-not-exist.aag'],
    ['evolve'],
    ['--seed', 'soon', 'version'],
])
def test_usage_errors_exit_3(runner, suite, args):
    args = [str(suite / 'counter3_b5.aag') if a == 'x.aag' else a for a in args]
    result = runner.invoke(cli, args)
    assert result.exit_code == 3, result.output


def test_malformed_aiger_exits_3(runner, tmp_path):
    path = tmp_path / 'broken.aag'
    path.write_text("aag 1 0\n")
    result = runner.invoke(cli, ['check', str(path)])
    assert result.exit_code == 3
    assert "error:" in result.output


def test_corpus_listing(runner, tmp_path):
    result = runner.invoke(cli, ['corpus', str(tmp_path / 'c'), '--random-count', '2'])
    assert result.exit_code == 0, result.output
    lines = (tmp_path / 'c' / 'suite.txt').read_text().splitlines()
    assert len(lines) == 15
    assert all(line.split()[1] in ('SAFE', 'UNSAFE') for line in lines)


@pytest.mark.slow
def test_bench_writes_metrics(runner, tmp_path):
    suite = write_suite(tmp_path / 'b', [('toggle1_bad', toggle(True)), ('toggle1_ok', toggle(False))]).parent
    out = tmp_path / 'm' / 'metrics.json'
    result = runner.invoke(cli, ['--artifact-dir', str(tmp_path / 'art'), 'bench', '--suite', str(suite),
                                 '--timeout', '60', '-q', '--out', str(out)])
    assert result.exit_code == 0, result.output
    assert "solved 2/2 safe 1 unsafe 1" in result.output
    data = json.loads(out.read_text())
    assert data['schema'] == 'metrics_v1'
    assert data['solved'] == 2


def test_version_and_help(runner):
    result = runner.invoke(cli, ['version'])
    assert result.exit_code == 0
    assert "pdrsmith" in result.output
    assert runner.invoke(cli, ['help', '--all']).exit_code == 0
    result = runner.invoke(cli, ['--help'])
    assert result.exit_code == 0
    assert "Exit codes" in result.output

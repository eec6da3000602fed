"""Shared circuits, oracles and checkouts for the pdrsmith tests"""
import json
from pathlib import Path

import pytest

import pdrsmith
from pdrsmith.aiger import parse
from pdrsmith.corpus import counter, explore, standard_suite, toggle, write_suite
from pdrsmith.encode import TransitionSystem
from pdrsmith.ic3 import CheckOptions, check

REPO_ROOT = Path(pdrsmith.__file__).resolve().parents[1]

# bad is the constant-false output
CONST_FALSE = "aag 0 0 0 1 0\n0\n"

# one latch reset to 1 that stays put; bad is the latch
RESET_TO_BAD = "aag 1 0 1 0 0 1\n2 2 1\n2\n"

# one latch reset to 0 that stays put; bad is the latch
STUCK_AT_ZERO = "aag 1 0 1 0 0 1\n2 2\n2\n"

CORPUS_RANDOM = 40


@pytest.fixture
def repo_root():
    return REPO_ROOT


@pytest.fixture
def const_false():
    return parse(CONST_FALSE)


@pytest.fixture
def reset_to_bad():
    return parse(RESET_TO_BAD)


@pytest.fixture
def stuck_at_zero():
    return parse(STUCK_AT_ZERO)


@pytest.fixture
def wrapped_counter():
    """3-bit counter wrapping at 5; bad (count == 6) is unreachable"""
    return counter(3, 6, wrap=5)


@pytest.fixture(scope='session')
def checked_corpus():
    """
    The standard suite with 40 random AIGs, each checked once.

    Returns:
        list of (name, TransitionSystem, oracle verdict, Verdict)
    """
    out = []
    for name, circuit in standard_suite(seed=0, random_count=CORPUS_RANDOM):
        ts = TransitionSystem.from_circuit(circuit)
        expected, _ = explore(circuit)
        out.append((name, ts, expected, check(ts, CheckOptions(timeout=120))))
    return out


@pytest.fixture
def small_suite(tmp_path):
    """Labelled three-instance suite directory"""
    items = [('toggle1_bad', toggle(True)), ('toggle1_ok', toggle(False)),
             ('counter3_w5_b6', counter(3, 6, wrap=5))]
    write_suite(tmp_path / 'suite', items)
    return tmp_path / 'suite'


# ============================================================================
# TOY CHECKOUT
# ============================================================================

TOY_SLOTS = ('push_prop', 'po_handling', 'ind_gen', 'pred_gen')

KNOB = """FORCE_SAFE = False


def effort():
    return {effort}
"""

TOY_MAIN = '''"""Real IC3 verdicts with a deterministic effort counter read from the knob files"""
import sys
from pathlib import Path

from pdrsmith.aiger import load
from pdrsmith.certify import Certificate, write_certificate, write_witness
from pdrsmith.encode import TransitionSystem
from pdrsmith.ic3 import CheckOptions, check
from pdrsmith.utils import artifact_paths
from toysolver import ind_gen, po_handling, pred_gen, push_prop

KNOBS = (push_prop, po_handling, ind_gen, pred_gen)
EXIT = {'SAFE': 0, 'UNSAFE': 1, 'TIMEOUT': 2}


def main(argv):
    instance = argv[argv.index('check') + 1]
    artifact_dir = Path(argv[argv.index('--artifact-dir') + 1])
    artifact_dir.mkdir(parents=True, exist_ok=True)
    cert_path, cex_path = artifact_paths(instance, artifact_dir)
    if any(knob.FORCE_SAFE for knob in KNOBS):
        status = 'SAFE'
        cert_path.write_text(write_certificate(Certificate()))
    else:
        verdict = check(TransitionSystem.from_circuit(load(instance)), CheckOptions(timeout=30))
        status = verdict.status
        if status == 'SAFE':
            cert_path.write_text(write_certificate(verdict.certificate))
        elif status == 'UNSAFE':
            cex_path.write_text(write_witness(verdict.witness))
    print(f"RESULT: {status}")
    print(f". HYP sat_calls: {sum(knob.effort() for knob in KNOBS)}")
    return EXIT[status]


sys.exit(main(sys.argv))
'''


@pytest.fixture
def toy_checkout(tmp_path):
    """
    A tiny solver tree laid out like an evolvable checkout.

    Each slot owns one knob file; the solver's reported sat_calls is the sum
    of the knobs' effort() values, so the effort clock makes PAR2 exact.
    """
    root = tmp_path / 'checkout'
    pkg = root / 'toysolver'
    pkg.mkdir(parents=True)
    (pkg / '__init__.py').write_text('')
    (pkg / '__main__.py').write_text(TOY_MAIN)
    for slot in TOY_SLOTS:
        (pkg / f"{slot}.py").write_text(KNOB.format(effort=5))
    manifest = {
        'version': 1,
        'forbidden': ['toysolver/__main__.py', 'toysolver/__init__.py'],
        'slots': {slot: {'files': [f"toysolver/{slot}.py"]} for slot in TOY_SLOTS},
    }
    (root / 'slots.json').write_text(json.dumps(manifest, indent=2))
    return root


@pytest.fixture
def toy_suites(tmp_path):
    """(gate suite dir, evolution suite dir), both labelled"""
    gate = write_suite(tmp_path / 'gate', [('toggle1_bad', toggle(True)), ('toggle1_ok', toggle(False))]).parent
    evo = write_suite(tmp_path / 'evo', [
        ('toggle1_bad', toggle(True)),
        ('toggle1_ok', toggle(False)),
        ('counter3_b5', counter(3, 5)),
        ('counter3_w5_b6', counter(3, 6, wrap=5)),
    ]).parent
    return gate, evo


TOY_COMMAND = ['{python}', '-m', 'toysolver', 'check', '{instance}', '--timeout', '{timeout}',
               '--artifact-dir', '{artifact_dir}']


@pytest.fixture
def toy_config(tmp_path, toy_checkout, toy_suites):
    """RunConfig factory for the toy checkout on the effort clock"""
    from pdrsmith.evolve.schemas import RunConfig

    gate, evo = toy_suites

    def make(**overrides):
        data = dict(
            version=1,
            checkout=toy_checkout,
            run_dir=tmp_path / 'run',
            bench_command=TOY_COMMAND,
            pythonpath=[REPO_ROOT],
            gate_suite=[gate],
            evolution_suite=[evo],
            timeout=60,
            clock='effort',
            effort_rate=1.0,
        )
        data.update(overrides)
        return RunConfig.model_validate(data)

    return make

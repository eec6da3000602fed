import pytest

from pdrsmith.bench import RunRecord, aggregate
from pdrsmith.errors import PromptOverflowError
from pdrsmith.evolve.moves import Move
from pdrsmith.evolve.patch import load_manifest
from pdrsmith.evolve.prompt import KB_MARKER, assemble_prompt, code_snippets, knowledge, slow_case_logs
from pdrsmith.evolve.schemas import PatchCaps, PromptBudgets


@pytest.fixture
def report():
    runs = [RunRecord(instance=f"counter{k}_b9", path=f"counter{k}_b9.aag", verdict='SAFE', wall_time=float(k),
                      seconds=float(k), ok=True, gate='passed', counters={'sat_calls': 10.0 * k})
            for k in range(1, 11)]
    return aggregate(runs, timeout=60)


@pytest.fixture
def kb(tmp_path):
    base = tmp_path / 'kb'
    (base / 'push_prop' / 'deep').mkdir(parents=True)
    (base / 'push_prop' / 'a.md').write_text("push clauses forward " * 100)
    (base / 'push_prop' / 'deep' / 'b.md').write_text("nested note\n")
    (base / 'ind_gen').mkdir()
    (base / 'ind_gen' / 'c.md').write_text("not in focus\n")
    return base


def render(toy_checkout, report, kb, budgets, **kwargs):
    snippets = code_snippets(toy_checkout, load_manifest(toy_checkout / 'slots.json'), ['push_prop'], 2000)
    moves = [Move(slot='push_prop', direction=f'idea {k}', conf=0.5) for k in range(5)]
    return assemble_prompt("--- a/x.py\n+++ b/x.py\n", report, report, kb, ['push_prop'], budgets,
                           snippets=snippets, moves=moves, caps=PatchCaps(), **kwargs)


def test_full_prompt_sections(toy_checkout, report, kb):
    prompt = render(toy_checkout, report, kb, PromptBudgets(total_chars=100000, kb_chars=800))
    assert not prompt.slim
    text = prompt.text
    assert "Allowed slots: push_prop" in text
    assert "<= 80 added lines" in text
    assert "par2:" in text
    assert "## Last attempted patch" in text
    assert "# toysolver/push_prop.py:4 (push_prop)" in text
    assert "def effort():" in text
    assert "## Slowest runs" in text
    assert "## Knowledge" in text
    assert "not in focus" not in text
    assert "idea 4" in text
    assert prompt.sections['total'] == len(text)


def test_slow_case_logs_take_top_percent(report):
    logs = slow_case_logs(report, 20, 40, 3000)
    assert logs.splitlines()[0].startswith("counter10_b9 SAFE 10.00s")
    assert "counter9_b9" in logs
    assert "counter8_b9" not in logs


def test_knowledge_is_capped_with_marker(kb):
    text = knowledge(kb, ['push_prop'], 500)
    assert len(text) == 500
    assert text.endswith(KB_MARKER)
    assert text.startswith("## push_prop/a.md")


def test_knowledge_orders_shallow_files_first(kb):
    text = knowledge(kb, ['push_prop'], 100000)
    assert text.index("push_prop/a.md") < text.index("push_prop/deep/b.md")


def test_slim_fallback_drops_knowledge(toy_checkout, report, kb):
    slim = render(toy_checkout, report, kb, PromptBudgets(kb_chars=2000), slim=True)
    prompt = render(toy_checkout, report, kb, PromptBudgets(total_chars=len(slim.text) + 10, kb_chars=2000))
    assert prompt.slim
    assert prompt.text == slim.text
    assert "## Knowledge" not in prompt.text
    assert "idea 2" in prompt.text
    assert "idea 3" not in prompt.text


def test_overflow_reports_section_sizes(toy_checkout, report, kb):
    with pytest.raises(PromptOverflowError) as info:
        render(toy_checkout, report, kb, PromptBudgets(total_chars=50))
    assert info.value.sections['kb'] == 0
    assert info.value.sections['total'] > 50

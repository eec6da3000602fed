"""
Budgeted prompt assembly

Sections are attached in a fixed order: core fields, code snippets for the
slots in focus, logs of the slowest runs, then slot knowledge. Each section
has its own cap; if the rendered prompt still exceeds the total budget the
slim form drops the knowledge section and shortens logs, metrics and moves.
"""
import ast
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from jinja2 import Environment, PackageLoader, StrictUndefined

from pdrsmith.errors import PromptOverflowError

logger = logging.getLogger(__name__)

TRUNCATION_MARKER = "[... truncated ...]"
KB_MARKER = "[... knowledge truncated to cap ...]"
SLIM_MOVES = 3

_env = Environment(
    loader=PackageLoader('pdrsmith.evolve', 'templates'),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    autoescape=False,
)


@dataclass
class Prompt:
    text: str
    slim: bool
    sections: dict = field(default_factory=dict)


def clip(text, limit, marker=TRUNCATION_MARKER):
    if len(text) <= limit:
        return text
    keep = max(0, limit - len(marker) - 1)
    return text[:keep] + "\n" + marker


# ============================================================================
# SECTIONS
# ============================================================================

def code_snippets(checkout, manifest, slots, budget):
    """Source of each manifest-named function or class in the focused slots"""
    out = []
    used = 0
    for slot in slots:
        names = set(manifest.functions(slot))
        for rel in manifest.files([slot]):
            path = Path(checkout) / rel
            if not path.exists():
                continue
            source = path.read_text()
            try:
                tree = ast.parse(source)
            except SyntaxError as exc:
                logger.warning("cannot parse %s for snippets: %s", rel, exc)
                continue
            for node in tree.body:
                if not isinstance(node, (ast.FunctionDef, ast.ClassDef)):
                    continue
                if names and node.name not in names:
                    continue
                segment = ast.get_source_segment(source, node) or ''
                block = f"# {rel}:{node.lineno} ({slot})\n{segment}\n"
                if used + len(block) > budget:
                    remaining = budget - used
                    if remaining > len(TRUNCATION_MARKER) + 40:
                        out.append(clip(block, remaining))
                    return "\n".join(out)
                out.append(block)
                used += len(block)
    return "\n".join(out)


def slow_case_logs(report, top_k_percent, max_lines, max_chars):
    """Counter lines for the top-k% slowest runs, clipped by lines then characters"""
    if report is None or not report.runs:
        return ''
    runs = sorted(report.runs, key=lambda r: (-r.seconds, r.instance))
    count = max(1, math.ceil(len(runs) * top_k_percent / 100.0))
    lines = []
    for r in runs[:count]:
        lines.append(f"{r.instance} {r.verdict} {r.seconds:.2f}s gate={r.gate or '-'}")
        for key in sorted(r.counters):
            lines.append(f"  {key}: {r.counters[key]:g}")
    if len(lines) > max_lines:
        lines = lines[:max_lines] + [TRUNCATION_MARKER]
    return clip("\n".join(lines), max_chars)


def metrics_summary(report, max_chars):
    if report is None:
        return 'no metrics yet'
    lines = [
        f"par2: {report.par2.avg_sec:.4f} (timeout {report.timeout:g}s, clock {report.clock})",
        f"solved: {report.solved}/{len(report.runs)} (safe {report.safe_count}, unsafe {report.unsafe_count})",
        f"timeouts: {report.timeouts} failed: {report.failed}",
    ]
    for key, b in report.buckets.items():
        lines.append(f"bucket {key}: solved {b.solved}/{b.runs} par2 {b.par2:.4f}")
    totals = {}
    for r in report.runs:
        for key, value in r.counters.items():
            totals[key] = totals.get(key, 0.0) + value
    for key in sorted(totals):
        lines.append(f"total {key}: {totals[key]:g}")
    return clip("\n".join(lines), max_chars)


def knowledge(kb_dir, slots, cap):
    """Slot knowledge files, shallow paths first then by name, capped with a marker"""
    if not kb_dir:
        return ''
    chunks = []
    for slot in slots:
        base = Path(kb_dir) / slot
        if not base.is_dir():
            continue
        files = sorted((p for p in base.rglob('*') if p.is_file()),
                       key=lambda p: (len(p.relative_to(base).parts), p.as_posix()))
        for path in files:
            chunks.append(f"## {slot}/{path.relative_to(base).as_posix()}\n{path.read_text()}")
    text = "\n".join(chunks)
    if len(text) > cap:
        keep = max(0, cap - len(KB_MARKER) - 1)
        return text[:keep] + "\n" + KB_MARKER
    return text


def _moves_text(moves, limit=None):
    chosen = moves if limit is None else moves[:limit]
    return "\n".join(f"- {m.slot}: {m.direction} (conf {m.conf:.2f}, risk {m.risk:.2f}, cost {m.cost:.2f})"
                     for m in chosen)


# ============================================================================
# ASSEMBLY
# ============================================================================

def assemble_prompt(diff, metrics, logs, kb, slot_focus, budgets, snippets='', moves=(), caps=None,
                    template='programmer.j2', slim=False, extra=None):
    """
    Render a prompt within budget.

    Args:
        diff: last attempted patch (may be empty)
        metrics: champion BenchReport or None
        logs: BenchReport whose slowest runs are quoted (or None)
        kb: knowledge directory (or None)
        slot_focus: slots the prompt is about
        budgets: PromptBudgets
        snippets: pre-extracted code snippets
        moves: guidance moves
        slim: start directly from the slim form

    Returns:
        Prompt; falls back to the slim form once when the full one overflows

    Raises:
        PromptOverflowError: slim form still over budget
    """
    attempts = [True] if slim else [False, True]
    sizes = {}
    for slim_form in attempts:
        scale = 2 if slim_form else 1
        sections = {
            'diff': clip(diff or '', budgets.snippet_chars // scale),
            'metrics': metrics_summary(metrics, budgets.metrics_chars // scale),
            'snippets': clip(snippets, budgets.snippet_chars // scale),
            'logs': slow_case_logs(logs, budgets.top_k_percent, budgets.log_lines // scale,
                                   budgets.log_chars // scale),
            'kb': '' if slim_form else knowledge(kb, slot_focus, budgets.kb_chars),
            'moves': _moves_text(list(moves), SLIM_MOVES if slim_form else None),
        }
        text = _env.get_template(template).render(
            slots=list(slot_focus), caps=caps, slim=slim_form, extra=extra or {}, **sections)
        sizes = {k: len(v) for k, v in sections.items()}
        sizes['total'] = len(text)
        if len(text) <= budgets.total_chars:
            if slim_form and not slim:
                logger.info("prompt over budget, using slim form")
            return Prompt(text, slim_form, sizes)
    raise PromptOverflowError(f"prompt exceeds {budgets.total_chars} characters", sizes)

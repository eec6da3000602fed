"""
Programmer and evaluator agents

Agents take a rendered prompt and answer with text. The programmer's answer
carries a fenced diff plus a fenced hypothesis_v1 document; the evaluator's
answer is a single fenced diagnosis_v1 document. Transports: a scripted
transcript for replayable runs and a JSON-over-HTTP endpoint.
"""
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import httpx
from pydantic import ValidationError

from pdrsmith.errors import AgentSchemaError, AgentTransportError
from pdrsmith.evolve.moves import Move
from pdrsmith.evolve.schemas import Diagnosis, Hypothesis
from pdrsmith.utils import sha256_text

logger = logging.getLogger(__name__)

FENCE_RE = re.compile(r'```(?P<lang>[A-Za-z0-9_-]*)[ \t]*\n(?P<body>.*?)```', re.DOTALL)


@dataclass
class Proposal:
    patch: str
    hypothesis: Hypothesis
    raw: str = ''


def fenced_blocks(text):
    return [(m['lang'].lower(), m['body']) for m in FENCE_RE.finditer(text or '')]


def parse_proposal(text, slots):
    """
    Extract the diff and Hypothesis from a programmer answer.

    Raises:
        AgentSchemaError: no diff block, no JSON block or an invalid hypothesis
    """
    blocks = fenced_blocks(text)
    diffs = [body for lang, body in blocks if lang in ('diff', 'patch')]
    docs = [body for lang, body in blocks if lang == 'json']
    if not diffs:
        raise AgentSchemaError("answer contains no ```diff block")
    if not docs:
        raise AgentSchemaError("answer contains no ```json Hypothesis block")
    try:
        hypothesis = Hypothesis.model_validate_json(docs[0])
    except ValidationError as exc:
        raise AgentSchemaError(f"hypothesis_v1 violation: {exc}") from None
    if hypothesis.primary_slot not in slots:
        raise AgentSchemaError(f"primary_slot '{hypothesis.primary_slot}' is not a registered slot")
    return Proposal(diffs[0], hypothesis, text)


def parse_diagnosis(text, slots):
    """
    Read the single JSON block of an evaluator answer.

    Raises:
        AgentSchemaError: zero or several blocks, or a diagnosis_v1 violation
    """
    docs = [body for lang, body in fenced_blocks(text) if lang == 'json']
    if len(docs) != 1:
        raise AgentSchemaError(f"expected exactly one ```json block, found {len(docs)}")
    try:
        data = json.loads(docs[0])
        return Diagnosis.model_validate(data, context={'slots': list(slots)})
    except (json.JSONDecodeError, ValidationError) as exc:
        raise AgentSchemaError(f"diagnosis_v1 violation: {exc}") from None


# ============================================================================
# TRANSPORTS
# ============================================================================

class ScriptedAgent:
    """
    Replays a transcript: {"by_hash": {sha256(prompt): answer},
    "propose": [answer, ...], "diagnose": [answer, ...]}.

    An answer is {"content": text} or {"error": message} to simulate an
    unreachable endpoint. Hash matches win; otherwise the next answer of the
    role is used.
    """

    def __init__(self, transcript, slots):
        if isinstance(transcript, (str, Path)):
            transcript = json.loads(Path(transcript).read_text())
        self.by_hash = dict(transcript.get('by_hash', {}))
        self.queues = {role: list(transcript.get(role, [])) for role in ('propose', 'diagnose')}
        self.slots = list(slots)
        self.calls = []

    def _answer(self, role, prompt):
        key = sha256_text(prompt)
        self.calls.append((role, key))
        if key in self.by_hash:
            entry = self.by_hash[key]
        elif self.queues[role]:
            entry = self.queues[role].pop(0)
        else:
            raise AgentTransportError(f"transcript has no {role} answer left")
        if 'error' in entry:
            raise AgentTransportError(entry['error'])
        return entry.get('content', '')

    def complete(self, role, prompt):
        return self._answer(role, prompt)

    def propose(self, prompt):
        return parse_proposal(self._answer('propose', prompt), self.slots)

    def diagnose(self, prompt):
        return parse_diagnosis(self._answer('diagnose', prompt), self.slots)


class HttpAgent:
    """
    POST {"model", "role", "prompt"} to the endpoint; expects {"content": text}.
    """

    def __init__(self, endpoint, slots, model=None, api_key=None, timeout=120.0, transport=None):
        if not endpoint:
            raise AgentTransportError("no agent endpoint configured (PDRSMITH_AGENT_ENDPOINT)")
        headers = {'Content-Type': 'application/json'}
        if api_key:
            headers['Authorization'] = f"Bearer {api_key}"
        self.endpoint = endpoint
        self.model = model
        self.slots = list(slots)
        self.client = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def complete(self, role, prompt):
        payload = {'model': self.model, 'role': role, 'prompt': prompt}
        try:
            resp = self.client.post(self.endpoint, json=payload)
            resp.raise_for_status()
            data = resp.json()
        except httpx.TimeoutException:
            raise AgentTransportError(f"agent request to {self.endpoint} timed out") from None
        except httpx.HTTPError as exc:
            raise AgentTransportError(f"agent request failed: {exc}") from None
        except ValueError:
            raise AgentTransportError("agent response is not JSON") from None
        content = data.get('content') if isinstance(data, dict) else None
        if not isinstance(content, str):
            raise AgentTransportError("agent response has no 'content' string")
        return content

    def propose(self, prompt):
        return parse_proposal(self.complete('propose', prompt), self.slots)

    def diagnose(self, prompt):
        return parse_diagnosis(self.complete('diagnose', prompt), self.slots)

    def close(self):
        self.client.close()


def make_agent(config, slots):
    """Agent for an AgentConfig"""
    if config.kind == 'http':
        return HttpAgent(config.endpoint, slots, model=config.model, api_key=config.api_key,
                         timeout=config.timeout)
    if not config.transcript:
        raise AgentTransportError("scripted agent needs a transcript file")
    return ScriptedAgent(config.transcript, slots)


# ============================================================================
# EVALUATORS
# ============================================================================

@dataclass
class EvaluationContext:
    slots: list
    champion: object
    challenger: object = None
    gate_passed: bool = None
    gate_reasons: tuple = ()
    build_failed: bool = False
    promotion: str = None
    patch: str = ''


def _totals(report):
    totals = {}
    for r in (report.runs if report else []):
        for key, value in r.counters.items():
            totals[key] = totals.get(key, 0.0) + value
    return totals


def _move(slots, **fields):
    return Move.model_validate(fields, context={'slots': list(slots)})


def _ratio(a, b):
    return a / b if b else 0.0


def _inert(champion, challenger):
    return (challenger.par2.avg_sec == champion.par2.avg_sec
            and challenger.solved_set() == champion.solved_set()
            and [r.verdict for r in challenger.runs] == [r.verdict for r in champion.runs])


class RubricEvaluator:
    """
    Deterministic evaluator: the decision rubric plus moves derived from the
    instrumentation counters of the latest report.
    """

    def moves(self, report, slots):
        c = _totals(report)
        moves = []
        if 'push_prop' in slots:
            rate = _ratio(c.get('push_success', 0), c.get('push_attempts', 0))
            if not c.get('push_attempts'):
                moves.append(_move(slots, slot='push_prop', direction='instrument push attempts and successes per frame',
                                  conf=0.4, risk=0.1, cost=0.2))
            elif not c.get('stall_skips'):
                moves.append(_move(slots, slot='push_prop', direction=f'gate pushing on stalled frames (success rate {rate:.2f})',
                                  conf=0.8 if rate < 0.3 else 0.5, risk=0.2, cost=0.3))
            else:
                moves.append(_move(slots, slot='push_prop', direction='adapt the push budget to recent success',
                                  conf=0.6, risk=0.3, cost=0.3))
        if 'po_handling' in slots:
            pressure = _ratio(c.get('requeues', 0), c.get('obligations', 0))
            moves.append(_move(slots, slot='po_handling', direction=f'reduce requeue pressure ({pressure:.2f} per obligation)',
                              conf=0.7 if pressure > 0.5 else 0.35, risk=0.3, cost=0.3))
        if 'ind_gen' in slots:
            yield_ = _ratio(c.get('lemmas', 0), c.get('ind_gen_sat_calls', 0))
            moves.append(_move(slots, slot='ind_gen', direction=f'cheaper generalization (lemma yield {yield_:.3f})',
                              conf=0.6 if yield_ < 0.1 else 0.3, risk=0.4, cost=0.5))
        if 'pred_gen' in slots:
            chain = _ratio(c.get('obligations', 0), c.get('ctis', 0))
            moves.append(_move(slots, slot='pred_gen', direction=f'stronger lifting (chain length {chain:.2f})',
                              conf=0.5 if chain > 3 else 0.25, risk=0.3, cost=0.4))
        for slot in slots:
            if not any(m.slot == slot for m in moves):
                moves.append(_move(slots, slot=slot, direction='explore an alternative variant', conf=0.3, risk=0.3, cost=0.3))
        return moves

    def diagnose(self, ctx):
        champ = ctx.champion
        latest = ctx.challenger or champ
        moves = self.moves(latest, ctx.slots)
        if ctx.build_failed:
            return Diagnosis(decision='REVERT', build_failed=True, moveset=moves,
                             reasons=["build failed", f"champion par2 {champ.par2.avg_sec:.4f}",
                                      f"champion solved {champ.solved}"],
                             evidence='challenger did not build')
        if ctx.gate_passed is False:
            reasons = [f"gate failures: {len(ctx.gate_reasons)}"] + list(ctx.gate_reasons[:3])
            reasons += [f"champion par2 {champ.par2.avg_sec:.4f}", f"champion solved {champ.solved}"]
            return Diagnosis(decision='REVERT', moveset=moves, reasons=reasons[:6],
                             evidence='proof/witness gate rejected the challenger')
        chal = ctx.challenger
        delta = chal.par2.avg_sec - champ.par2.avg_sec
        pct = 100.0 * _ratio(delta, champ.par2.avg_sec)
        lost = sorted(champ.solved_set() - chal.solved_set())
        reasons = [
            f"par2 {champ.par2.avg_sec:.4f} -> {chal.par2.avg_sec:.4f} ({pct:+.1f}%)",
            f"solved {champ.solved} -> {chal.solved}",
            f"timeouts {champ.timeouts} -> {chal.timeouts}",
            f"lost instances: {len(lost)}",
        ]
        if _inert(champ, chal):
            return Diagnosis(decision='RETRY', reasons=reasons[:3] + ["metrics unchanged: the patch appears inert"],
                             moveset=moves, evidence='identical metrics')
        decision = 'ACCEPT' if ctx.promotion == 'PROMOTE' else 'REVERT'
        return Diagnosis(decision=decision, reasons=reasons, moveset=moves,
                         evidence='promotion rule' + (' holds' if decision == 'ACCEPT' else ' fails'))


class AgentEvaluator:
    """Renders the evaluator prompt and asks an agent; one retry on schema violation"""

    def __init__(self, agent, render, fallback=None):
        self.agent = agent
        self.render = render
        self.fallback = fallback or RubricEvaluator()

    def diagnose(self, ctx):
        prompt = self.render(ctx)
        for attempt in (1, 2):
            try:
                return self.agent.diagnose(prompt)
            except AgentSchemaError as exc:
                logger.warning("diagnosis rejected (attempt %d): %s", attempt, exc)
            except AgentTransportError as exc:
                logger.warning("evaluator unreachable: %s", exc)
                break
        logger.warning("falling back to the rubric evaluator")
        return self.fallback.diagnose(ctx)

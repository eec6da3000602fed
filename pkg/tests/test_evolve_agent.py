import json

import httpx
import pytest

from pdrsmith.bench import RunRecord, aggregate
from pdrsmith.errors import AgentSchemaError, AgentTransportError
from pdrsmith.evolve.agent import (
    AgentEvaluator, EvaluationContext, HttpAgent, RubricEvaluator, ScriptedAgent, parse_diagnosis, parse_proposal,
)
from pdrsmith.ic3.policies import SLOTS
from pdrsmith.utils import sha256_text

HYPOTHESIS = {"schema": "hypothesis_v1", "primary_slot": "push_prop", "fallback": "revert"}
DIAGNOSIS = {"schema": "diagnosis_v1", "decision": "ACCEPT", "reasons": ["a", "b", "c"],
             "moveset": [{"slot": "ind_gen", "direction": "cheaper", "conf": 0.5}]}


def answer(patch="--- a/x.py\n+++ b/x.py\n", hypothesis=HYPOTHESIS):
    return f"Here it is.\n```diff\n{patch}```\n\n```json\n{json.dumps(hypothesis)}\n```\n"


def fenced(doc):
    return {"content": f"```json\n{json.dumps(doc)}\n```"}


def report(*seconds, timeout=10):
    runs = [RunRecord(instance=f"a{k}", path=f"a{k}.aag", verdict='SAFE' if s is not None else 'TIMEOUT',
                      wall_time=s or timeout, seconds=s or timeout, ok=s is not None)
            for k, s in enumerate(seconds)]
    return aggregate(runs, timeout)


# ============================================================================
# PARSING
# ============================================================================

def test_parse_proposal():
    proposal = parse_proposal(answer(), SLOTS)
    assert proposal.patch == "--- a/x.py\n+++ b/x.py\n"
    assert proposal.hypothesis.primary_slot == 'push_prop'
    assert proposal.hypothesis.fallback == 'revert'


def test_proposal_without_diff():
    with pytest.raises(AgentSchemaError, match="no ```diff block"):
        parse_proposal(f"```json\n{json.dumps(HYPOTHESIS)}\n```\n", SLOTS)


def test_proposal_with_unknown_primary_slot():
    with pytest.raises(AgentSchemaError, match="not a registered slot"):
        parse_proposal(answer(hypothesis={**HYPOTHESIS, "primary_slot": "warp"}), SLOTS)


def test_proposal_without_fallback():
    with pytest.raises(AgentSchemaError, match="hypothesis_v1"):
        parse_proposal(answer(hypothesis={"schema": "hypothesis_v1", "primary_slot": "push_prop"}), SLOTS)


def test_parse_diagnosis():
    diagnosis = parse_diagnosis(fenced(DIAGNOSIS)["content"], SLOTS)
    assert diagnosis.decision == 'ACCEPT'
    assert diagnosis.moveset[0].slot == 'ind_gen'


@pytest.mark.parametrize("change, fragment", [
    ({"decision": None}, "diagnosis_v1"),
    ({"reasons": ["only one"]}, "diagnosis_v1"),
    ({"moveset": []}, "moveset may only be empty"),
    ({"moveset": [{"slot": "warp"}]}, "unknown slot"),
])
def test_diagnosis_violations(change, fragment):
    doc = {k: v for k, v in {**DIAGNOSIS, **change}.items() if v is not None}
    with pytest.raises(AgentSchemaError, match=fragment):
        parse_diagnosis(fenced(doc)["content"], SLOTS)


def test_empty_moveset_after_build_failure():
    doc = {**DIAGNOSIS, "decision": "REVERT", "moveset": [], "build_failed": True}
    assert parse_diagnosis(fenced(doc)["content"], SLOTS).build_failed


def test_diagnosis_needs_exactly_one_block():
    text = fenced(DIAGNOSIS)["content"] * 2
    with pytest.raises(AgentSchemaError, match="found 2"):
        parse_diagnosis(text, SLOTS)


# ============================================================================
# SCRIPTED AGENT
# ============================================================================

def test_scripted_agent_replays_in_order():
    agent = ScriptedAgent({"propose": [{"content": "first"}, {"content": "second"}]}, SLOTS)
    assert agent.complete('propose', 'p1') == "first"
    assert agent.complete('propose', 'p2') == "second"
    with pytest.raises(AgentTransportError, match="no propose answer left"):
        agent.complete('propose', 'p3')


def test_scripted_agent_prefers_hash_matches():
    agent = ScriptedAgent({"by_hash": {sha256_text("known"): {"content": "hashed"}},
                           "propose": [{"content": "queued"}]}, SLOTS)
    assert agent.complete('propose', "known") == "hashed"
    assert agent.complete('propose', "other") == "queued"


def test_scripted_agent_error_entries():
    agent = ScriptedAgent({"propose": [{"error": "connection refused"}]}, SLOTS)
    with pytest.raises(AgentTransportError, match="connection refused"):
        agent.propose("prompt")


def test_scripted_agent_from_file(tmp_path):
    path = tmp_path / 'transcript.json'
    path.write_text(json.dumps({"propose": [{"content": answer()}]}))
    assert ScriptedAgent(path, SLOTS).propose("x").hypothesis.primary_slot == 'push_prop'


# ============================================================================
# HTTP AGENT
# ============================================================================

def test_http_agent_payload_and_auth():
    seen = []

    def handler(request):
        seen.append(request)
        return httpx.Response(200, json={"content": answer()})

    agent = HttpAgent("http://agent.test/v1", SLOTS, model="m1", api_key="k",
                      transport=httpx.MockTransport(handler))
    proposal = agent.propose("the prompt")
    assert proposal.hypothesis.primary_slot == 'push_prop'
    (request,) = seen
    assert request.headers['authorization'] == "Bearer k"
    assert json.loads(request.content) == {"model": "m1", "role": "propose", "prompt": "the prompt"}
    agent.close()


@pytest.mark.parametrize("handler, fragment", [
    (lambda request: httpx.Response(500, text="down"), "request failed"),
    (lambda request: httpx.Response(200, text="not json"), "not JSON"),
    (lambda request: httpx.Response(200, json={"text": "x"}), "no 'content'"),
])
def test_http_agent_failures(handler, fragment):
    agent = HttpAgent("http://agent.test/v1", SLOTS, transport=httpx.MockTransport(handler))
    with pytest.raises(AgentTransportError, match=fragment):
        agent.complete('propose', "p")


def test_http_agent_timeout():
    def handler(request):
        raise httpx.ReadTimeout("slow", request=request)

    agent = HttpAgent("http://agent.test/v1", SLOTS, transport=httpx.MockTransport(handler))
    with pytest.raises(AgentTransportError, match="timed out"):
        agent.complete('diagnose', "p")


def test_http_agent_needs_endpoint():
    with pytest.raises(AgentTransportError, match="no agent endpoint"):
        HttpAgent(None, SLOTS)


# ============================================================================
# EVALUATORS
# ============================================================================

def test_rubric_inert_patch_is_retried():
    champion = report(1.0, 2.0)
    diagnosis = RubricEvaluator().diagnose(EvaluationContext(list(SLOTS), champion, report(1.0, 2.0),
                                                             gate_passed=True, promotion='REVERT'))
    assert diagnosis.decision == 'RETRY'
    assert "inert" in diagnosis.reasons[-1]
    assert {m.slot for m in diagnosis.moveset} == set(SLOTS)


def test_rubric_build_failure_reverts():
    diagnosis = RubricEvaluator().diagnose(EvaluationContext(list(SLOTS), report(1.0), build_failed=True))
    assert diagnosis.decision == 'REVERT'
    assert diagnosis.build_failed


def test_rubric_gate_failure_reverts():
    diagnosis = RubricEvaluator().diagnose(EvaluationContext(list(SLOTS), report(1.0), report(0.5),
                                                             gate_passed=False, gate_reasons=('a0: SAFE failed',)))
    assert diagnosis.decision == 'REVERT'
    assert 'a0: SAFE failed' in diagnosis.reasons


def test_rubric_follows_promotion():
    ctx = EvaluationContext(list(SLOTS), report(4.0, None), report(1.0, None), gate_passed=True,
                            promotion='PROMOTE')
    diagnosis = RubricEvaluator().diagnose(ctx)
    assert diagnosis.decision == 'ACCEPT'
    assert diagnosis.reasons[0].startswith("par2 12.0000 -> 10.5000")


def test_agent_evaluator_retries_once():
    missing = {k: v for k, v in DIAGNOSIS.items() if k != 'decision'}
    agent = ScriptedAgent({"diagnose": [fenced(missing), fenced(DIAGNOSIS)]}, SLOTS)
    evaluator = AgentEvaluator(agent, render=lambda ctx: "prompt")
    diagnosis = evaluator.diagnose(EvaluationContext(list(SLOTS), report(1.0), report(1.0)))
    assert diagnosis.decision == 'ACCEPT'
    assert len(agent.calls) == 2


def test_agent_evaluator_falls_back_to_rubric():
    missing = {k: v for k, v in DIAGNOSIS.items() if k != 'decision'}
    agent = ScriptedAgent({"diagnose": [fenced(missing), fenced(missing), fenced(DIAGNOSIS)]}, SLOTS)
    evaluator = AgentEvaluator(agent, render=lambda ctx: "prompt")
    ctx = EvaluationContext(list(SLOTS), report(1.0), report(1.0), gate_passed=True, promotion='REVERT')
    assert evaluator.diagnose(ctx).decision == 'RETRY'
    assert len(agent.calls) == 2

"""
Clause pushing (slot: push_prop)

baseline        attempt every clause of every frame, simplify every round
gated_simplify  simplify only when something moved or every `checkpoint` rounds
stall_skip      skip frames whose last `limit` rounds pushed nothing
adaptive_budget per-frame attempt budget, grown on success and shrunk on
                stalls; a frame's round ends after `early_cut` failures in a row;
                simplifies like gated_simplify
"""
import logging
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

PUSH_VARIANTS = {
    'baseline': {},
    'gated_simplify': {'checkpoint': 4},
    'stall_skip': {'limit': 3},
    'adaptive_budget': {'base': 8, 'cap': 32, 'early_cut': 3, 'checkpoint': 4},
}


@dataclass
class HeuristicState:
    round: int = 0
    push_success_rate: float = 0.0
    stall_streak: dict = field(default_factory=dict)
    push_budget: dict = field(default_factory=dict)
    last_attempt: dict = field(default_factory=dict)
    po_priority_params: dict = field(default_factory=dict)


def push_clauses(engine, k, policy, state):
    """Try to move clauses of F_i into F_{i+1} for i = 1..k-1"""
    state.round += 1
    variant = policy.variant
    params = policy.params
    attempts = successes = 0

    for i in range(1, k):
        if variant == 'stall_skip':
            limit = int(params.get('limit', 3))
            if state.stall_streak.get(i, 0) >= limit:
                engine.stats['stall_skips'] += 1
                state.stall_streak[i] = limit - 1
                continue

        clauses = sorted(engine.frames.delta(i), key=lambda c: state.last_attempt.get(c, 0))
        if not clauses:
            continue

        budget = None
        if variant == 'adaptive_budget':
            budget = state.push_budget.setdefault(i, int(params.get('base', 8)))
        early_cut = int(params.get('early_cut', 3))

        pushed = tried = misses = 0
        for clause in clauses:
            if budget is not None and tried >= budget:
                break
            state.last_attempt[clause] = state.round
            tried += 1
            if engine.try_push(clause, i):
                pushed += 1
                misses = 0
            else:
                misses += 1
                if budget is not None and misses >= early_cut:
                    engine.stats['early_cuts'] += 1
                    break

        state.stall_streak[i] = 0 if pushed else state.stall_streak.get(i, 0) + 1
        if budget is not None:
            if pushed:
                state.push_budget[i] = min(int(params.get('cap', 32)), budget * 2)
            else:
                state.push_budget[i] = max(1, budget // 4)
        attempts += tried
        successes += pushed

    state.push_success_rate = successes / attempts if attempts else 0.0

    if variant in ('gated_simplify', 'adaptive_budget'):
        checkpoint = int(params.get('checkpoint', 4))
        if successes or state.round % checkpoint == 0:
            engine.simplify()
    else:
        engine.simplify()
    logger.debug("push round %d: %d/%d pushed", state.round, successes, attempts)

"""
Inductive and predecessor generalization (slots: ind_gen, pred_gen)

Both functions only talk to the engine through its query helpers:
``init_intersects``, ``relatively_inductive``, ``lift`` and
``verify_lemma``. Whatever they return is re-checked before use.
"""
import logging

from pdrsmith.errors import InternalError
from pdrsmith.ic3.cube import make_clause, make_cube, negate

logger = logging.getLogger(__name__)

IND_GEN_VARIANTS = {
    'down': {'budget_factor': 3, 'recheck': 0},
    'core_only': {'recheck': 0},
    'mic': {'budget_factor': 3, 'recheck': 0},
}

PRED_GEN_VARIANTS = {
    'lift': {},
    'full': {},
    'lift_reversed': {},
    'lift_shuffled': {},
}


# ============================================================================
# IND_GEN
# ============================================================================

def _restore_initiation(engine, source, cube):
    """Re-add a literal of `source` that excludes the initial states"""
    if not engine.init_intersects(cube):
        return make_cube(cube)
    init = set(engine.ts.init)
    for lit in source:
        if -lit in init:
            return make_cube(tuple(cube) + (lit,))
    raise InternalError("cube intersects the initial states", {'cube': source})


def _down(engine, t, level, budget, repeat):
    calls = 0
    changed = True
    while changed and calls < budget:
        changed = False
        for lit in list(t):
            if calls >= budget:
                break
            if lit not in t:
                continue
            candidate = tuple(l for l in t if l != lit)
            if not candidate or engine.init_intersects(candidate):
                continue
            calls += 1
            engine.stats['ind_gen_sat_calls'] += 1
            ok, core = engine.relatively_inductive(candidate, level)
            if ok:
                t = _restore_initiation(engine, candidate, core)
                changed = True
        if not repeat:
            break
    return t


def ind_gen(engine, s, level, policy, core=None):
    """
    Blocking clause c ⊆ ¬s with I ⇒ c and F_{level-1} ∧ c ∧ T ⇒ c'.

    Args:
        engine: running Ic3 instance
        s: cube that is blockable at `level`
        level: frame index, >= 1
        policy: ind_gen SlotPolicy
        core: failed-assumption subset of s from the blockability query

    Returns:
        canonical clause
    """
    engine.stats['ind_gen_calls'] += 1
    t = _restore_initiation(engine, s, core if core is not None else s)
    if policy.variant != 'core_only':
        budget = int(policy.params.get('budget_factor', 3)) * len(s)
        t = _down(engine, t, level, budget, repeat=policy.variant == 'mic')

    if engine.init_intersects(t):
        raise InternalError("generalized lemma violates initiation", {'cube': t, 'level': level})
    ok, _ = engine.relatively_inductive(t, level)
    if not ok:
        raise InternalError("generalized lemma is not relatively inductive", {'cube': t, 'level': level})

    clause = make_clause(negate(t))
    if policy.params.get('recheck'):
        engine.verify_lemma(clause, level)
    logger.debug("ind_gen level %d: |s|=%d -> |c|=%d", level, len(s), len(clause))
    return clause


# ============================================================================
# PRED_GEN
# ============================================================================

def pred_gen(engine, state, inputs, target, policy, rng, primed_inputs=None):
    """
    Generalize a predecessor state to a cube whose every state reaches
    `target` under the same inputs.

    Args:
        state: full latch cube from the SAT model
        inputs: input bits of the transition
        target: successor cube, or None for "bad under primed_inputs"
        rng: random.Random used by lift_shuffled

    Returns:
        cube over latch literals, a subset of `state`
    """
    engine.stats['pred_gen_calls'] += 1
    if policy.variant == 'full':
        return make_cube(state)
    order = list(state)
    if policy.variant == 'lift_reversed':
        order.reverse()
    elif policy.variant == 'lift_shuffled':
        rng.shuffle(order)
    return make_cube(engine.lift(order, inputs, target, primed_inputs))
